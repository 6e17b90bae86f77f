#pragma once

// Flat `key = value` run configuration shared by every subcommand.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "otoc/analysis.hpp"
#include "otoc/errors.hpp"
#include "otoc/models.hpp"

namespace otoc::cli {

// A malformed or unknown configuration entry; `key` names the culprit.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error("config key '" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class Command { trace, scan, scaling, order_param, size_fit, cutoff_study };

std::string to_string(Command c);
Command parse_command(const std::string& text);

struct RunConfig {
  Command command = Command::trace;

  ModelKind model = ModelKind::rabi;
  double omega0 = 1.0;
  double eta = 1048576.0;  // Omega / omega0
  int cutoff = 80;
  int atoms = 1;

  double ratio = 1.0;
  double ratio_lo = 0.5;
  double ratio_hi = 1.5;
  double ratio_step = 0.01;
  std::vector<double> ratios{0.5, 0.8, 1.0, 1.2, 1.5};

  std::vector<AverageKind> kind{AverageKind::otoc_inf};
  std::vector<double> betas{};
  bool ground = true;
  bool normalize = true;
  bool parity = true;

  double t_start = 0.0;
  double t_end = 500.0;
  double dt = 0.1;

  bool lyapunov = false;
  std::vector<double> fit_window{0.3, 0.6};

  std::vector<double> etas{2048, 4096, 8192, 16384, 32768, 65536, 131072, 262144, 524288, 1048576};
  std::vector<double> gammas{16384, 65536, 262144, 1048576};
  std::vector<int> atoms_list{1, 2, 3, 4, 5, 6};

  double search_lo = 0.9;
  double search_hi = 1.2;
  double coarse_step = 0.01;
  double fine_step = 0.002;
  double fine_halfwidth = 0.03;
  int zoom_stages = 0;
  bool refine = true;
  bool prefer_interior = true;

  double synthetic_slope = 0.0;  // nonzero: scaling uses injected exact power-law minima
  double synthetic_intercept = 0.0;

  std::vector<double> probes{0.0, 50.0};
  std::vector<int> cutoffs{20, 40, 60, 80, 100};

  bool rescale = false;
  bool timing = false;
  std::string output = ".";
  // Worker count; 0 defers to OTOC_THREADS or the hardware. Not part of the
  // echoed snapshot, so outputs do not depend on it.
  int threads = 0;

  bool operator==(const RunConfig&) const = default;

  // Physical parameters at the configured eta, cutoff and atom count (g = 0).
  ModelParams model_params() const;
  TimeGrid time_grid() const;
  MinimumSearch minimum_search() const;
  unsigned worker_count() const;
};

// Every recognised key, in echo order.
const std::vector<std::string>& config_keys();

// Assign one key from its textual value. Numbers accept `2^k` shorthand;
// lists are comma separated; booleans are true/false/1/0.
void set_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_value(const RunConfig& cfg, const std::string& key);

// Parse `key = value` lines with `#` comments into (key, value) pairs.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

RunConfig load_config_file(const std::string& path, RunConfig base = {});

// Resolved snapshot: every key except `threads`, canonical values.
std::vector<std::pair<std::string, std::string>> snapshot(const RunConfig& cfg);

// Reads back the `# config.key = value` lines written into CSV headers.
RunConfig parse_echo(const std::string& text);

// Command-specific checks beyond single-field syntax.
void validate(const RunConfig& cfg);

}  // namespace otoc::cli
