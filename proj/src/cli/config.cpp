#include "otoc/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "otoc/cli/output.hpp"
#include "otoc/parallel.hpp"

namespace otoc::cli {

std::string to_string(Command c) {
  switch (c) {
    case Command::trace: return "trace";
    case Command::scan: return "scan";
    case Command::scaling: return "scaling";
    case Command::order_param: return "order-param";
    case Command::size_fit: return "size-fit";
    case Command::cutoff_study: return "cutoff-study";
  }
  return "unknown";
}

Command parse_command(const std::string& text) {
  for (Command c : {Command::trace, Command::scan, Command::scaling, Command::order_param, Command::size_fit,
                    Command::cutoff_study}) {
    if (to_string(c) == text) return c;
  }
  throw ConfigError("command", "unknown command '" + text + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double number(const std::string& key, const std::string& text) {
  try {
    const auto caret = text.find('^');
    if (caret == std::string::npos) return parse_double(text);
    const double base = parse_double(text.substr(0, caret));
    const double exponent = parse_double(text.substr(caret + 1));
    return base == 2.0 ? std::ldexp(1.0, static_cast<int>(exponent)) : std::pow(base, exponent);
  } catch (const Error&) {
    throw ConfigError(key, "'" + text + "' is not a number");
  }
}

int integer(const std::string& key, const std::string& text) {
  const double v = number(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key, "'" + text + "' is not an integer");
  return static_cast<int>(v);
}

bool boolean(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(key, "'" + text + "' is not a boolean (true/false)");
}

template <class T, class F>
std::vector<T> list_of(const std::string& text, F&& parse) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse(item));
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F&& format) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format(v[i]);
  }
  return out;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }
std::string fmt_int(int i) { return std::to_string(i); }

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class M>
Field real_field(const std::string& key, M RunConfig::*member) {
  return {[=](RunConfig& c, const std::string& v) { c.*member = number(key, v); },
          [=](const RunConfig& c) { return format_double(c.*member); }};
}

template <class M>
Field int_field(const std::string& key, M RunConfig::*member) {
  return {[=](RunConfig& c, const std::string& v) { c.*member = integer(key, v); },
          [=](const RunConfig& c) { return fmt_int(c.*member); }};
}

Field bool_field(const std::string& key, bool RunConfig::*member) {
  return {[=](RunConfig& c, const std::string& v) { c.*member = boolean(key, v); },
          [=](const RunConfig& c) { return fmt_bool(c.*member); }};
}

Field reals_field(const std::string& key, std::vector<double> RunConfig::*member) {
  return {[=](RunConfig& c, const std::string& v) {
            c.*member = list_of<double>(v, [&](const std::string& s) { return number(key, s); });
          },
          [=](const RunConfig& c) { return join(c.*member, format_double); }};
}

Field ints_field(const std::string& key, std::vector<int> RunConfig::*member) {
  return {[=](RunConfig& c, const std::string& v) {
            c.*member = list_of<int>(v, [&](const std::string& s) { return integer(key, s); });
          },
          [=](const RunConfig& c) { return join(c.*member, fmt_int); }};
}

using Registry = std::vector<std::pair<std::string, Field>>;

const Registry& registry() {
  static const Registry fields = [] {
    Registry r;
    r.emplace_back("command", Field{[](RunConfig& c, const std::string& v) { c.command = parse_command(v); },
                                    [](const RunConfig& c) { return to_string(c.command); }});
    r.emplace_back("model", Field{[](RunConfig& c, const std::string& v) {
                                    try {
                                      c.model = parse_model_kind(v);
                                    } catch (const Error& e) {
                                      throw ConfigError("model", e.what());
                                    }
                                  },
                                  [](const RunConfig& c) { return std::string(to_string(c.model)); }});
    r.emplace_back("omega0", real_field("omega0", &RunConfig::omega0));
    r.emplace_back("eta", real_field("eta", &RunConfig::eta));
    r.emplace_back("cutoff", int_field("cutoff", &RunConfig::cutoff));
    r.emplace_back("atoms", int_field("atoms", &RunConfig::atoms));
    r.emplace_back("ratio", real_field("ratio", &RunConfig::ratio));
    r.emplace_back("ratio_lo", real_field("ratio_lo", &RunConfig::ratio_lo));
    r.emplace_back("ratio_hi", real_field("ratio_hi", &RunConfig::ratio_hi));
    r.emplace_back("ratio_step", real_field("ratio_step", &RunConfig::ratio_step));
    r.emplace_back("ratios", reals_field("ratios", &RunConfig::ratios));
    r.emplace_back("kind", Field{[](RunConfig& c, const std::string& v) {
                                   try {
                                     c.kind = list_of<AverageKind>(v, parse_average_kind);
                                   } catch (const ConfigError&) {
                                     throw;
                                   } catch (const Error& e) {
                                     throw ConfigError("kind", e.what());
                                   }
                                 },
                                 [](const RunConfig& c) {
                                   return join(c.kind, [](AverageKind k) { return to_string(k); });
                                 }});
    r.emplace_back("betas", reals_field("betas", &RunConfig::betas));
    r.emplace_back("ground", bool_field("ground", &RunConfig::ground));
    r.emplace_back("normalize", bool_field("normalize", &RunConfig::normalize));
    r.emplace_back("parity", bool_field("parity", &RunConfig::parity));
    r.emplace_back("t_start", real_field("t_start", &RunConfig::t_start));
    r.emplace_back("t_end", real_field("t_end", &RunConfig::t_end));
    r.emplace_back("dt", real_field("dt", &RunConfig::dt));
    r.emplace_back("lyapunov", bool_field("lyapunov", &RunConfig::lyapunov));
    r.emplace_back("fit_window", reals_field("fit_window", &RunConfig::fit_window));
    r.emplace_back("etas", reals_field("etas", &RunConfig::etas));
    r.emplace_back("gammas", reals_field("gammas", &RunConfig::gammas));
    r.emplace_back("atoms_list", ints_field("atoms_list", &RunConfig::atoms_list));
    r.emplace_back("search_lo", real_field("search_lo", &RunConfig::search_lo));
    r.emplace_back("search_hi", real_field("search_hi", &RunConfig::search_hi));
    r.emplace_back("coarse_step", real_field("coarse_step", &RunConfig::coarse_step));
    r.emplace_back("fine_step", real_field("fine_step", &RunConfig::fine_step));
    r.emplace_back("fine_halfwidth", real_field("fine_halfwidth", &RunConfig::fine_halfwidth));
    r.emplace_back("zoom_stages", int_field("zoom_stages", &RunConfig::zoom_stages));
    r.emplace_back("refine", bool_field("refine", &RunConfig::refine));
    r.emplace_back("prefer_interior", bool_field("prefer_interior", &RunConfig::prefer_interior));
    r.emplace_back("synthetic_slope", real_field("synthetic_slope", &RunConfig::synthetic_slope));
    r.emplace_back("synthetic_intercept", real_field("synthetic_intercept", &RunConfig::synthetic_intercept));
    r.emplace_back("probes", reals_field("probes", &RunConfig::probes));
    r.emplace_back("cutoffs", ints_field("cutoffs", &RunConfig::cutoffs));
    r.emplace_back("rescale", bool_field("rescale", &RunConfig::rescale));
    r.emplace_back("timing", bool_field("timing", &RunConfig::timing));
    r.emplace_back("output", Field{[](RunConfig& c, const std::string& v) {
                                     if (v.empty()) throw ConfigError("output", "empty path");
                                     c.output = v;
                                   },
                                   [](const RunConfig& c) { return c.output; }});
    r.emplace_back("threads", Field{[](RunConfig& c, const std::string& v) {
                                      c.threads = integer("threads", v);
                                      if (c.threads < 0) throw ConfigError("threads", "must be >= 0");
                                    },
                                    [](const RunConfig& c) { return fmt_int(c.threads); }});
    return r;
  }();
  return fields;
}

const Field& field(const std::string& key) {
  for (const auto& [name, f] : registry()) {
    if (name == key) return f;
  }
  throw ConfigError(key, "unknown key");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& entry : registry()) k.push_back(entry.first);
    return k;
  }();
  return keys;
}

void set_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  field(key).set(cfg, trim(value));
}

std::string get_value(const RunConfig& cfg, const std::string& key) { return field(key).get(cfg); }

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line, "line " + std::to_string(lineno) + " is not of the form key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (!seen.insert(key).second) throw ConfigError(key, "given twice");
    out.emplace_back(std::move(key), trim(line.substr(eq + 1)));
  }
  return out;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  for (const auto& [key, value] : parse_config_text(buf.str())) set_value(base, key, value);
  return base;
}

std::vector<std::pair<std::string, std::string>> snapshot(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, f] : registry()) {
    if (name != "threads") out.emplace_back(name, f.get(cfg));
  }
  return out;
}

RunConfig parse_echo(const std::string& text) {
  static const std::string prefix = "# config.";
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) != 0) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw ConfigError(line, "malformed echo line");
    set_value(cfg, line.substr(prefix.size(), eq - prefix.size()), line.substr(eq + 3));
  }
  return cfg;
}

ModelParams RunConfig::model_params() const {
  ModelParams p;
  p.omega0 = omega0;
  p.Omega = eta * omega0;
  p.cutoff = BosonCutoff(cutoff);
  p.spin = SpinLength(model == ModelKind::rabi ? 1 : atoms);
  return p;
}

TimeGrid RunConfig::time_grid() const { return TimeGrid(t_start, t_end, dt); }

MinimumSearch RunConfig::minimum_search() const {
  MinimumSearch s;
  s.coarse_lo = search_lo;
  s.coarse_hi = search_hi;
  s.coarse_step = coarse_step;
  s.fine_step = fine_step;
  s.fine_halfwidth = fine_halfwidth;
  s.zoom_stages = zoom_stages;
  s.refine = refine;
  s.prefer_interior = prefer_interior;
  return s;
}

unsigned RunConfig::worker_count() const {
  return threads > 0 ? static_cast<unsigned>(threads) : default_thread_count();
}

namespace {

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

template <class Build>
void rethrow_as_config(const std::string& key, Build&& build) {
  try {
    build();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

bool positive_all(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0 && std::isfinite(x); });
}

}  // namespace

void validate(const RunConfig& cfg) {
  require(cfg.omega0 > 0.0 && std::isfinite(cfg.omega0), "omega0", "must be > 0");
  require(cfg.eta > 0.0 && std::isfinite(cfg.eta), "eta", "must be > 0");
  require(cfg.cutoff >= 2, "cutoff", "must be >= 2");
  require(cfg.atoms >= 1, "atoms", "must be >= 1");
  require(cfg.model == ModelKind::dicke || cfg.atoms == 1, "atoms", "the rabi model has exactly one atom");
  require(cfg.ratio >= 0.0, "ratio", "must be >= 0");
  require(std::all_of(cfg.betas.begin(), cfg.betas.end(), [](double b) { return b >= 0.0 && std::isfinite(b); }),
          "betas", "must be finite and >= 0");
  rethrow_as_config("dt", [&] { (void)cfg.time_grid(); });
  require(!cfg.kind.empty(), "kind", "needs at least one correlator kind");

  const bool thermal = std::find(cfg.kind.begin(), cfg.kind.end(), AverageKind::otoc_thermal) != cfg.kind.end();
  switch (cfg.command) {
    case Command::trace:
      require(cfg.fit_window.size() == 2 && cfg.fit_window[0] < cfg.fit_window[1], "fit_window",
              "needs two increasing times");
      require(!thermal || !cfg.betas.empty(), "betas", "otoc-thermal needs at least one beta");
      break;
    case Command::scan: {
      require(!thermal || !cfg.betas.empty(), "betas", "otoc-thermal needs at least one beta");
      std::size_t points = 0;
      rethrow_as_config("ratio_step", [&] {
        points = CouplingGrid::range(cfg.ratio_lo, cfg.ratio_hi, cfg.ratio_step).size();
      });
      require(points >= 3, "ratio_step", "a scan needs at least 3 grid points, got " + std::to_string(points));
      break;
    }
    case Command::order_param: {
      require(cfg.ground || !cfg.betas.empty(), "betas", "nothing to compute: ground = false and no betas");
      std::size_t points = 0;
      rethrow_as_config("ratio_step", [&] {
        points = CouplingGrid::range(cfg.ratio_lo, cfg.ratio_hi, cfg.ratio_step).size();
      });
      require(points >= 3, "ratio_step", "a scan needs at least 3 grid points, got " + std::to_string(points));
      require(positive_all(cfg.etas), "etas", "must be > 0");
      break;
    }
    case Command::scaling:
      require(cfg.kind.size() == 1, "kind", "scaling takes exactly one correlator kind");
      require(!thermal || cfg.betas.size() == 1, "betas", "thermal scaling takes exactly one beta");
      require(cfg.search_lo < cfg.search_hi, "search_hi", "must exceed search_lo");
      require(cfg.coarse_step > 0.0 && cfg.fine_step > 0.0 && cfg.fine_halfwidth > 0.0, "coarse_step",
              "search steps must be > 0");
      require(cfg.zoom_stages >= 0, "zoom_stages", "must be >= 0");
      if (cfg.model == ModelKind::rabi) {
        require(cfg.etas.size() >= 3 && positive_all(cfg.etas), "etas", "needs at least 3 positive values");
      } else {
        require(cfg.gammas.size() >= 2 && positive_all(cfg.gammas), "gammas", "needs at least 2 positive values");
        require(!cfg.atoms_list.empty(), "atoms_list", "needs at least one atom count");
      }
      break;
    case Command::size_fit:
      require(cfg.model == ModelKind::dicke, "model", "size-fit needs the dicke model");
      require(cfg.atoms_list.size() >= 4, "atoms_list", "needs at least 4 atom counts");
      require(std::is_sorted(cfg.atoms_list.begin(), cfg.atoms_list.end()), "atoms_list", "must be increasing");
      require(!cfg.ratios.empty(), "ratios", "needs at least one g/g_c value");
      require(cfg.kind.size() == 1, "kind", "size-fit takes exactly one correlator kind");
      break;
    case Command::cutoff_study:
      require(cfg.cutoffs.size() >= 2, "cutoffs", "needs at least 2 cutoffs");
      require(!cfg.probes.empty(), "probes", "needs at least one probe time");
      break;
  }
  for (int n : cfg.atoms_list) require(n >= 1, "atoms_list", "atom counts must be >= 1");
  for (int n : cfg.cutoffs) require(n >= 2, "cutoffs", "cutoffs must be >= 2");
}

}  // namespace otoc::cli
