#pragma once

// Coupling scans, extremum location, susceptibilities and the scaling-law
// fits used to extract critical exponents.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "otoc/correlators.hpp"
#include "otoc/models.hpp"

namespace otoc {

// Strictly increasing list of g/g_c values.
class CouplingGrid {
 public:
  explicit CouplingGrid(std::vector<double> ratios);
  // lo, lo + step, ..., up to hi (inclusive within 1e-9 step).
  static CouplingGrid range(double lo, double hi, double step);

  const std::vector<double>& ratios() const& noexcept { return ratios_; }
  // Rvalue overload so that `for (double r : CouplingGrid::range(...).ratios())` is safe.
  std::vector<double> ratios() && noexcept { return std::move(ratios_); }
  std::size_t size() const noexcept { return ratios_.size(); }
  double front() const { return ratios_.front(); }
  double back() const { return ratios_.back(); }

 private:
  std::vector<double> ratios_;
};

enum class AverageKind { otoc_inf, otoc_thermal, otoc_equilibrium, tpc_inf };

std::string to_string(AverageKind kind);
AverageKind parse_average_kind(const std::string& text);

struct ScanMeta {
  ModelKind model = ModelKind::rabi;
  std::string quantity;  // "otoc_inf", "order_parameter", ...
  std::string state;     // "beta=0", "beta=1", "ground"
  double eta = 0.0;
  int atoms = 1;
  double gamma = 0.0;
  double beta = 0.0;
  int cutoff = 0;
  double t_f = 0.0;
  double dt = 0.0;
  double g_c = 0.0;
};

struct ScanResult {
  CouplingGrid grid;
  std::vector<double> values;
  ScanMeta meta;
  // Ground-state degeneracy flags (equilibrium and ground-state scans only).
  std::vector<bool> degenerate;
  std::vector<double> seconds;
};

// Everything needed to turn one g/g_c value into a time-averaged correlator.
struct OtocScanSpec {
  ModelKind model = ModelKind::rabi;
  ModelParams base;  // g is overwritten per grid point
  AverageKind kind = AverageKind::otoc_inf;
  TimeGrid time{0.0, 500.0, 0.1};
  double beta = 0.0;
  bool normalize = true;
  bool use_parity = true;
};

struct PointValue {
  double value = 0.0;
  bool degenerate = false;
};

// Full correlator time series at g = ratio * g_c. For the equilibrium kind the
// ground-state degeneracy flag is stored through `degenerate` when given.
TimeSeries correlator_series(const OtocScanSpec& spec, double ratio, EvalOptions opts = {},
                             bool* degenerate = nullptr);

// Time-averaged correlator at g = ratio * g_c.
PointValue averaged_correlator(const OtocScanSpec& spec, double ratio);

// Scan points run in parallel across `threads`; results are assembled in grid
// order and do not depend on the thread count. Errors name the failing point.
ScanResult scan_otoc(const OtocScanSpec& spec, const CouplingGrid& grid, unsigned threads = 1);

struct OrderScanSpec {
  ModelKind model = ModelKind::rabi;
  ModelParams base;
  std::optional<double> beta;  // empty: ground state
  bool rescale_by_cutoff = false;
  bool use_parity = true;
};

// <a^dag a> in the ground state or the thermal state at g = ratio * g_c.
PointValue order_parameter(const OrderScanSpec& spec, double ratio);
ScanResult scan_order_parameter(const OrderScanSpec& spec, const CouplingGrid& grid, unsigned threads = 1);

struct SusceptibilityCurve {
  CouplingGrid grid;  // interior points
  std::vector<double> values;
  double g_c = 0.0;
};

// Central differences of the scan values with respect to the absolute
// coupling g = ratio * g_c. Requires >= 3 uniformly spaced points.
SusceptibilityCurve susceptibility(const ScanResult& scan);

enum class ExtremumKind { min, max };

struct ExtremumLocation {
  double ratio_m = 0.0;
  double value_at_m = 0.0;
  bool refined = false;
  bool on_boundary = false;
};

// Grid arg-extremum inside [range.first, range.second]; optional parabola
// refinement through the extremum and its neighbours.
ExtremumLocation locate_extremum(const std::vector<double>& ratios, const std::vector<double>& values,
                                 ExtremumKind kind, std::pair<double, double> range, bool refine);

// Staged minimum search: a coarse grid, then successively finer local grids
// around the running minimum.
struct MinimumSearch {
  double coarse_lo = 0.9;
  double coarse_hi = 1.2;
  double coarse_step = 0.01;
  double fine_step = 0.002;
  double fine_halfwidth = 0.03;
  // Extra stages after the fine one; each divides the step by 5 and searches
  // +-5 of the new steps around the current minimum.
  int zoom_stages = 0;
  bool refine = true;
  // Take the lowest interior local minimum of each stage when the plain
  // minimum sits on the stage boundary (a curve that keeps falling past the
  // critical dip would otherwise drag the search to the window edge).
  bool prefer_interior = true;
};

struct SearchResult {
  ExtremumLocation location;
  std::vector<double> ratios;  // every evaluated point, sorted
  std::vector<double> values;
};

using PointFunction = std::function<double(double ratio)>;

SearchResult search_minimum(const PointFunction& f, const MinimumSearch& search, unsigned threads = 1,
                            ExtremumKind kind = ExtremumKind::min);

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;  // base-2
  double r_squared = 0.0;
  std::size_t points = 0;
};

// Least squares of log2(ratio_m - 1) against log2(x); slope = -exponent.
PowerLawFit fit_scaling_eta(const std::vector<std::pair<double, double>>& eta_ratio);
PowerLawFit fit_scaling_gamma(const std::vector<std::pair<double, double>>& gamma_ratio);

// Ordinary least squares y = slope * x + intercept with r^2.
PowerLawFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct SizeFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double residual = 0.0;  // RMS misfit
};

// 1 - F = a N^-b + c: outer search over b in [0, 5], inner linear solve.
SizeFit fit_size_law(const std::vector<std::pair<double, double>>& n_value);

struct CutoffRow {
  int cutoff = 0;
  std::vector<double> raw;  // one per probe time
};

struct CutoffStudy {
  std::vector<double> probes;
  std::vector<CutoffRow> rows;
  std::vector<PowerLawFit> fits;  // natural-log slope of F against n, per probe
};

// Raw infinite-temperature OTOC at the probe times for each cutoff.
CutoffStudy cutoff_study(const OtocScanSpec& spec, double ratio, const std::vector<double>& probes,
                         const std::vector<int>& cutoffs, unsigned threads = 1);

struct DriftRow {
  double beta = 0.0;
  double temperature = 0.0;
  ExtremumLocation susceptibility_max;
  std::optional<ExtremumLocation> otoc_min;
};

// Per beta: thermal order-parameter scan, susceptibility and its maximum.
// When `otoc` is given, the thermal OTOC minimum on the same grid is added.
std::vector<DriftRow> thermal_drift_study(const OrderScanSpec& order, const std::vector<double>& betas,
                                          const CouplingGrid& grid, const OtocScanSpec* otoc = nullptr,
                                          unsigned threads = 1);

}  // namespace otoc
