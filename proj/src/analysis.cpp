#include "otoc/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "otoc/errors.hpp"
#include "otoc/parallel.hpp"

namespace otoc {

CouplingGrid::CouplingGrid(std::vector<double> ratios) : ratios_(std::move(ratios)) {
  if (ratios_.empty()) throw ParameterError("coupling grid is empty");
  for (std::size_t i = 0; i < ratios_.size(); ++i) {
    if (!(std::isfinite(ratios_[i]) && ratios_[i] >= 0.0)) {
      throw ParameterError("coupling grid: ratios must be finite and >= 0");
    }
    if (i > 0 && !(ratios_[i] - ratios_[i - 1] >= 1e-6)) {
      throw ParameterError("coupling grid: ratios must increase by at least 1e-6");
    }
  }
}

CouplingGrid CouplingGrid::range(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw ParameterError("coupling grid: need step > 0 and hi >= lo");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> r(count);
  // lo + i*step rather than repeated addition, snapped to 12 decimals so that
  // 0.85 prints as 0.85.
  for (std::size_t i = 0; i < count; ++i) r[i] = std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12;
  return CouplingGrid(std::move(r));
}

std::string to_string(AverageKind kind) {
  switch (kind) {
    case AverageKind::otoc_inf: return "otoc-inf";
    case AverageKind::otoc_thermal: return "otoc-thermal";
    case AverageKind::otoc_equilibrium: return "otoc-eq";
    case AverageKind::tpc_inf: return "tpc";
  }
  return "unknown";
}

AverageKind parse_average_kind(const std::string& text) {
  if (text == "otoc-inf") return AverageKind::otoc_inf;
  if (text == "otoc-thermal") return AverageKind::otoc_thermal;
  if (text == "otoc-eq") return AverageKind::otoc_equilibrium;
  if (text == "tpc") return AverageKind::tpc_inf;
  throw ParameterError("unknown correlator kind '" + text + "' (expected otoc-inf, otoc-thermal, otoc-eq or tpc)");
}

namespace {

ModelParams at_ratio(ModelParams params, double ratio) {
  params.g = ratio * params.g_c();
  return params;
}

std::vector<int> sector_labels(const ModelParams& p, bool use_parity) {
  return use_parity ? parity_labels(p.cutoff, p.spin) : std::vector<int>{};
}

std::string point_context(double ratio) {
  std::ostringstream os;
  os.precision(17);
  os << "at g/g_c = " << ratio << ": ";
  return os.str();
}

// Re-throws library errors with the failing grid point prepended.
template <class F>
auto annotate(double ratio, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const NumericalError& e) {
    throw NumericalError(point_context(ratio) + e.what());
  } catch (const DomainError& e) {
    throw DomainError(point_context(ratio) + e.what());
  } catch (const ParameterError& e) {
    throw ParameterError(point_context(ratio) + e.what());
  }
}

std::string state_tag(AverageKind kind, double beta) {
  std::ostringstream os;
  switch (kind) {
    case AverageKind::otoc_inf:
    case AverageKind::tpc_inf: return "beta=0";
    case AverageKind::otoc_equilibrium: return "ground";
    case AverageKind::otoc_thermal: os << "beta=" << beta; return os.str();
  }
  return "";
}

ScanMeta base_meta(ModelKind model, const ModelParams& p) {
  ScanMeta m;
  m.model = model;
  m.eta = p.eta();
  m.atoms = p.spin.atoms();
  m.gamma = p.gamma();
  m.cutoff = p.cutoff.n();
  m.g_c = p.g_c();
  return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TimeSeries correlator_series(const OtocScanSpec& spec, double ratio, EvalOptions opts, bool* degenerate) {
  return annotate(ratio, [&] {
    const ModelParams params = at_ratio(spec.base, ratio);
    const HermitianOperator h = build_hamiltonian(spec.model, params);
    const HermitianOperator n = photon_number(params.cutoff, params.spin);
    const auto labels = sector_labels(params, spec.use_parity);
    const EvolvedFrame frame = prepare_frame(h, n, n, labels);
    switch (spec.kind) {
      case AverageKind::otoc_inf:
        return otoc_infinite_temperature(frame, spec.time, spec.normalize, opts);
      case AverageKind::otoc_thermal:
        return otoc_thermal(frame, thermal_weights(frame.spectral(), spec.beta), spec.time, spec.normalize, opts);
      case AverageKind::otoc_equilibrium: {
        ComplexVector psi = ComplexVector::Zero(frame.dim());
        psi(0) = 1.0;  // ground state in the eigenbasis
        if (degenerate) *degenerate = ground_state_degenerate(frame.spectral());
        return otoc_equilibrium(frame, psi, spec.time, spec.normalize, opts);
      }
      case AverageKind::tpc_inf:
        break;
    }
    return tpc_infinite_temperature(frame, spec.time, spec.normalize, opts);
  });
}

PointValue averaged_correlator(const OtocScanSpec& spec, double ratio) {
  PointValue out;
  const TimeSeries series = correlator_series(spec, ratio, {}, &out.degenerate);
  out.value = time_average(series);
  return out;
}

ScanResult scan_otoc(const OtocScanSpec& spec, const CouplingGrid& grid, unsigned threads) {
  ScanResult out{grid, std::vector<double>(grid.size()), base_meta(spec.model, spec.base),
                 std::vector<bool>(grid.size()), std::vector<double>(grid.size())};
  out.meta.quantity = to_string(spec.kind);
  out.meta.state = state_tag(spec.kind, spec.beta);
  out.meta.beta = spec.kind == AverageKind::otoc_thermal ? spec.beta : 0.0;
  out.meta.t_f = spec.time.at(spec.time.size() - 1);
  out.meta.dt = spec.time.dt();
  std::vector<PointValue> values(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    values[i] = averaged_correlator(spec, grid.ratios()[i]);
    out.seconds[i] = seconds_since(t0);
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.values[i] = values[i].value;
    out.degenerate[i] = values[i].degenerate;
  }
  return out;
}

PointValue order_parameter(const OrderScanSpec& spec, double ratio) {
  return annotate(ratio, [&] {
    const ModelParams params = at_ratio(spec.base, ratio);
    const HermitianOperator h = build_hamiltonian(spec.model, params);
    const HermitianOperator n = photon_number(params.cutoff, params.spin);
    const auto labels = sector_labels(params, spec.use_parity);
    const SpectralDecomposition sd = labels.empty() ? eigh(h) : eigh(h, labels);
    PointValue out;
    if (spec.beta) {
      const ComplexMatrix n_eig = sd.eigenvectors.adjoint() * n.matrix() * sd.eigenvectors;
      out.value = thermal_expectation(n_eig, thermal_weights(sd, *spec.beta));
    } else {
      out.value = expectation(n.matrix(), ground_state(sd));
      out.degenerate = ground_state_degenerate(sd);
    }
    if (spec.rescale_by_cutoff) out.value /= params.cutoff.n();
    return out;
  });
}

ScanResult scan_order_parameter(const OrderScanSpec& spec, const CouplingGrid& grid, unsigned threads) {
  ScanResult out{grid, std::vector<double>(grid.size()), base_meta(spec.model, spec.base),
                 std::vector<bool>(grid.size()), std::vector<double>(grid.size())};
  out.meta.quantity = spec.rescale_by_cutoff ? "order_parameter_per_n" : "order_parameter";
  if (spec.beta) {
    std::ostringstream os;
    os << "beta=" << *spec.beta;
    out.meta.state = os.str();
    out.meta.beta = *spec.beta;
  } else {
    out.meta.state = "ground";
  }
  std::vector<PointValue> values(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    values[i] = order_parameter(spec, grid.ratios()[i]);
    out.seconds[i] = seconds_since(t0);
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.values[i] = values[i].value;
    out.degenerate[i] = values[i].degenerate;
  }
  return out;
}

SusceptibilityCurve susceptibility(const ScanResult& scan) {
  const auto& r = scan.grid.ratios();
  if (r.size() < 3) throw ParameterError("susceptibility: need at least 3 grid points");
  if (scan.values.size() != r.size()) throw ShapeError("susceptibility: values and grid differ in length");
  const double h = r[1] - r[0];
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (std::abs((r[i] - r[i - 1]) - h) > 1e-9) {
      throw ParameterError("susceptibility: grid is not uniformly spaced");
    }
  }
  const double g_c = scan.meta.g_c;
  std::vector<double> interior, dv;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    interior.push_back(r[i]);
    dv.push_back((scan.values[i + 1] - scan.values[i - 1]) / ((r[i + 1] - r[i - 1]) * g_c));
  }
  return {CouplingGrid(std::move(interior)), std::move(dv), g_c};
}

ExtremumLocation locate_extremum(const std::vector<double>& ratios, const std::vector<double>& values,
                                 ExtremumKind kind, std::pair<double, double> range, bool refine) {
  if (ratios.size() != values.size()) throw ShapeError("locate_extremum: ratios and values differ in length");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] >= range.first - 1e-12 && ratios[i] <= range.second + 1e-12) idx.push_back(i);
  }
  if (idx.size() < 3) throw ParameterError("locate_extremum: fewer than 3 grid points inside the search range");
  const double sign = kind == ExtremumKind::min ? 1.0 : -1.0;
  std::size_t best = 0;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    if (sign * values[idx[k]] < sign * values[idx[best]]) best = k;
  }
  ExtremumLocation out{ratios[idx[best]], values[idx[best]], false, best == 0 || best + 1 == idx.size()};
  if (refine && !out.on_boundary) {
    const double x1 = ratios[idx[best - 1]], x2 = ratios[idx[best]], x3 = ratios[idx[best + 1]];
    const double v1 = values[idx[best - 1]], v2 = values[idx[best]], v3 = values[idx[best + 1]];
    const double num = (x2 - x1) * (x2 - x1) * (v2 - v3) - (x2 - x3) * (x2 - x3) * (v2 - v1);
    const double den = (x2 - x1) * (v2 - v3) - (x2 - x3) * (v2 - v1);
    if (den != 0.0) {
      const double xv = std::clamp(x2 - 0.5 * num / den, x1, x3);
      // Lagrange form of the parabola through the three points.
      const double l1 = (xv - x2) * (xv - x3) / ((x1 - x2) * (x1 - x3));
      const double l2 = (xv - x1) * (xv - x3) / ((x2 - x1) * (x2 - x3));
      const double l3 = (xv - x1) * (xv - x2) / ((x3 - x1) * (x3 - x2));
      out.ratio_m = xv;
      out.value_at_m = l1 * v1 + l2 * v2 + l3 * v3;
      out.refined = true;
    }
  }
  return out;
}

namespace {

// Lowest interior local extremum of a sampled curve; falls back to the plain
// arg-extremum (which then lies on the boundary) when there is none.
ExtremumLocation pick_extremum(const std::vector<double>& pts, const std::vector<double>& vals, ExtremumKind kind,
                               bool prefer_interior) {
  ExtremumLocation loc = locate_extremum(pts, vals, kind, {pts.front(), pts.back()}, false);
  if (!prefer_interior || !loc.on_boundary) return loc;
  const double sign = kind == ExtremumKind::min ? 1.0 : -1.0;
  std::size_t best = 0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const bool local = sign * vals[i] < sign * vals[i - 1] && sign * vals[i] <= sign * vals[i + 1];
    if (local && (best == 0 || sign * vals[i] < sign * vals[best])) best = i;
  }
  if (best != 0) loc = {pts[best], vals[best], false, false};
  return loc;
}

}  // namespace

SearchResult search_minimum(const PointFunction& f, const MinimumSearch& search, unsigned threads,
                            ExtremumKind kind) {
  if (!(search.coarse_step > 0.0 && search.fine_step > 0.0 && search.coarse_hi > search.coarse_lo)) {
    throw ParameterError("search_minimum: invalid coarse/fine grid");
  }
  // Keyed on a rounded ratio so revisited points are not recomputed.
  std::map<long long, std::pair<double, double>> cache;
  auto key = [](double r) { return std::llround(r * 1e12); };

  auto evaluate = [&](const std::vector<double>& pts) {
    std::vector<double> todo;
    for (double r : pts)
      if (!cache.count(key(r))) todo.push_back(r);
    std::vector<double> vals(todo.size());
    parallel_for(todo.size(), threads, [&](std::size_t i) { vals[i] = f(todo[i]); });
    for (std::size_t i = 0; i < todo.size(); ++i) cache[key(todo[i])] = {todo[i], vals[i]};
    std::vector<double> out;
    for (double r : pts) out.push_back(cache.at(key(r)).second);
    return out;
  };
  auto local_grid = [&](double center, double step, long half) {
    std::vector<double> pts;
    for (long k = -half; k <= half; ++k) {
      const double r = center + static_cast<double>(k) * step;
      if (r >= search.coarse_lo - 1e-12 && r <= search.coarse_hi + 1e-12 && r >= 0.0) pts.push_back(r);
    }
    return pts;
  };

  std::vector<double> pts = CouplingGrid::range(search.coarse_lo, search.coarse_hi, search.coarse_step).ratios();
  std::vector<double> vals = evaluate(pts);
  ExtremumLocation loc = pick_extremum(pts, vals, kind, search.prefer_interior);

  const int stages = 1 + std::max(0, search.zoom_stages);
  double step = search.fine_step;
  long half = std::lround(search.fine_halfwidth / search.fine_step);
  for (int s = 0; s < stages && !loc.on_boundary; ++s) {
    pts = local_grid(loc.ratio_m, step, half);
    vals = evaluate(pts);
    loc = pick_extremum(pts, vals, kind, search.prefer_interior);
    // A boundary hit on a local grid clipped by the coarse range is genuine;
    // otherwise it means the local window missed the extremum.
    if (s + 1 < stages) {
      step /= 5.0;
      half = 5;
    }
  }
  if (search.refine && !loc.on_boundary) {
    // Parabola through the chosen point and its two neighbours.
    const auto it = std::find(pts.begin(), pts.end(), loc.ratio_m);
    const auto i = static_cast<std::size_t>(it - pts.begin());
    loc = locate_extremum({pts[i - 1], pts[i], pts[i + 1]}, {vals[i - 1], vals[i], vals[i + 1]}, kind,
                          {pts[i - 1], pts[i + 1]}, true);
  }

  SearchResult out;
  out.location = loc;
  for (const auto& [k, rv] : cache) {
    out.ratios.push_back(rv.first);
    out.values.push_back(rv.second);
  }
  return out;
}

PowerLawFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("fit_line: x and y differ in length");
  if (x.size() < 3) throw ParameterError("fit_line: need at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("fit_line: all abscissae are equal");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss_res += r * r;
  }
  const double r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return {slope, intercept, r2, x.size()};
}

namespace {

PowerLawFit fit_shift_scaling(const std::vector<std::pair<double, double>>& pts, const char* what) {
  if (pts.size() < 3) throw ParameterError(std::string(what) + ": need at least 3 points");
  std::vector<double> x, y;
  for (const auto& [param, ratio_m] : pts) {
    if (!(param > 0.0)) throw DomainError(std::string(what) + ": scaling parameter must be positive");
    if (!(ratio_m > 1.0)) {
      std::ostringstream os;
      os.precision(17);
      os << what << ": g_m/g_c = " << ratio_m << " at " << param
         << " is not above 1 (minimum not resolved; refine the grid)";
      throw DomainError(os.str());
    }
    x.push_back(std::log2(param));
    y.push_back(std::log2(ratio_m - 1.0));
  }
  return fit_line(x, y);
}

}  // namespace

PowerLawFit fit_scaling_eta(const std::vector<std::pair<double, double>>& eta_ratio) {
  return fit_shift_scaling(eta_ratio, "fit_scaling_eta");
}

PowerLawFit fit_scaling_gamma(const std::vector<std::pair<double, double>>& gamma_ratio) {
  return fit_shift_scaling(gamma_ratio, "fit_scaling_gamma");
}

namespace {

struct LinearSolve {
  double a, c, rms;
};

LinearSolve size_law_at(const std::vector<double>& n, const std::vector<double>& v, double b) {
  const double m = static_cast<double>(n.size());
  std::vector<double> x(n.size());
  double mx = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    x[i] = std::pow(n[i], -b);
    mx += x[i];
    mv += v[i];
  }
  mx /= m;
  mv /= m;
  double sxx = 0.0, sxv = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxv += (x[i] - mx) * (v[i] - mv);
  }
  // b = 0 makes every N^-b equal; only the constant is identifiable there.
  const double a = sxx > 0.0 ? sxv / sxx : 0.0;
  const double c = mv - a * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double r = v[i] - a * x[i] - c;
    ss += r * r;
  }
  return {a, c, std::sqrt(ss / m)};
}

}  // namespace

SizeFit fit_size_law(const std::vector<std::pair<double, double>>& n_value) {
  if (n_value.size() < 4) throw ParameterError("fit_size_law: need at least 4 points");
  std::vector<double> n, v;
  for (std::size_t i = 0; i < n_value.size(); ++i) {
    const auto [ni, vi] = n_value[i];
    if (!(ni > 0.0)) throw ParameterError("fit_size_law: N must be positive");
    if (i > 0 && !(ni > n_value[i - 1].first)) throw ParameterError("fit_size_law: N must be strictly increasing");
    if (!(vi > 0.0 && vi < 1.0)) throw DomainError("fit_size_law: values must lie in (0, 1)");
    n.push_back(ni);
    v.push_back(vi);
  }
  if (n.front() == n.back()) throw FitError("fit_size_law: degenerate design (all N equal)");

  constexpr double kBMax = 5.0;
  constexpr double kStep = 1e-3;
  const double tie = 1e-14 * (1.0 + std::abs(v.front()));
  double best_b = 0.0;
  LinearSolve best = size_law_at(n, v, 0.0);
  const int steps = static_cast<int>(std::lround(kBMax / kStep));
  for (int k = 1; k <= steps; ++k) {
    const double b = k * kStep;
    const LinearSolve s = size_law_at(n, v, b);
    if (s.rms < best.rms - tie) {
      best = s;
      best_b = b;
    }
  }
  // Golden-section polish of the RMS misfit inside the neighbouring cells.
  if (best.rms > tie) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = std::max(0.0, best_b - kStep), hi = std::min(kBMax, best_b + kStep);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = size_law_at(n, v, x1).rms, f2 = size_law_at(n, v, x2).rms;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = size_law_at(n, v, x1).rms;
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = size_law_at(n, v, x2).rms;
      }
    }
    const double b = 0.5 * (lo + hi);
    const LinearSolve s = size_law_at(n, v, b);
    if (s.rms < best.rms) {
      best = s;
      best_b = b;
    }
  }
  return {best.a, best_b, best.c, best.rms};
}

CutoffStudy cutoff_study(const OtocScanSpec& spec, double ratio, const std::vector<double>& probes,
                         const std::vector<int>& cutoffs, unsigned threads) {
  if (cutoffs.size() < 3) throw ParameterError("cutoff_study: need at least 3 cutoffs");
  if (probes.empty()) throw ParameterError("cutoff_study: need at least one probe time");
  CutoffStudy out;
  out.probes = probes;
  out.rows.resize(cutoffs.size());
  parallel_for(cutoffs.size(), threads, [&](std::size_t i) {
    ModelParams params = spec.base;
    params.cutoff = BosonCutoff(cutoffs[i]);
    params = at_ratio(params, ratio);
    const HermitianOperator h = build_hamiltonian(spec.model, params);
    const HermitianOperator n = photon_number(params.cutoff, params.spin);
    const auto labels = sector_labels(params, spec.use_parity);
    const EvolvedFrame frame = prepare_frame(h, n, n, labels);
    const auto raw = otoc_infinite_temperature_at(frame, probes);
    out.rows[i].cutoff = cutoffs[i];
    for (const auto& z : raw) out.rows[i].raw.push_back(z.real());
  });
  for (std::size_t p = 0; p < probes.size(); ++p) {
    std::vector<double> x, y;
    for (const auto& row : out.rows) {
      if (!(row.raw[p] > 0.0)) throw DomainError("cutoff_study: non-positive raw OTOC, cannot take logs");
      x.push_back(std::log(static_cast<double>(row.cutoff)));
      y.push_back(std::log(row.raw[p]));
    }
    out.fits.push_back(fit_line(x, y));
  }
  return out;
}

std::vector<DriftRow> thermal_drift_study(const OrderScanSpec& order, const std::vector<double>& betas,
                                          const CouplingGrid& grid, const OtocScanSpec* otoc, unsigned threads) {
  std::vector<DriftRow> rows;
  for (double beta : betas) {
    if (!(beta > 0.0)) throw ParameterError("thermal_drift_study: beta values must be positive");
    OrderScanSpec spec = order;
    spec.beta = beta;
    const ScanResult scan = scan_order_parameter(spec, grid, threads);
    const SusceptibilityCurve chi = susceptibility(scan);
    DriftRow row;
    row.beta = beta;
    row.temperature = 1.0 / beta;
    row.susceptibility_max = locate_extremum(chi.grid.ratios(), chi.values, ExtremumKind::max,
                                             {chi.grid.front(), chi.grid.back()}, false);
    if (otoc) {
      OtocScanSpec ospec = *otoc;
      ospec.kind = AverageKind::otoc_thermal;
      ospec.beta = beta;
      const ScanResult oscan = scan_otoc(ospec, grid, threads);
      row.otoc_min = locate_extremum(grid.ratios(), oscan.values, ExtremumKind::min,
                                     {grid.front(), grid.back()}, false);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace otoc
