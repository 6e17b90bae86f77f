#include "otoc/correlators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "otoc/errors.hpp"
#include "otoc/parallel.hpp"

namespace otoc {

TimeGrid::TimeGrid(double t_start, double t_end, double dt) : t_start_(t_start), t_end_(t_end), dt_(dt) {
  if (!(std::isfinite(t_start) && std::isfinite(t_end) && std::isfinite(dt))) {
    throw ParameterError("time grid: bounds and step must be finite");
  }
  if (t_start < 0.0) throw ParameterError("time grid: t_start must be >= 0");
  if (!(t_end > t_start)) throw ParameterError("time grid: t_end must exceed t_start");
  if (!(dt > 0.0)) throw ParameterError("time grid: dt must be > 0");
  const double steps = (t_end - t_start) / dt;
  size_ = static_cast<std::size_t>(std::floor(steps * (1.0 + 1e-9) + 1e-9)) + 1;
  if (size_ < 2) throw ParameterError("time grid: fewer than 2 samples (dt too large)");
}

std::string to_string(CorrelatorKind kind) {
  switch (kind) {
    case CorrelatorKind::otoc_inf_temp: return "otoc_inf_temp";
    case CorrelatorKind::otoc_thermal: return "otoc_thermal";
    case CorrelatorKind::otoc_equilibrium: return "otoc_equilibrium";
    case CorrelatorKind::tpc_inf_temp: return "tpc_inf_temp";
  }
  return "unknown";
}

namespace {

// sum_a p_a [(W(t) V)^2]_aa over all sector blocks, where `pop` is indexed
// by eigen-index.
class FourPointKernel {
 public:
  FourPointKernel(const EvolvedFrame& frame, const RealVector& pop) : frame_(frame) {
    for (const auto& b : frame.blocks()) {
      RealVector p(static_cast<Eigen::Index>(b.members.size()));
      for (std::size_t k = 0; k < b.members.size(); ++k) p(k) = pop(b.members[k]);
      pops_.push_back(std::move(p));
    }
  }

  cplx operator()(double t) {
    cplx total = 0.0;
    const auto& blocks = frame_.blocks();
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      total += frame_.is_real() ? eval_real(blocks[k], pops_[k], t) : eval_complex(blocks[k], pops_[k], t);
    }
    return total;
  }

 private:
  cplx eval_real(const SectorBlock& b, const RealVector& p, double t) {
    const Eigen::Index m = b.energies.size();
    c_.resize(m);
    s_.resize(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const double phase = b.energies(a) * t;
      c_(a) = std::cos(phase);
      s_(a) = std::sin(phase);
    }
    // Re/Im of W_ab exp(i(E_a - E_b)t) via cos(x-y), sin(x-y) expansions.
    wc_.noalias() = c_.asDiagonal() * b.w_real * c_.asDiagonal();
    wc_.noalias() += s_.asDiagonal() * b.w_real * s_.asDiagonal();
    ws_.noalias() = s_.asDiagonal() * b.w_real * c_.asDiagonal();
    ws_.noalias() -= c_.asDiagonal() * b.w_real * s_.asDiagonal();
    x_.noalias() = wc_ * b.v_real;
    y_.noalias() = ws_ * b.v_real;
    // sum_ab p_a A_ab A_ba with A = X + iY
    double re = 0.0;
    double im = 0.0;
    for (Eigen::Index col = 0; col < m; ++col) {
      for (Eigen::Index row = 0; row < m; ++row) {
        const double xr = x_(row, col), yr = y_(row, col);
        const double xt = x_(col, row), yt = y_(col, row);
        re += p(row) * (xr * xt - yr * yt);
        im += p(row) * (xr * yt + yr * xt);
      }
    }
    return {re, im};
  }

  cplx eval_complex(const SectorBlock& b, const RealVector& p, double t) {
    const Eigen::Index m = b.energies.size();
    ph_.resize(m);
    for (Eigen::Index a = 0; a < m; ++a) ph_(a) = std::polar(1.0, b.energies(a) * t);
    wt_.noalias() = ph_.asDiagonal() * b.w * ph_.conjugate().asDiagonal();
    a_.noalias() = wt_ * b.v;
    cplx acc = 0.0;
    for (Eigen::Index col = 0; col < m; ++col)
      for (Eigen::Index row = 0; row < m; ++row) acc += p(row) * a_(row, col) * a_(col, row);
    return acc;
  }

  const EvolvedFrame& frame_;
  std::vector<RealVector> pops_;
  RealVector c_, s_;
  RealMatrix wc_, ws_, x_, y_;
  ComplexVector ph_;
  ComplexMatrix wt_, a_;
};

// (1/D) sum_ab W_ab V_ba exp(i(E_a - E_b)t)
class TwoPointKernel {
 public:
  explicit TwoPointKernel(const EvolvedFrame& frame) : frame_(frame) {
    for (const auto& b : frame.blocks()) products_.push_back(b.w.cwiseProduct(b.v.transpose()));
  }

  cplx operator()(double t) {
    cplx total = 0.0;
    const auto& blocks = frame_.blocks();
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const Eigen::Index m = blocks[k].energies.size();
      ph_.resize(m);
      for (Eigen::Index a = 0; a < m; ++a) ph_(a) = std::polar(1.0, blocks[k].energies(a) * t);
      total += ph_.cwiseProduct(products_[k] * ph_.conjugate()).sum();
    }
    return total / static_cast<double>(frame_.dim());
  }

 private:
  const EvolvedFrame& frame_;
  std::vector<ComplexMatrix> products_;
  ComplexVector ph_;
};

// <psi| W(t) V W(t) V |psi> by four matrix-vector products.
class StateKernel {
 public:
  StateKernel(const EvolvedFrame& frame, const ComplexVector& psi) : frame_(frame), psi_(psi) {
    vpsi_ = frame.v_eig() * psi;
  }

  cplx operator()(double t) {
    const RealVector& e = frame_.spectral().eigenvalues;
    ph_.resize(e.size());
    for (Eigen::Index a = 0; a < e.size(); ++a) ph_(a) = std::polar(1.0, e(a) * t);
    u_ = ph_.conjugate().cwiseProduct(vpsi_);
    u_ = ph_.cwiseProduct(frame_.w_eig() * u_);
    u_ = frame_.v_eig() * u_;
    u_ = ph_.conjugate().cwiseProduct(u_);
    u_ = ph_.cwiseProduct(frame_.w_eig() * u_);
    return psi_.dot(u_);
  }

 private:
  const EvolvedFrame& frame_;
  const ComplexVector& psi_;
  ComplexVector vpsi_, ph_, u_;
};

template <class MakeKernel>
TimeSeries sample(const TimeGrid& grid, bool normalize, EvalOptions opts, CorrelatorKind kind,
                  MakeKernel make_kernel) {
  TimeSeries out{grid, std::vector<cplx>(grid.size()), 1.0, false, kind, 0.0};
  parallel_chunks(grid.size(), opts.threads, [&](std::size_t begin, std::size_t end) {
    auto kernel = make_kernel();
    for (std::size_t i = begin; i < end; ++i) out.values[i] = kernel(grid.at(i));
  });
  if (normalize) {
    auto kernel = make_kernel();
    const double f0 = kernel(0.0).real();
    if (!(std::isfinite(f0) && f0 != 0.0)) {
      throw DomainError(to_string(kind) + ": cannot normalize, F(0) = " + std::to_string(f0));
    }
    for (auto& v : out.values) v /= f0;
    out.normalization = f0;
    out.normalized = true;
  }
  return out;
}

}  // namespace

TimeSeries otoc_infinite_temperature(const EvolvedFrame& frame, const TimeGrid& grid, bool normalize,
                                     EvalOptions opts) {
  const RealVector uniform = RealVector::Constant(frame.dim(), 1.0 / static_cast<double>(frame.dim()));
  return sample(grid, normalize, opts, CorrelatorKind::otoc_inf_temp,
                [&] { return FourPointKernel(frame, uniform); });
}

std::vector<cplx> otoc_infinite_temperature_at(const EvolvedFrame& frame, const std::vector<double>& times) {
  const RealVector uniform = RealVector::Constant(frame.dim(), 1.0 / static_cast<double>(frame.dim()));
  FourPointKernel kernel(frame, uniform);
  std::vector<cplx> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(kernel(t));
  return out;
}

TimeSeries otoc_thermal(const EvolvedFrame& frame, const ThermalWeights& weights, const TimeGrid& grid,
                        bool normalize, EvalOptions opts) {
  if (weights.weights.size() != frame.dim()) {
    throw ShapeError("otoc_thermal: " + std::to_string(weights.weights.size()) +
                     " weights for dimension " + std::to_string(frame.dim()));
  }
  auto series = sample(grid, normalize, opts, CorrelatorKind::otoc_thermal,
                       [&] { return FourPointKernel(frame, weights.weights); });
  series.beta = weights.beta;
  return series;
}

TimeSeries otoc_equilibrium(const EvolvedFrame& frame, const ComplexVector& psi_eig, const TimeGrid& grid,
                            bool normalize, EvalOptions opts) {
  if (psi_eig.size() != frame.dim()) {
    throw ShapeError("otoc_equilibrium: state dimension " + std::to_string(psi_eig.size()) +
                     " does not match " + std::to_string(frame.dim()));
  }
  if (std::abs(psi_eig.norm() - 1.0) > 1e-10) {
    throw ParameterError("otoc_equilibrium: state is not normalized (norm " +
                         std::to_string(psi_eig.norm()) + ")");
  }
  return sample(grid, normalize, opts, CorrelatorKind::otoc_equilibrium,
                [&] { return StateKernel(frame, psi_eig); });
}

TimeSeries tpc_infinite_temperature(const EvolvedFrame& frame, const TimeGrid& grid, bool normalize,
                                    EvalOptions opts) {
  return sample(grid, normalize, opts, CorrelatorKind::tpc_inf_temp, [&] { return TwoPointKernel(frame); });
}

double time_average(const TimeSeries& series) {
  const auto& v = series.values;
  if (v.size() < 2) throw ParameterError("time_average: need at least 2 samples");
  double acc = 0.5 * (v.front().real() + v.back().real());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) acc += v[i].real();
  return acc / static_cast<double>(v.size() - 1);
}

double otoc_exact_time_average(const EvolvedFrame& frame, AverageMode mode, double freq_tol) {
  const ComplexMatrix& w = frame.w_eig();
  const ComplexMatrix& v = frame.v_eig();
  const Eigen::Index d = frame.dim();
  cplx acc = 0.0;
  if (mode == AverageMode::generic_spectrum) {
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index c = 0; c < d; ++c) {
        acc += w(a, a) * v(a, c) * w(c, c) * v(c, a);
        acc += w(a, c) * v(c, c) * w(c, a) * v(a, a);
      }
      const cplx diag = w(a, a) * v(a, a);
      acc -= diag * diag;
    }
    return acc.real() / static_cast<double>(d);
  }
  if (d > 40) {
    throw ResourceError("otoc_exact_time_average: resonance_sum is O(D^4) and limited to D <= 40, got " +
                        std::to_string(d));
  }
  const RealVector& e = frame.spectral().eigenvalues;
  const double tol = freq_tol * e.cwiseAbs().maxCoeff();
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index dd = 0; dd < d; ++dd)
          if (std::abs(e(a) - e(b) + e(c) - e(dd)) <= tol) acc += w(a, b) * v(b, c) * w(c, dd) * v(dd, a);
  return acc.real() / static_cast<double>(d);
}

ExpFit fit_exponential_decay(const TimeSeries& series, std::pair<double, double> window) {
  const auto [lo, hi] = window;
  if (!(lo < hi)) throw ParameterError("fit_exponential_decay: window must satisfy t_lo < t_hi");
  const double slack = 1e-9 * series.grid.dt();
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    const double t = series.grid.at(i);
    if (t < lo - slack || t > hi + slack) continue;
    const double y = series.values[i].real();
    if (!(y > 0.0)) {
      std::ostringstream os;
      os << "fit_exponential_decay: non-positive value " << y << " at t = " << t << " inside the window";
      throw DomainError(os.str());
    }
    ts.push_back(t);
    ys.push_back(std::log(y));
  }
  if (ts.size() < 3) throw ParameterError("fit_exponential_decay: window holds fewer than 3 samples");

  const double n = static_cast<double>(ts.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= n;
  my /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    sty += (ts[i] - mt) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sty / stt;
  const double intercept = my - slope * mt;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ys[i] - (intercept + slope * ts[i]);
    ss_res += r * r;
  }
  const double r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return {-slope, intercept, window, r2, ts.size()};
}

}  // namespace otoc
