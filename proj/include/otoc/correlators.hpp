#pragma once

// Out-of-time-order and two-point correlators of W(t) and V(0) under
// infinite-temperature, thermal and pure-state averages, their time averages,
// early-time exponential fits, and exact infinite-time averages used as
// oracles.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "otoc/dynamics.hpp"

namespace otoc {

class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, double dt);

  double t_start() const noexcept { return t_start_; }
  double t_end() const noexcept { return t_end_; }
  double dt() const noexcept { return dt_; }
  // floor((t_end - t_start)/dt) + 1, with a relative slack of 1e-9 so that
  // [0, 500] at dt = 0.1 has 5001 samples.
  std::size_t size() const noexcept { return size_; }
  // Snapped to 12 decimals so that 0.3 is 0.3 rather than 0.30000000000000004.
  double at(std::size_t i) const noexcept {
    return std::round((t_start_ + static_cast<double>(i) * dt_) * 1e12) / 1e12;
  }

 private:
  double t_start_;
  double t_end_;
  double dt_;
  std::size_t size_;
};

enum class CorrelatorKind { otoc_inf_temp, otoc_thermal, otoc_equilibrium, tpc_inf_temp };

std::string to_string(CorrelatorKind kind);

struct TimeSeries {
  TimeGrid grid;
  std::vector<cplx> values;
  // Raw value at t = 0 that `values` were divided by; 1 when not normalized.
  double normalization = 1.0;
  bool normalized = false;
  CorrelatorKind kind = CorrelatorKind::otoc_inf_temp;
  double beta = 0.0;  // meaningful for otoc_thermal only
};

// Controls how many worker threads a single series evaluation may use.
struct EvalOptions {
  unsigned threads = 1;
};

// (1/D) tr[(W(t) V)^2]
TimeSeries otoc_infinite_temperature(const EvolvedFrame& frame, const TimeGrid& grid,
                                     bool normalize, EvalOptions opts = {});

// Raw (1/D) tr[(W(t) V)^2] at arbitrary times.
std::vector<cplx> otoc_infinite_temperature_at(const EvolvedFrame& frame, const std::vector<double>& times);

// sum_a p_a [W(t) V W(t) V]_aa with Boltzmann populations p_a.
TimeSeries otoc_thermal(const EvolvedFrame& frame, const ThermalWeights& weights,
                        const TimeGrid& grid, bool normalize, EvalOptions opts = {});

// <psi| W(t) V W(t) V |psi>; psi given in the eigenbasis of H.
TimeSeries otoc_equilibrium(const EvolvedFrame& frame, const ComplexVector& psi_eig,
                            const TimeGrid& grid, bool normalize, EvalOptions opts = {});

// (1/D) tr[W(t) V]
TimeSeries tpc_infinite_temperature(const EvolvedFrame& frame, const TimeGrid& grid,
                                    bool normalize, EvalOptions opts = {});

// Trapezoidal average of the real parts over the sampled window.
double time_average(const TimeSeries& series);

enum class AverageMode { generic_spectrum, resonance_sum };

// Infinite-time average of the dimension-normalized infinite-temperature
// OTOC. generic_spectrum keeps the index pairings that are stationary for a
// spectrum without accidental gap resonances; resonance_sum enumerates every
// (a,b,c,d) with |E_a - E_b + E_c - E_d| <= freq_tol max|E| and is limited to
// D <= 40.
double otoc_exact_time_average(const EvolvedFrame& frame, AverageMode mode, double freq_tol = 1e-9);

struct ExpFit {
  double lambda_l = 0.0;
  double intercept = 0.0;
  std::pair<double, double> window;
  double r_squared = 0.0;
  std::size_t samples = 0;
};

// Least squares of log Re F(t) against t over samples inside [t_lo, t_hi].
ExpFit fit_exponential_decay(const TimeSeries& series, std::pair<double, double> window);

}  // namespace otoc
