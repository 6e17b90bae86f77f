#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "otoc/analysis.hpp"
#include "otoc/correlators.hpp"
#include "otoc/errors.hpp"
#include "otoc/models.hpp"
#include "test_support.hpp"

using namespace otoc;
using namespace otoc::testing;

namespace {

// Oracle: W(t) = e^{iHt} W e^{-iHt} by matrix exponentials in the original
// basis, then the full four-operator product.
ComplexMatrix brute_product(const ComplexMatrix& h, const ComplexMatrix& w, const ComplexMatrix& v, double t) {
  const ComplexMatrix u = (cplx(0.0, t) * h).exp();
  const ComplexMatrix wt = u * w * u.adjoint();
  return wt * v * wt * v;
}

ComplexMatrix brute_gibbs(const ComplexMatrix& h, double beta) {
  const double shift = eigh(hermitize(h)).eigenvalues.minCoeff();
  const ComplexMatrix shifted = h - shift * ComplexMatrix::Identity(h.rows(), h.cols());
  const ComplexMatrix rho = (-beta * shifted).exp();
  return rho / rho.trace();
}

ModelParams rabi_params(double Omega, double ratio, int n) {
  ModelParams p;
  p.Omega = Omega;
  p.cutoff = BosonCutoff(n);
  p.g = ratio * p.g_c();
  return p;
}

EvolvedFrame rabi_frame(double Omega, double ratio, int n, bool parity = true) {
  const auto p = rabi_params(Omega, ratio, n);
  const auto num = photon_number(p.cutoff, p.spin);
  const auto labels = parity ? parity_labels(p.cutoff, p.spin) : std::vector<int>{};
  return prepare_frame(build_rabi(p), num, num, labels);
}

EvolvedFrame toy_frame() {
  return prepare_frame(HermitianOperator(pauli_z()), HermitianOperator(pauli_x()), HermitianOperator(pauli_x()));
}

}  // namespace

TEST_CASE("time grid") {
  CHECK(TimeGrid(0.0, 500.0, 0.1).size() == 5001);
  CHECK(TimeGrid(0.0, 1.0, 0.3).size() == 4);
  CHECK_THROWS_AS(TimeGrid(1.0, 1.0, 0.1), ParameterError);
  CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(TimeGrid(-1.0, 1.0, 0.1), ParameterError);
  CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 2.0), ParameterError);
}

TEST_CASE("toy system: sigma_z Hamiltonian with W = V = sigma_x") {
  const auto frame = toy_frame();
  const TimeGrid grid(0.0, 10.0, 0.01);
  const auto f = otoc_infinite_temperature(frame, grid, false);
  const auto tpc = tpc_infinite_temperature(frame, grid, false);
  const auto weights = thermal_weights(frame.spectral(), 0.7);
  const auto thermal = otoc_thermal(frame, weights, grid, false);
  // diagonal of (W(t) V)^2 is (e^{-4it}, e^{4it}) in ascending-energy order
  const double imbalance = weights.weights(0) - weights.weights(1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.at(i);
    CHECK(std::abs(f.values[i] - std::cos(4 * t)) <= 1e-10);
    CHECK(std::abs(tpc.values[i] - std::cos(2 * t)) <= 1e-10);
    CHECK(std::abs(thermal.values[i].real() - std::cos(4 * t)) <= 1e-10);
    CHECK(std::abs(thermal.values[i].imag() + imbalance * std::sin(4 * t)) <= 1e-10);
  }
  CHECK(std::abs(otoc_exact_time_average(frame, AverageMode::generic_spectrum)) <= 1e-15);
  CHECK(std::abs(otoc_exact_time_average(frame, AverageMode::resonance_sum)) <= 1e-15);
}

TEST_CASE("spectral kernels match matrix-exponential oracle") {
  std::mt19937_64 rng(77);
  SUBCASE("complex Hermitian input") {
    const auto h = random_hermitian(7, rng);
    const auto w = random_hermitian(7, rng);
    const auto v = random_hermitian(7, rng);
    const auto frame = prepare_frame(h, w, v);
    REQUIRE_FALSE(frame.is_real());
    const TimeGrid grid(0.0, 3.0, 0.25);
    const auto inf = otoc_infinite_temperature(frame, grid, false);
    const double beta = 0.4;
    const auto thermal = otoc_thermal(frame, thermal_weights(frame.spectral(), beta), grid, false);
    const ComplexMatrix rho = brute_gibbs(h.matrix(), beta);
    ComplexVector psi = random_complex(7, 1, rng);
    psi.normalize();
    const ComplexVector psi_eig = frame.spectral().eigenvectors.adjoint() * psi;
    const auto eq = otoc_equilibrium(frame, psi_eig, grid, false);
    const auto tpc = tpc_infinite_temperature(frame, grid, false);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double t = grid.at(i);
      const ComplexMatrix prod = brute_product(h.matrix(), w.matrix(), v.matrix(), t);
      const double scale = 1.0 + std::abs(prod.trace());
      CHECK(std::abs(inf.values[i] - prod.trace() / 7.0) <= 1e-10 * scale);
      CHECK(std::abs(thermal.values[i] - (rho * prod).trace()) <= 1e-10 * scale);
      CHECK(std::abs(eq.values[i] - psi.dot(prod * psi)) <= 1e-10 * scale);
      const ComplexMatrix u = (cplx(0.0, t) * h.matrix()).exp();
      const cplx f = (u * w.matrix() * u.adjoint() * v.matrix()).trace() / 7.0;
      CHECK(std::abs(tpc.values[i] - f) <= 1e-10 * (1.0 + std::abs(f)));
    }
  }
  SUBCASE("real model with parity sectors") {
    const auto p = rabi_params(16.0, 1.1, 6);
    const auto num = photon_number(p.cutoff, p.spin);
    const auto h = build_rabi(p);
    const auto frame = rabi_frame(16.0, 1.1, 6);
    REQUIRE(frame.is_real());
    REQUIRE(frame.blocks().size() == 2);
    const TimeGrid grid(0.0, 2.0, 0.2);
    const auto inf = otoc_infinite_temperature(frame, grid, false);
    const auto thermal = otoc_thermal(frame, thermal_weights(frame.spectral(), 0.3), grid, false);
    const ComplexMatrix rho = brute_gibbs(h.matrix(), 0.3);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const ComplexMatrix prod = brute_product(h.matrix(), num.matrix(), num.matrix(), grid.at(i));
      CHECK(std::abs(inf.values[i] - prod.trace() / 12.0) <= 1e-9 * std::abs(prod.trace()));
      CHECK(std::abs(thermal.values[i] - (rho * prod).trace()) <= 1e-9 * std::abs((rho * prod).trace()));
    }
  }
}

TEST_CASE("parity blocks do not change the correlators") {
  const auto with = rabi_frame(1024.0, 0.95, 20, true);
  const auto without = rabi_frame(1024.0, 0.95, 20, false);
  CHECK(with.blocks().size() == 2);
  CHECK(without.blocks().size() == 1);
  const TimeGrid grid(0.0, 5.0, 0.5);
  const auto a = otoc_infinite_temperature(with, grid, true);
  const auto b = otoc_infinite_temperature(without, grid, true);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-9);
}

TEST_CASE("Rabi golden values at t = 0") {
  const auto frame = rabi_frame(4.0, 0.7, 4);
  const TimeGrid grid(0.0, 1.0, 0.5);
  const auto raw = otoc_infinite_temperature(frame, grid, false);
  // (2 sum_{k<4} k^4) / 8
  CHECK(raw.values[0].real() == doctest::Approx(24.5).epsilon(1e-12));
  const auto tpc = tpc_infinite_temperature(frame, grid, false);
  // (2 sum_{k<4} k^2) / 8
  CHECK(tpc.values[0].real() == doctest::Approx(3.5).epsilon(1e-12));
  const auto normalized = otoc_infinite_temperature(frame, grid, true);
  CHECK(normalized.normalization == doctest::Approx(24.5).epsilon(1e-12));
}

TEST_CASE("decoupled model: W commutes with H") {
  const auto frame = rabi_frame(64.0, 0.0, 10);
  const TimeGrid grid(0.0, 500.0, 0.1);
  const auto f = otoc_infinite_temperature(frame, grid, true);
  for (const auto& v : f.values) CHECK(std::abs(v - 1.0) <= 1e-12);
  const auto raw = otoc_infinite_temperature(frame, grid, false);
  const double avg = time_average(raw);
  CHECK(avg == doctest::Approx(raw.values[0].real()).epsilon(1e-12));
  CHECK(otoc_exact_time_average(frame, AverageMode::generic_spectrum) ==
        doctest::Approx(raw.values[0].real()).epsilon(1e-12));

  const auto tpc = tpc_infinite_temperature(frame, grid, false);
  // (1/D) sum_k k^2 (N + 1)
  const double expected = 2.0 * 285.0 / 20.0;
  for (std::size_t i = 0; i < grid.size(); i += 500) CHECK(std::abs(tpc.values[i] - expected) <= 1e-11);

  // ground state |0> (x) |down>: photon-number OTOC vanishes identically
  ComplexVector psi = ComplexVector::Zero(frame.dim());
  psi(0) = 1.0;
  const auto eq = otoc_equilibrium(frame, psi, TimeGrid(0.0, 10.0, 0.5), false);
  for (const auto& v : eq.values) CHECK(std::abs(v) == 0.0);
  CHECK_THROWS_AS(otoc_equilibrium(frame, psi, TimeGrid(0.0, 10.0, 0.5), true), DomainError);
}

TEST_CASE("equilibrium OTOC of a Fock state") {
  const auto frame = rabi_frame(8.0, 0.0, 5);
  // |2> (x) |up> in the composite basis, rotated to the eigenbasis
  ComplexVector comp = ComplexVector::Zero(10);
  comp(4) = 1.0;
  const ComplexVector psi = frame.spectral().eigenvectors.adjoint() * comp;
  const auto eq = otoc_equilibrium(frame, psi, TimeGrid(0.0, 1.0, 0.5), false);
  CHECK(eq.values[0].real() == doctest::Approx(16.0).epsilon(1e-12));
  CHECK_THROWS_AS(otoc_equilibrium(frame, 2.0 * psi, TimeGrid(0.0, 1.0, 0.5), false), ParameterError);
}

TEST_CASE("thermal limits") {
  const auto frame = rabi_frame(256.0, 1.05, 12);
  const TimeGrid grid(0.0, 20.0, 0.1);
  const auto inf = otoc_infinite_temperature(frame, grid, false);
  const auto zero_beta = otoc_thermal(frame, thermal_weights(frame.spectral(), 0.0), grid, false);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(inf.values[i] - zero_beta.values[i]) <= 1e-10 * std::abs(inf.values[0]));

  const double emax = frame.spectral().eigenvalues.cwiseAbs().maxCoeff();
  const auto tiny_beta = otoc_thermal(frame, thermal_weights(frame.spectral(), 1e-8 / emax), grid, false);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(inf.values[i] - tiny_beta.values[i]) <= 1e-6 * std::abs(inf.values[0]));

  REQUIRE_FALSE(ground_state_degenerate(frame.spectral()));
  const auto cold = otoc_thermal(frame, thermal_weights(frame.spectral(), 1e6), grid, false);
  ComplexVector psi = ComplexVector::Zero(frame.dim());
  psi(0) = 1.0;
  const auto eq = otoc_equilibrium(frame, psi, grid, false);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(cold.values[i] - eq.values[i]) <= 1e-9 * (1.0 + std::abs(eq.values[i])));
}

TEST_CASE("normalized series") {
  const auto frame = rabi_frame(1024.0, 1.2, 16);
  const TimeGrid grid(0.0, 30.0, 0.1);
  const auto raw = otoc_infinite_temperature(frame, grid, false);
  const auto norm = otoc_infinite_temperature(frame, grid, true);
  CHECK(norm.values[0] == cplx(1.0));
  CHECK(norm.normalized);
  CHECK(norm.normalization == raw.values[0].real());
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(norm.values[i] - raw.values[i] / norm.normalization) <= 1e-12);
}

TEST_CASE("infinite-temperature OTOC is real and bounded by its initial value") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> ratio(0.3, 1.6);
  std::uniform_int_distribution<int> expo(4, 14);
  for (int trial = 0; trial < 12; ++trial) {
    const auto frame = rabi_frame(std::ldexp(1.0, expo(rng)), ratio(rng), 12);
    const auto f = otoc_infinite_temperature(frame, TimeGrid(0.0, 50.0, 0.37), false);
    for (const auto& v : f.values) {
      CHECK(std::abs(v.imag()) <= 1e-8 * (1.0 + std::abs(v.real())));
      CHECK(v.real() <= f.values[0].real() * (1.0 + 1e-8));
    }
  }
  for (int trial = 0; trial < 5; ++trial) {
    const auto h = random_hermitian(9, rng);
    const auto w = random_hermitian(9, rng);
    const auto frame = prepare_frame(h, w, w);
    const auto f = otoc_infinite_temperature(frame, TimeGrid(0.0, 5.0, 0.1), false);
    for (const auto& v : f.values) CHECK(std::abs(v.imag()) <= 1e-8 * (1.0 + std::abs(v.real())));
  }
}

TEST_CASE("time averages") {
  const TimeGrid unit(0.0, 1.0, 0.01);
  TimeSeries ramp{unit, {}, 1.0, false, CorrelatorKind::otoc_inf_temp, 0.0};
  TimeSeries flat = ramp;
  for (std::size_t i = 0; i < unit.size(); ++i) {
    ramp.values.push_back(unit.at(i));
    flat.values.push_back(0.37);
  }
  CHECK(time_average(ramp) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(time_average(flat) == doctest::Approx(0.37).epsilon(1e-15));

  const TimeGrid quarter(0.0, std::numbers::pi / 2, std::numbers::pi / 2000);
  TimeSeries wave{quarter, {}, 1.0, false, CorrelatorKind::otoc_inf_temp, 0.0};
  for (std::size_t i = 0; i < quarter.size(); ++i) wave.values.push_back(std::cos(4 * quarter.at(i)));
  CHECK(std::abs(time_average(wave)) <= 1e-3);

  TimeSeries single{unit, {cplx(1.0)}, 1.0, false, CorrelatorKind::otoc_inf_temp, 0.0};
  CHECK_THROWS_AS(time_average(single), ParameterError);
}

TEST_CASE("exact infinite-time averages") {
  SUBCASE("operator diagonal in the eigenbasis has no dynamics") {
    const HermitianOperator w(diag({1, -2, 0.5, 3}));
    const auto frame = prepare_frame(HermitianOperator(diag({0.1, 0.7, 1.9, 4.2})), w, w);
    const double f0 = otoc_infinite_temperature_at(frame, {0.0})[0].real();
    CHECK(otoc_exact_time_average(frame, AverageMode::generic_spectrum) == doctest::Approx(f0));
    CHECK(otoc_exact_time_average(frame, AverageMode::resonance_sum) == doctest::Approx(f0));
  }
  SUBCASE("random 8-dim systems: the two modes agree and the windowed mean converges") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 4; ++trial) {
      const auto h = random_hermitian(8, rng);
      const auto w = random_hermitian(8, rng);
      const auto frame = prepare_frame(h, w, w);
      const double generic = otoc_exact_time_average(frame, AverageMode::generic_spectrum);
      const double resonant = otoc_exact_time_average(frame, AverageMode::resonance_sum);
      CHECK(std::abs(generic - resonant) <= 1e-8 * (1.0 + std::abs(generic)));
      if (trial == 0) {
        const double windowed = time_average(otoc_infinite_temperature(frame, TimeGrid(0.0, 1e4, 0.05), false));
        CHECK(std::abs(windowed - generic) <= 0.02 * std::abs(generic));
      }
    }
  }
  SUBCASE("resonance sum is limited to small systems") {
    const auto frame = rabi_frame(16.0, 1.0, 21);
    CHECK_THROWS_AS(otoc_exact_time_average(frame, AverageMode::resonance_sum), ResourceError);
  }
}

TEST_CASE("exponential decay fits") {
  const TimeGrid grid(0.0, 2.0, 0.01);
  TimeSeries s{grid, {}, 1.0, false, CorrelatorKind::otoc_inf_temp, 0.0};
  TimeSeries s3 = s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    s.values.push_back(std::exp(-0.5 * grid.at(i)));
    s3.values.push_back(3.0 * std::exp(-2.0 * grid.at(i)));
  }
  const auto fit = fit_exponential_decay(s, {0.3, 0.6});
  CHECK(fit.lambda_l == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(fit.r_squared - 1.0) <= 1e-10);
  CHECK(fit.samples == 31);
  const auto fit3 = fit_exponential_decay(s3, {0.1, 0.4});
  CHECK(fit3.lambda_l == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fit3.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));

  TimeSeries bad = s;
  bad.values[40] = -1.0;
  CHECK_THROWS_AS(fit_exponential_decay(bad, {0.3, 0.6}), DomainError);
  CHECK_THROWS_AS(fit_exponential_decay(s, {0.3, 0.31}), ParameterError);
  CHECK_THROWS_AS(fit_exponential_decay(s, {0.6, 0.3}), ParameterError);
}

TEST_CASE("series evaluation is independent of the thread count") {
  const auto frame = rabi_frame(4096.0, 0.9, 20);
  const TimeGrid grid(0.0, 40.0, 0.1);
  const auto one = otoc_infinite_temperature(frame, grid, true, {1});
  const auto four = otoc_infinite_temperature(frame, grid, true, {4});
  CHECK(one.values == four.values);
}
