#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "otoc/dynamics.hpp"
#include "otoc/errors.hpp"
#include "otoc/models.hpp"
#include "test_support.hpp"

using namespace otoc;
using namespace otoc::testing;

namespace {

ModelParams params(double omega0, double Omega, double g, int n, int atoms) {
  ModelParams p;
  p.omega0 = omega0;
  p.Omega = Omega;
  p.g = g;
  p.cutoff = BosonCutoff(n);
  p.spin = SpinLength(atoms);
  return p;
}

double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b) { return max_abs(a * b - b * a); }

}  // namespace

TEST_CASE("critical coupling and derived parameters") {
  CHECK(critical_coupling(params(1, 1, 0, 2, 1)) == 0.5);
  CHECK(critical_coupling(params(1, 4, 0, 2, 1)) == 1.0);
  CHECK(critical_coupling(params(1, std::ldexp(1.0, 20), 0, 2, 1)) == 512.0);
  const auto p = params(1, 1024, 3, 10, 4);
  CHECK(p.eta() == 1024.0);
  CHECK(p.gamma() == 4096.0);
  CHECK(p.g_c() == 16.0);
  auto bad = p;
  bad.Omega = 0.0;
  CHECK_THROWS_AS(critical_coupling(bad), ParameterError);
}

TEST_CASE("decoupled Rabi spectrum") {
  const auto h = build_rabi(params(1, 4, 0, 2, 1));
  const auto sd = eigh(h);
  const double expected[] = {-2, -1, 2, 3};
  for (int i = 0; i < 4; ++i) CHECK(sd.eigenvalues(i) == doctest::Approx(expected[i]).epsilon(1e-14));
  const auto n = photon_number(BosonCutoff(2), SpinLength(1));
  CHECK(commutator_norm(h.matrix(), n.matrix()) == 0.0);
}

TEST_CASE("Rabi requires a single atom") {
  CHECK_THROWS_AS(build_rabi(params(1, 4, 0.1, 4, 2)), ParameterError);
  auto p = params(1, 4, 0.1, 4, 1);
  p.g = -1.0;
  CHECK_THROWS_AS(build_rabi(p), ParameterError);
}

TEST_CASE("decoupled Dicke spectrum") {
  const auto sd = eigh(build_dicke(params(1, 3, 0, 2, 2)));
  const double expected[] = {-3, -2, 0, 1, 3, 4};
  for (int i = 0; i < 6; ++i) CHECK(sd.eigenvalues(i) == doctest::Approx(expected[i]).epsilon(1e-14));
}

TEST_CASE("Dicke with one atom is the Rabi model") {
  for (double g : {0.0, 0.3, 1.7, 40.0}) {
    const auto p = params(1, 64, g, 12, 1);
    const auto rabi = build_rabi(p);
    const auto dicke = build_dicke(p);
    CHECK(max_diff(rabi.matrix(), dicke.matrix()) <= 1e-12 * max_abs(rabi.matrix()));
    const auto er = eigh(rabi).eigenvalues;
    const auto ed = eigh(dicke).eigenvalues;
    CHECK((er - ed).cwiseAbs().maxCoeff() <= 1e-10 * er.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("Hamiltonians are Hermitian for any parameters") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int atoms = 1 + trial % 4;
    const auto p = params(1.0, std::ldexp(1.0, 4 + trial), u(rng) * std::sqrt(std::ldexp(1.0, 4 + trial)) / 2, 10, atoms);
    const auto h = build_dicke(p);
    CHECK(hermiticity_defect(h.matrix()) <= 1e-12 * max_abs(h.matrix()));
    CHECK(h.is_real());
  }
}

TEST_CASE("parity operator") {
  const auto p = build_parity(BosonCutoff(2), SpinLength(1));
  CHECK(max_diff(p.matrix(), diag({-1, 1, 1, -1})) == 0.0);
  const auto p3 = build_parity(BosonCutoff(7), SpinLength(3));
  CHECK(max_diff(p3.matrix() * p3.matrix(), ComplexMatrix::Identity(28, 28)) == 0.0);
}

TEST_CASE("both Hamiltonians conserve parity across the coupling grid") {
  for (int atoms : {1, 2, 3}) {
    for (double r = 0.5; r <= 1.5 + 1e-9; r += 0.1) {
      const auto p0 = params(1, 1 << 12, 0, 20, atoms);
      auto p = p0;
      p.g = r * p0.g_c();
      const auto h = atoms == 1 ? build_rabi(p) : build_dicke(p);
      const auto pi = build_parity(p.cutoff, p.spin);
      CHECK(commutator_norm(h.matrix(), pi.matrix()) <= 1e-10 * max_abs(h.matrix()));
    }
  }
}

TEST_CASE("adding omega0 times identity shifts the spectrum") {
  const auto p = params(1, 16, 1.5, 15, 2);
  const auto h = build_dicke(p);
  const auto shifted = hermitize(h.matrix() + p.omega0 * ComplexMatrix::Identity(h.dim(), h.dim()));
  const auto e0 = eigh(h).eigenvalues;
  const auto e1 = eigh(shifted).eigenvalues;
  CHECK(((e1 - e0).array() - p.omega0).abs().maxCoeff() <= 1e-10 * e0.cwiseAbs().maxCoeff());
}

TEST_CASE("decoupled ground state has no photons") {
  for (int atoms : {1, 3}) {
    const auto p = params(1, 8, 0, 6, atoms);
    const auto sd = eigh(build_dicke(p));
    const auto psi = ground_state(sd);
    CHECK(expectation(photon_number(p.cutoff, p.spin).matrix(), psi) == 0.0);
    // |0> (x) |m = -j> is the last spin state of the first photon block
    CHECK(std::abs(psi(atoms)) == doctest::Approx(1.0));
  }
}

TEST_CASE("parity labels match the parity operator") {
  const BosonCutoff cut(5);
  const SpinLength spin(2);
  const auto labels = parity_labels(cut, spin);
  const auto p = build_parity(cut, spin);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(p.matrix()(i, i).real() == (labels[i] == 0 ? 1.0 : -1.0));
  }
}
