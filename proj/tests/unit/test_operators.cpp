#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otoc/errors.hpp"
#include "otoc/operators.hpp"
#include "test_support.hpp"

using namespace otoc;
using namespace otoc::testing;

TEST_CASE("annihilation operator") {
  CHECK(max_diff(annihilation(BosonCutoff(2)), mat2(0, 1, 0, 0)) == 0.0);
  const ComplexMatrix a3 = annihilation(BosonCutoff(3));
  CHECK(a3(0, 1) == cplx(1.0));
  CHECK(a3(1, 2) == cplx(std::sqrt(2.0)));
  CHECK(a3.cwiseAbs().sum() == doctest::Approx(1.0 + std::sqrt(2.0)));
  const ComplexMatrix a4 = annihilation(BosonCutoff(4));
  CHECK(max_diff(a4.adjoint() * a4, diag({0, 1, 2, 3})) <= 1e-15);
  CHECK_THROWS_AS(BosonCutoff(1), ParameterError);
}

TEST_CASE("number operator") {
  CHECK(max_diff(number_operator(BosonCutoff(2)).matrix(), diag({0, 1})) == 0.0);
  CHECK(max_diff(number_operator(BosonCutoff(5)).matrix(), diag({0, 1, 2, 3, 4})) == 0.0);
  CHECK(trace(number_operator(BosonCutoff(4)).matrix()) == cplx(6.0));
}

TEST_CASE("truncated commutator differs from identity only in the top corner") {
  for (int n : {2, 3, 10, 80}) {
    const ComplexMatrix a = annihilation(BosonCutoff(n));
    ComplexMatrix expected = ComplexMatrix::Identity(n, n);
    expected(n - 1, n - 1) -= static_cast<double>(n);
    CHECK(max_diff(a * a.adjoint() - a.adjoint() * a, expected) <= 1e-12);
  }
}

TEST_CASE("collective spin operators") {
  SUBCASE("single spin-1/2") {
    const auto s = collective_spin(SpinLength(1));
    CHECK(max_diff(s.jz.matrix(), 0.5 * pauli_z()) == 0.0);
    CHECK(max_diff(s.jplus + s.jminus, pauli_x()) == 0.0);
  }
  SUBCASE("spin 1") {
    const auto s = collective_spin(SpinLength(2));
    CHECK(max_diff(s.jz.matrix(), diag({1, 0, -1})) == 0.0);
    CHECK(s.jplus(0, 1).real() == doctest::Approx(std::sqrt(2.0)));
    CHECK(s.jplus(1, 2).real() == doctest::Approx(std::sqrt(2.0)));
    CHECK(s.jplus.cwiseAbs().sum() == doctest::Approx(2.0 * std::sqrt(2.0)));
  }
  SUBCASE("descending-m convention puts m = -j last") {
    const SpinLength spin(5);
    const auto s = collective_spin(spin);
    CHECK(s.jz.matrix()(spin.dim() - 1, spin.dim() - 1).real() == -spin.j());
    CHECK(s.jz.matrix()(0, 0).real() == spin.j());
    CHECK(spin.dim() == 6);
  }
  CHECK_THROWS_AS(SpinLength(0), ParameterError);
}

TEST_CASE("spin algebra and Casimir hold for N <= 16") {
  for (int atoms = 1; atoms <= 16; ++atoms) {
    CAPTURE(atoms);
    const SpinLength spin(atoms);
    const auto s = collective_spin(spin);
    const ComplexMatrix& jz = s.jz.matrix();
    CHECK(max_diff(jz * s.jplus - s.jplus * jz, s.jplus) <= 1e-12);
    CHECK(max_diff(s.jplus * s.jminus - s.jminus * s.jplus, 2.0 * jz) <= 1e-12);
    const ComplexMatrix jx = 0.5 * (s.jplus + s.jminus);
    const ComplexMatrix jy = (s.jplus - s.jminus) / cplx(0.0, 2.0);
    const double j = spin.j();
    const ComplexMatrix casimir = jx * jx + jy * jy + jz * jz;
    CHECK(max_diff(casimir, j * (j + 1.0) * ComplexMatrix::Identity(spin.dim(), spin.dim())) <= 1e-12);
  }
}

TEST_CASE("embedding uses light as the outer index") {
  const BosonCutoff n2(2), n4(4);
  const SpinLength one(1), three(3);
  CHECK(max_diff(embed(ComplexMatrix::Identity(4, 4), ComplexMatrix::Identity(4, 4), n4, three),
                 ComplexMatrix::Identity(16, 16)) == 0.0);
  CHECK(max_diff(embed(number_operator(n2).matrix(), ComplexMatrix::Identity(2, 2), n2, one),
                 diag({0, 0, 1, 1})) == 0.0);
  CHECK(trace(embed(number_operator(n4).matrix(), ComplexMatrix::Identity(2, 2), n4, one)) == cplx(12.0));
  CHECK(max_diff(photon_number(n2, one).matrix(), diag({0, 0, 1, 1})) == 0.0);
  CHECK_THROWS_AS(embed(ComplexMatrix::Identity(3, 3), ComplexMatrix::Identity(2, 2), n2, one), ShapeError);
  CHECK_THROWS_AS(embed(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3), n2, one), ShapeError);
}

TEST_CASE("embedding Hermitian factors stays Hermitian") {
  const BosonCutoff cut(6);
  const SpinLength spin(3);
  const ComplexMatrix a = annihilation(cut);
  const auto s = collective_spin(spin);
  const ComplexMatrix m = embed(a + a.adjoint(), s.jplus + s.jminus, cut, spin);
  CHECK_NOTHROW(HermitianOperator{m});
  const ComplexMatrix y = embed(cplx(0, 1) * (a.adjoint() - a), s.jz.matrix(), cut, spin);
  CHECK_NOTHROW(HermitianOperator{y});
}
