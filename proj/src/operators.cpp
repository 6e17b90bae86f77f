#include "otoc/operators.hpp"

#include <cmath>

#include "otoc/errors.hpp"

namespace otoc {

BosonCutoff::BosonCutoff(int n) : n_(n) {
  if (n < 2) throw ParameterError("photon cutoff n must be >= 2, got " + std::to_string(n));
}

SpinLength::SpinLength(int atoms) : atoms_(atoms) {
  if (atoms < 1) throw ParameterError("atom count N must be >= 1, got " + std::to_string(atoms));
}

ComplexMatrix annihilation(BosonCutoff cutoff) {
  const int n = cutoff.n();
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

HermitianOperator number_operator(BosonCutoff cutoff) {
  const int n = cutoff.n();
  ComplexMatrix num = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) num(k, k) = static_cast<double>(k);
  return HermitianOperator(std::move(num));
}

CollectiveSpin collective_spin(SpinLength spin) {
  const int d = spin.dim();
  const double j = spin.j();
  ComplexMatrix jz = ComplexMatrix::Zero(d, d);
  ComplexMatrix jp = ComplexMatrix::Zero(d, d);
  // index i <-> m = j - i
  for (int i = 0; i < d; ++i) {
    const double m = j - i;
    jz(i, i) = m;
    if (i > 0) jp(i - 1, i) = std::sqrt((j - m) * (j + m + 1.0));
  }
  ComplexMatrix jm = jp.adjoint();
  return {HermitianOperator(std::move(jz)), std::move(jp), std::move(jm)};
}

ComplexMatrix pauli_x() {
  ComplexMatrix s(2, 2);
  s << 0.0, 1.0, 1.0, 0.0;
  return s;
}

ComplexMatrix pauli_y() {
  ComplexMatrix s(2, 2);
  s << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
  return s;
}

ComplexMatrix pauli_z() {
  ComplexMatrix s(2, 2);
  s << 1.0, 0.0, 0.0, -1.0;
  return s;
}

ComplexMatrix embed(const ComplexMatrix& light_op, const ComplexMatrix& atom_op,
                    BosonCutoff cutoff, SpinLength spin) {
  if (light_op.rows() != cutoff.n() || light_op.cols() != cutoff.n()) {
    throw ShapeError("embed: light operator must be " + std::to_string(cutoff.n()) + "x" +
                     std::to_string(cutoff.n()));
  }
  if (atom_op.rows() != spin.dim() || atom_op.cols() != spin.dim()) {
    throw ShapeError("embed: atom operator must be " + std::to_string(spin.dim()) + "x" +
                     std::to_string(spin.dim()));
  }
  return kron(light_op, atom_op);
}

HermitianOperator photon_number(BosonCutoff cutoff, SpinLength spin) {
  return HermitianOperator(embed(number_operator(cutoff).matrix(),
                                 ComplexMatrix::Identity(spin.dim(), spin.dim()), cutoff, spin));
}

}  // namespace otoc
