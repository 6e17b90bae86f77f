#pragma once

// Truncated bosonic ladder operators, collective spin operators and their
// embedding into the light (x) atom product space.
//
// Conventions used everywhere in the toolkit:
//  * Fock basis |0>, ..., |n-1>.
//  * Collective spin basis |j, m> with m = j, j-1, ..., -j (descending), so at
//    g = 0 the atomic ground state m = -j is the last basis vector.
//  * Composite index = photon_index * (N + 1) + spin_index (light outer).

#include "otoc/hermit.hpp"

namespace otoc {

// Dimension of the truncated Fock space.
class BosonCutoff {
 public:
  explicit BosonCutoff(int n);
  int n() const noexcept { return n_; }

 private:
  int n_;
};

// Permutation-symmetric sector of N two-level atoms, j = N/2.
class SpinLength {
 public:
  explicit SpinLength(int atoms);
  int atoms() const noexcept { return atoms_; }
  double j() const noexcept { return 0.5 * atoms_; }
  int dim() const noexcept { return atoms_ + 1; }

 private:
  int atoms_;
};

struct CollectiveSpin {
  HermitianOperator jz;
  ComplexMatrix jplus;
  ComplexMatrix jminus;
};

ComplexMatrix annihilation(BosonCutoff cutoff);
HermitianOperator number_operator(BosonCutoff cutoff);
CollectiveSpin collective_spin(SpinLength spin);

// Pauli matrices in the (|up>, |down>) basis.
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

// kron(light_op, atom_op) with shape checks against the cutoff and spin.
ComplexMatrix embed(const ComplexMatrix& light_op, const ComplexMatrix& atom_op,
                    BosonCutoff cutoff, SpinLength spin);

// a^dagger a (x) I on the composite space.
HermitianOperator photon_number(BosonCutoff cutoff, SpinLength spin);

}  // namespace otoc
