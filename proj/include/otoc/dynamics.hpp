#pragma once

// Spectral time evolution: one eigendecomposition of H per model instance,
// after which W(t) = e^{iHt} W e^{-iHt} is an element-wise phase product in
// the eigenbasis.

#include <span>
#include <vector>

#include "otoc/hermit.hpp"

namespace otoc {

// Part of the eigenbasis on which both rotated operators are block diagonal.
// `members` are eigen-indices (ascending), `energies` their eigenvalues, and
// w/v the corresponding sub-blocks of the rotated operators. When the frame
// is real, w_real/v_real carry the same data in real arithmetic.
struct SectorBlock {
  std::vector<Eigen::Index> members;
  RealVector energies;
  ComplexMatrix w;
  ComplexMatrix v;
  RealMatrix w_real;
  RealMatrix v_real;
};

class EvolvedFrame {
 public:
  EvolvedFrame(SpectralDecomposition spectral, const HermitianOperator& w, const HermitianOperator& v);

  const SpectralDecomposition& spectral() const noexcept { return spectral_; }
  const ComplexMatrix& w_eig() const noexcept { return w_eig_; }
  const ComplexMatrix& v_eig() const noexcept { return v_eig_; }
  Eigen::Index dim() const noexcept { return spectral_.dim(); }

  // Sector blocks covering the whole eigenbasis (a single block when the
  // operators are not sector diagonal or no sectors were supplied).
  const std::vector<SectorBlock>& blocks() const noexcept { return blocks_; }
  // Rotated operators have exactly zero imaginary parts.
  bool is_real() const noexcept { return real_; }

 private:
  SpectralDecomposition spectral_;
  ComplexMatrix w_eig_;
  ComplexMatrix v_eig_;
  std::vector<SectorBlock> blocks_;
  bool real_ = false;
};

// Diagonalizes H once (block-wise when sector labels are given) and rotates
// W and V into its eigenbasis.
EvolvedFrame prepare_frame(const HermitianOperator& h, const HermitianOperator& w,
                           const HermitianOperator& v, std::span<const int> sector_labels = {});

// W(t) in the eigenbasis: W_eig[a][b] exp(i (E_a - E_b) t).
ComplexMatrix heisenberg_at(const EvolvedFrame& frame, double t);

struct ThermalWeights {
  double beta = 0.0;
  RealVector weights;
};

// Boltzmann populations exp(-beta (E_i - E_min)) / Z over the eigenstates.
ThermalWeights thermal_weights(const SpectralDecomposition& spectral, double beta);

// Eigenvector of the lowest eigenvalue, unit norm.
ComplexVector ground_state(const SpectralDecomposition& spectral);

// True when E_1 - E_0 < 1e-10 max|E|, i.e. the returned ground state is one
// member of a numerically degenerate pair.
bool ground_state_degenerate(const SpectralDecomposition& spectral);

// <psi| O |psi> with psi and O expressed in the same basis.
double expectation(const ComplexMatrix& op, const ComplexVector& psi);

// sum_a weights[a] * (O_eig)_aa
double thermal_expectation(const ComplexMatrix& op_eig, const ThermalWeights& weights);

}  // namespace otoc
