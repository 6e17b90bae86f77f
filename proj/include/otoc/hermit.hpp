#pragma once

// Dense complex linear algebra: the carrier types for every operator in the
// toolkit plus a Hermitian eigensolver (optionally block-wise over symmetry
// sectors).

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace otoc {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Square complex matrix that is Hermitian within
// max|M - M^H| <= 1e-12 (1 + max|M|). Immutable once built.
class HermitianOperator {
 public:
  // Validates the Hermiticity invariant; throws ConstructionError otherwise.
  explicit HermitianOperator(ComplexMatrix m);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  // True when every imaginary part is exactly zero (real symmetric operator).
  bool is_real() const noexcept { return real_; }

 private:
  ComplexMatrix m_;
  bool real_ = false;
};

// Eigenpairs sorted by ascending eigenvalue; column i of `eigenvectors`
// belongs to eigenvalues[i]. When the decomposition was computed sector by
// sector, `sectors[i]` is the symmetry label of eigenpair i, otherwise
// `sectors` is empty.
struct SpectralDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
  std::vector<int> sectors;
  bool real_eigenvectors = false;

  Eigen::Index dim() const noexcept { return eigenvalues.size(); }
  // U diag(E) U^H
  ComplexMatrix reconstruct() const;
};

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
cplx trace(const ComplexMatrix& a);

// max_ij |A_ij - conj(A_ji)|
double hermiticity_defect(const ComplexMatrix& a);
double max_abs(const ComplexMatrix& a);
bool all_finite(const ComplexMatrix& a);

// Symmetrizes a nearly Hermitian matrix, (A + A^H)/2. Rejects asymmetry above
// 1e-8 (1 + max|A|) with ConstructionError.
HermitianOperator hermitize(const ComplexMatrix& a);

// Full dense eigendecomposition. Real symmetric input is solved in real
// arithmetic, giving real eigenvectors.
SpectralDecomposition eigh(const HermitianOperator& h);

// Block eigendecomposition over symmetry sectors. `labels[i]` is the sector of
// basis state i; H must not couple different sectors (ConstructionError
// otherwise). Every eigenvector is supported on a single sector, so sector
// labels stay well defined even inside degenerate doublets.
SpectralDecomposition eigh(const HermitianOperator& h, std::span<const int> labels);

}  // namespace otoc
