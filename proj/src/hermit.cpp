#include "otoc/hermit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "otoc/errors.hpp"

namespace otoc {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kHermitizeTol = 1e-8;

std::string shape_of(const ComplexMatrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ShapeError(std::string(what) + ": expected non-empty square matrix, got " + shape_of(m));
  }
}

bool imag_is_zero(const ComplexMatrix& m) { return (m.imag().array() == 0.0).all(); }

// Solves one Hermitian block; eigenvalues ascending.
struct BlockSolution {
  RealVector values;
  ComplexMatrix vectors;
};

BlockSolution solve_block(const ComplexMatrix& m, bool real) {
  if (real) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(m.real());
    if (es.info() != Eigen::Success) {
      throw NumericalError("eigh: real tridiagonal QR failed to converge (dim " +
                           std::to_string(m.rows()) + ", max|H| " + std::to_string(max_abs(m)) + ")");
    }
    return {es.eigenvalues(), es.eigenvectors().cast<cplx>()};
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigh: complex tridiagonal QR failed to converge (dim " +
                         std::to_string(m.rows()) + ", max|H| " + std::to_string(max_abs(m)) + ")");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace

HermitianOperator::HermitianOperator(ComplexMatrix m) : m_(std::move(m)) {
  require_square(m_, "HermitianOperator");
  if (!all_finite(m_)) throw ConstructionError("HermitianOperator: non-finite entry");
  const double scale = 1.0 + max_abs(m_);
  const double defect = hermiticity_defect(m_);
  if (defect > kHermitianTol * scale) {
    std::ostringstream os;
    os << "HermitianOperator: Hermiticity defect " << defect << " exceeds " << kHermitianTol * scale;
    throw ConstructionError(os.str());
  }
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    const cplx d = m_(i, i);
    if (std::abs(d.imag()) > kHermitianTol * (1.0 + std::abs(d.real()))) {
      throw ConstructionError("HermitianOperator: diagonal entry " + std::to_string(i) +
                              " has an imaginary part");
    }
  }
  real_ = imag_is_zero(m_);
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<cplx>().asDiagonal() * eigenvectors.adjoint();
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: cannot multiply " + shape_of(a) + " by " + shape_of(b));
  }
  return a * b;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

cplx trace(const ComplexMatrix& a) {
  require_square(a, "trace");
  return a.trace();
}

double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs(const ComplexMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

bool all_finite(const ComplexMatrix& a) { return a.allFinite(); }

HermitianOperator hermitize(const ComplexMatrix& a) {
  require_square(a, "hermitize");
  const double defect = hermiticity_defect(a);
  const double limit = kHermitizeTol * (1.0 + max_abs(a));
  if (!(defect <= limit)) {
    std::ostringstream os;
    os << "hermitize: asymmetry " << defect << " exceeds " << limit << " (builder bug?)";
    throw ConstructionError(os.str());
  }
  ComplexMatrix sym = 0.5 * (a + a.adjoint());
  return HermitianOperator(std::move(sym));
}

SpectralDecomposition eigh(const HermitianOperator& h) {
  const bool real = h.is_real();
  auto sol = solve_block(h.matrix(), real);
  SpectralDecomposition out;
  out.eigenvalues = std::move(sol.values);
  out.eigenvectors = std::move(sol.vectors);
  out.real_eigenvectors = real;
  return out;
}

SpectralDecomposition eigh(const HermitianOperator& h, std::span<const int> labels) {
  const Eigen::Index dim = h.dim();
  if (static_cast<Eigen::Index>(labels.size()) != dim) {
    throw ShapeError("eigh: " + std::to_string(labels.size()) + " sector labels for dimension " +
                     std::to_string(dim));
  }
  const ComplexMatrix& m = h.matrix();
  const double limit = kHermitianTol * (1.0 + max_abs(m));
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (labels[i] != labels[j] && std::abs(m(i, j)) > limit) {
        throw ConstructionError("eigh: operator couples sectors " + std::to_string(labels[i]) +
                                " and " + std::to_string(labels[j]));
      }
    }
  }

  std::map<int, std::vector<Eigen::Index>> members;
  for (Eigen::Index i = 0; i < dim; ++i) members[labels[i]].push_back(i);

  struct Pair {
    double value;
    int sector;
    Eigen::Index local;
  };
  std::vector<Pair> pairs;
  pairs.reserve(dim);
  std::map<int, BlockSolution> blocks;
  for (const auto& [label, idx] : members) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    ComplexMatrix block(n, n);
    for (Eigen::Index c = 0; c < n; ++c)
      for (Eigen::Index r = 0; r < n; ++r) block(r, c) = m(idx[r], idx[c]);
    auto sol = solve_block(block, h.is_real());
    for (Eigen::Index k = 0; k < n; ++k) pairs.push_back({sol.values(k), label, k});
    blocks.emplace(label, std::move(sol));
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.value < b.value; });

  SpectralDecomposition out;
  out.eigenvalues.resize(dim);
  out.eigenvectors = ComplexMatrix::Zero(dim, dim);
  out.sectors.resize(dim);
  out.real_eigenvectors = h.is_real();
  for (Eigen::Index c = 0; c < dim; ++c) {
    const Pair& p = pairs[c];
    const auto& idx = members[p.sector];
    const auto& vecs = blocks[p.sector].vectors;
    out.eigenvalues(c) = p.value;
    out.sectors[c] = p.sector;
    for (std::size_t r = 0; r < idx.size(); ++r) out.eigenvectors(idx[r], c) = vecs(r, p.local);
  }
  return out;
}

}  // namespace otoc
