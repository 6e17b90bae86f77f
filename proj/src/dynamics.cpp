#include "otoc/dynamics.hpp"

#include <cmath>
#include <map>

#include "otoc/errors.hpp"

namespace otoc {

namespace {

bool sector_diagonal(const ComplexMatrix& m, const std::vector<int>& sectors) {
  const double limit = 1e-12 * (1.0 + max_abs(m));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (sectors[i] != sectors[j] && std::abs(m(i, j)) > limit) return false;
  return true;
}

ComplexMatrix gather(const ComplexMatrix& m, const std::vector<Eigen::Index>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  ComplexMatrix out(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) out(r, c) = m(idx[r], idx[c]);
  return out;
}

}  // namespace

EvolvedFrame::EvolvedFrame(SpectralDecomposition spectral, const HermitianOperator& w,
                           const HermitianOperator& v)
    : spectral_(std::move(spectral)) {
  const Eigen::Index d = spectral_.dim();
  if (w.dim() != d || v.dim() != d) {
    throw ShapeError("prepare_frame: W, V and H must share one dimension (H " + std::to_string(d) +
                     ", W " + std::to_string(w.dim()) + ", V " + std::to_string(v.dim()) + ")");
  }
  const ComplexMatrix& u = spectral_.eigenvectors;
  w_eig_ = u.adjoint() * w.matrix() * u;
  v_eig_ = u.adjoint() * v.matrix() * u;
  real_ = spectral_.real_eigenvectors && w.is_real() && v.is_real();
  if (real_) {
    // Rounding in U^H W U leaves exact zeros for real inputs; enforce it so
    // the real kernels see identical data.
    w_eig_ = w_eig_.real().cast<cplx>();
    v_eig_ = v_eig_.real().cast<cplx>();
  }

  std::map<int, std::vector<Eigen::Index>> members;
  const auto& sectors = spectral_.sectors;
  if (!sectors.empty() && sector_diagonal(w_eig_, sectors) && sector_diagonal(v_eig_, sectors)) {
    for (Eigen::Index i = 0; i < d; ++i) members[sectors[i]].push_back(i);
  } else {
    auto& all = members[0];
    for (Eigen::Index i = 0; i < d; ++i) all.push_back(i);
  }
  for (auto& [label, idx] : members) {
    SectorBlock block;
    block.energies.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) block.energies(k) = spectral_.eigenvalues(idx[k]);
    block.w = gather(w_eig_, idx);
    block.v = gather(v_eig_, idx);
    if (real_) {
      block.w_real = block.w.real();
      block.v_real = block.v.real();
    }
    block.members = std::move(idx);
    blocks_.push_back(std::move(block));
  }
}

EvolvedFrame prepare_frame(const HermitianOperator& h, const HermitianOperator& w,
                           const HermitianOperator& v, std::span<const int> sector_labels) {
  if (w.dim() != h.dim() || v.dim() != h.dim()) {
    throw ShapeError("prepare_frame: W, V and H must share one dimension");
  }
  SpectralDecomposition spectral = sector_labels.empty() ? eigh(h) : eigh(h, sector_labels);
  return EvolvedFrame(std::move(spectral), w, v);
}

ComplexMatrix heisenberg_at(const EvolvedFrame& frame, double t) {
  if (!std::isfinite(t)) throw ParameterError("heisenberg_at: time must be finite");
  const RealVector& e = frame.spectral().eigenvalues;
  const Eigen::Index d = frame.dim();
  ComplexVector phase(d);
  for (Eigen::Index a = 0; a < d; ++a) phase(a) = std::polar(1.0, e(a) * t);
  return phase.asDiagonal() * frame.w_eig() * phase.conjugate().asDiagonal();
}

ThermalWeights thermal_weights(const SpectralDecomposition& spectral, double beta) {
  if (!(std::isfinite(beta) && beta >= 0.0)) {
    throw ParameterError("thermal_weights: beta must be finite and >= 0");
  }
  const RealVector& e = spectral.eigenvalues;
  const double e_min = e.minCoeff();
  RealVector w(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) w(i) = std::exp(-beta * (e(i) - e_min));
  w /= w.sum();
  return {beta, std::move(w)};
}

ComplexVector ground_state(const SpectralDecomposition& spectral) {
  ComplexVector psi = spectral.eigenvectors.col(0);
  return psi / psi.norm();
}

bool ground_state_degenerate(const SpectralDecomposition& spectral) {
  const RealVector& e = spectral.eigenvalues;
  if (e.size() < 2) return false;
  return e(1) - e(0) < 1e-10 * e.cwiseAbs().maxCoeff();
}

double expectation(const ComplexMatrix& op, const ComplexVector& psi) {
  if (op.rows() != psi.size() || op.cols() != psi.size()) {
    throw ShapeError("expectation: operator and state dimensions differ");
  }
  return psi.dot(op * psi).real();
}

double thermal_expectation(const ComplexMatrix& op_eig, const ThermalWeights& weights) {
  if (op_eig.rows() != weights.weights.size()) {
    throw ShapeError("thermal_expectation: weights and operator dimensions differ");
  }
  double acc = 0.0;
  for (Eigen::Index a = 0; a < op_eig.rows(); ++a) acc += weights.weights(a) * op_eig(a, a).real();
  return acc;
}

}  // namespace otoc
