#include "otoc/models.hpp"

#include <cmath>
#include <string>

#include "otoc/errors.hpp"

namespace otoc {

std::string_view to_string(ModelKind kind) { return kind == ModelKind::rabi ? "rabi" : "dicke"; }

ModelKind parse_model_kind(std::string_view text) {
  if (text == "rabi") return ModelKind::rabi;
  if (text == "dicke") return ModelKind::dicke;
  throw ParameterError("unknown model '" + std::string(text) + "' (expected rabi or dicke)");
}

double ModelParams::g_c() const { return critical_coupling(*this); }

void ModelParams::validate() const {
  if (!(std::isfinite(omega0) && omega0 > 0.0)) throw ParameterError("omega0 must be > 0");
  if (!(std::isfinite(Omega) && Omega > 0.0)) throw ParameterError("Omega must be > 0");
  if (!(std::isfinite(g) && g >= 0.0)) throw ParameterError("coupling g must be >= 0");
}

double critical_coupling(const ModelParams& params) {
  if (!(params.omega0 > 0.0 && params.Omega > 0.0)) {
    throw ParameterError("critical_coupling: omega0 and Omega must be positive");
  }
  return std::sqrt(params.omega0 * params.Omega) / 2.0;
}

HermitianOperator build_rabi(const ModelParams& params) {
  params.validate();
  if (params.spin.atoms() != 1) {
    throw ParameterError("build_rabi: the Rabi model has a single atom, got N = " +
                         std::to_string(params.spin.atoms()));
  }
  const BosonCutoff cut = params.cutoff;
  const SpinLength spin = params.spin;
  const ComplexMatrix a = annihilation(cut);
  const ComplexMatrix num = number_operator(cut).matrix();
  const ComplexMatrix id_light = ComplexMatrix::Identity(cut.n(), cut.n());
  const ComplexMatrix id_atom = ComplexMatrix::Identity(2, 2);

  ComplexMatrix h = params.omega0 * embed(num, id_atom, cut, spin);
  h += (params.Omega / 2.0) * embed(id_light, pauli_z(), cut, spin);
  h += params.g * embed(a + a.adjoint(), pauli_x(), cut, spin);
  return hermitize(h);
}

HermitianOperator build_dicke(const ModelParams& params) {
  params.validate();
  const BosonCutoff cut = params.cutoff;
  const SpinLength spin = params.spin;
  const ComplexMatrix a = annihilation(cut);
  const ComplexMatrix num = number_operator(cut).matrix();
  const CollectiveSpin js = collective_spin(spin);
  const ComplexMatrix id_light = ComplexMatrix::Identity(cut.n(), cut.n());
  const ComplexMatrix id_atom = ComplexMatrix::Identity(spin.dim(), spin.dim());

  ComplexMatrix h = params.omega0 * embed(num, id_atom, cut, spin);
  h += params.Omega * embed(id_light, js.jz.matrix(), cut, spin);
  h += (params.g / std::sqrt(2.0 * spin.j())) * embed(a + a.adjoint(), js.jplus + js.jminus, cut, spin);
  return hermitize(h);
}

HermitianOperator build_hamiltonian(ModelKind kind, const ModelParams& params) {
  return kind == ModelKind::rabi ? build_rabi(params) : build_dicke(params);
}

std::vector<int> parity_labels(BosonCutoff cutoff, SpinLength spin) {
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(cutoff.n()) * spin.dim());
  for (int k = 0; k < cutoff.n(); ++k) {
    // spin index i <-> m = j - i, so m + j = N - i
    for (int i = 0; i < spin.dim(); ++i) labels.push_back((k + spin.atoms() - i) % 2);
  }
  return labels;
}

HermitianOperator build_parity(BosonCutoff cutoff, SpinLength spin) {
  const auto labels = parity_labels(cutoff, spin);
  const auto d = static_cast<Eigen::Index>(labels.size());
  ComplexMatrix p = ComplexMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) p(i, i) = labels[i] == 0 ? 1.0 : -1.0;
  return HermitianOperator(std::move(p));
}

}  // namespace otoc
