#pragma once

#include <string_view>
#include <vector>

#include "otoc/operators.hpp"

namespace otoc {

enum class ModelKind { rabi, dicke };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

// Physical parameters of a light-matter Hamiltonian, in units where omega0
// sets the frequency scale. Derived quantities are recomputed on access.
struct ModelParams {
  double omega0 = 1.0;
  double Omega = 1.0;
  double g = 0.0;
  BosonCutoff cutoff{80};
  SpinLength spin{1};

  double eta() const { return Omega / omega0; }
  double gamma() const { return Omega * spin.atoms() / omega0; }
  double g_c() const;

  // Throws ParameterError unless omega0 > 0, Omega > 0, g >= 0, all finite.
  void validate() const;
};

// sqrt(omega0 * Omega) / 2
double critical_coupling(const ModelParams& params);

// omega0 a^dag a + (Omega/2) sigma_z + g (a^dag + a) sigma_x; requires N == 1.
HermitianOperator build_rabi(const ModelParams& params);

// omega0 a^dag a + Omega J_z + g/sqrt(2j) (a^dag + a)(J_+ + J_-)
HermitianOperator build_dicke(const ModelParams& params);

HermitianOperator build_hamiltonian(ModelKind kind, const ModelParams& params);

// Parity exp{i pi (a^dag a + J_z + j)}: diagonal with entries (-1)^(k + m + j).
// For N = 1 this is exp{i pi (a^dag a + (1 + sigma_z)/2)}.
HermitianOperator build_parity(BosonCutoff cutoff, SpinLength spin);

// 0 for even, 1 for odd parity, per composite basis state; suitable as
// sector labels for the block eigensolver.
std::vector<int> parity_labels(BosonCutoff cutoff, SpinLength spin);

}  // namespace otoc
