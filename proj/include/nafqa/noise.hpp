#pragma once

#include <filesystem>
#include <istream>
#include <vector>

#include "nafqa/pauli.hpp"
#include "nafqa/state.hpp"

namespace nafqa {

enum class NoiseKind {
  kIntrinsic,   // device rates lambda_k >= 0
  kEngineered,  // added rates nu_k, any sign
  kEffective,   // Gamma_k = lambda_k + nu_k, any sign
};

struct NoiseTerm {
  PauliString pauli;
  double rate = 0.0;  // per unit time
};

inline constexpr std::size_t kMaxNoiseTerms = 64;

/// Sparse Pauli-Lindblad model: D[rho] = sum_k rate_k (P_k rho P_k - rho).
/// Term order is significant for channel products on non-commuting strings.
class NoiseModel {
 public:
  NoiseModel() = default;
  NoiseModel(int num_qubits, NoiseKind kind);
  NoiseModel(int num_qubits, NoiseKind kind, std::vector<NoiseTerm> terms);

  int num_qubits() const { return num_qubits_; }
  NoiseKind kind() const { return kind_; }
  const std::vector<NoiseTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add_term(const PauliString& pauli, double rate);
  /// Rate of `pauli`, 0 if absent.
  double rate(const PauliString& pauli) const;
  std::vector<PauliString> paulis() const;

 private:
  void validate_term(const NoiseTerm& t) const;

  int num_qubits_ = 0;
  NoiseKind kind_ = NoiseKind::kIntrinsic;
  std::vector<NoiseTerm> terms_;
};

/// One two-outcome factor (w . + sign (1 - w) P . P) of a Pauli channel.
struct ChannelFactor {
  PauliString pauli;
  double weight = 1.0;  // identity-branch weight, (1 + e^{-2|rate|}) / 2
  int sign = 1;
};

/// Factor for integrated rate `rate` (rate * duration). Negative rates give
/// the pseudo factor with sign -1.
ChannelFactor make_channel_factor(const PauliString& pauli, double rate);

/// prod_k factor_k applied in term order, with rates integrated over
/// `duration`. Trace is preserved for non-negative rates and scaled by
/// e^{-2|rate_k duration|} for each negative one.
DensityMatrix apply_pauli_channel_exact(const DensityMatrix& rho, const NoiseModel& model,
                                        double duration = 1.0);

/// Tr(D[rho] H) = sum_k rate_k (<P_k H P_k> - <H>), evaluated symbolically.
double dissipator_expectation(const DensityMatrix& rho, const NoiseModel& model,
                              const PauliSumOperator& h);

/// Local amplitude damping at rate lambda_k plus dephasing at lambda_k / 4.
/// Lowering operators map |1> to |0>, so s+ s- = |1><1|.
class DampingModel {
 public:
  DampingModel() = default;
  explicit DampingModel(std::vector<double> rates);

  int num_qubits() const { return static_cast<int>(rates_.size()); }
  const std::vector<double>& rates() const { return rates_; }

 private:
  std::vector<double> rates_;
};

/// Tr(D_r[rho] H) including both the damping and the dephasing parts.
double damping_dissipator_expectation(const DensityMatrix& rho, const DampingModel& model,
                                      const PauliSumOperator& h);

/// Dense single-qubit lowering operator |0><1| on `qubit`.
Eigen::MatrixXcd lowering_matrix(int num_qubits, int qubit);

/// Reads `<PauliString> <rate>` lines; `#` starts a comment. Returns an
/// intrinsic model; an empty file yields an empty model with zero qubits.
NoiseModel parse_noise_model(std::istream& in, const std::string& source = "<stream>");
NoiseModel load_noise_model(const std::filesystem::path& path);

}  // namespace nafqa
