#pragma once

#include <functional>
#include <vector>

#include "nafqa/noise.hpp"
#include "nafqa/pauli.hpp"
#include "nafqa/state.hpp"

namespace nafqa {

inline constexpr int kMaxOracleQubits = 6;
inline constexpr double kHermiticityGuard = 1e-6;

/// Dense generator
///   L[rho] = -i[H, rho] + sum_k g_k (L_k rho L_k^dag - {L_k^dag L_k, rho} / 2)
/// with signed rates g_k. Pauli terms reduce to g_k (P rho P - rho).
class LindbladGenerator {
 public:
  explicit LindbladGenerator(int num_qubits);

  int num_qubits() const { return num_qubits_; }

  void set_hamiltonian(const Eigen::MatrixXcd& h);
  void set_hamiltonian(const PauliSumOperator& h);
  void add_dissipator(const Eigen::MatrixXcd& op, double rate);
  void add_pauli_channel(const NoiseModel& model);
  /// Lowering operators at lambda_k plus Z dephasing at lambda_k / 4.
  void add_damping(const DampingModel& model);
  void clear_dissipators();

  Eigen::MatrixXcd rhs(const Eigen::MatrixXcd& rho) const;

 private:
  struct Term {
    Eigen::MatrixXcd op;
    Eigen::MatrixXcd op_dag;
    Eigen::MatrixXcd anti;  // op^dag op / 2
    double rate;
  };

  int num_qubits_;
  Eigen::MatrixXcd h_;
  std::vector<Term> terms_;
};

/// One classical RK4 step. Throws NumericGuardError when the result drifts
/// from Hermitian by more than kHermiticityGuard.
void rk4_step(DensityMatrix& rho, const LindbladGenerator& gen, double dt);

/// Integrates for `steps` RK4 steps of size dt and returns the state after
/// every step, starting with rho0.
std::vector<DensityMatrix> integrate(const DensityMatrix& rho0, const LindbladGenerator& gen, double dt,
                                     std::size_t steps);

/// Integrates to time T with steps of at most dt; returns rho(T).
DensityMatrix integrate_to(const DensityMatrix& rho0, const LindbladGenerator& gen, double T, double dt);

/// Controls held constant over one layer: H = H_p + beta H_d and Pauli rates.
struct OracleLayer {
  double beta = 0.0;
  NoiseModel rates;
  DampingModel damping;  // optional, empty when no damping
};

/// Layered pseudo-Lindblad evolution with piecewise-constant controls.
/// `control(s, rho_s)` returns the controls for layer s + 1 from the state
/// after s layers. Each layer is integrated with `substeps` RK4 steps.
/// Returns rho after every layer, starting with rho0.
std::vector<DensityMatrix> integrate_layers(
    const DensityMatrix& rho0, const PauliSumOperator& h_p, const PauliSumOperator& h_d, double dt,
    std::size_t layers, std::size_t substeps,
    const std::function<OracleLayer(std::size_t, const DensityMatrix&)>& control);

/// Ideal Trotterized evolution: each layer is U_d(beta_s) U_p(dt).
std::vector<StateVector> evolve_closed(const StateVector& psi0, const PauliSumOperator& h_p, int driver_sign,
                                       const std::vector<double>& betas, double dt);

/// Same with feedback beta_{s+1} = -<psi_s| comm |psi_s>. `betas_out`, if
/// given, receives the schedule that was used.
std::vector<StateVector> evolve_closed_feedback(const StateVector& psi0, const PauliSumOperator& h_p,
                                                int driver_sign, const PauliSumOperator& comm, double dt,
                                                std::size_t layers, std::vector<double>* betas_out = nullptr);

}  // namespace nafqa
