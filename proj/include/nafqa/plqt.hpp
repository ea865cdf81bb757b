#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nafqa/estimate.hpp"
#include "nafqa/noise.hpp"
#include "nafqa/pauli.hpp"
#include "nafqa/random.hpp"
#include "nafqa/state.hpp"

namespace nafqa {

/// How the no-jump branch rescales the state.
enum class NoJumpScaling {
  /// Multiply by sqrt((1 - sum Gamma dt) / (1 - sum |Gamma| dt)). This is the
  /// MCWF drift -(i/2) sum s_k |Gamma_k| P_k^2 folded into the normalization,
  /// so the expected signed norm stays 1 and N / M estimates the trace.
  kTracePreserving,
  /// Divide by sqrt(1 - sum |Gamma| dt); the expected norm grows by
  /// (1 + sum Gamma dt) per layer and only the ratio estimator is meaningful.
  kAlgorithm1,
};

struct SignedTrajectory {
  StateVector state;
  int sign = 1;
  SplitMix64 rng;
  bool aborted = false;
};

inline constexpr double kNormGuardHigh = 1e6;
inline constexpr double kNormGuardLow = 1e-6;
inline constexpr double kJumpBudgetLimit = 0.5;
inline constexpr double kJumpBudgetWarn = 0.1;

/// One Trotter layer U_d(beta) U_p(dt) for a fixed H_p and H_d = sign sum X.
/// The H_p propagator is built once.
class LayerUnitary {
 public:
  LayerUnitary(const PauliSumOperator& h_p, double dt, int driver_sign);

  double dt() const { return dt_; }
  int driver_sign() const { return sign_; }
  int num_qubits() const { return num_qubits_; }

  void apply(StateVector& state, double beta) const;
  void apply(DensityMatrix& rho, double beta) const;

 private:
  int num_qubits_ = 0;
  double dt_ = 0.0;
  int sign_ = 1;
  std::optional<DiagonalPropagator> diagonal_;
  Eigen::MatrixXcd dense_;
};

/// sum_k |Gamma_k| dt. Throws NumericGuardError at or above kJumpBudgetLimit.
double jump_budget(const NoiseModel& rates, double dt);

/// One layer: the unitary, then exactly one of {jump on P_k with probability
/// |Gamma_k| dt, no jump}. Jumps multiply the sign by sgn(Gamma_k). Marks the
/// trajectory aborted when its squared norm leaves [1e-6, 1e6].
void step_trajectory(SignedTrajectory& traj, const LayerUnitary& layer, double beta,
                     const NoiseModel& rates,
                     NoJumpScaling scaling = NoJumpScaling::kTracePreserving);

/// Same as step_trajectory without the unitary part.
void apply_jump_layer(SignedTrajectory& traj, const NoiseModel& rates, double dt,
                      NoJumpScaling scaling = NoJumpScaling::kTracePreserving);

enum class JumpKind { kPauli, kLowering, kRaising };

/// Jump operator L = sqrt(rate) * op with a separate sign s.
struct JumpOperator {
  JumpKind kind = JumpKind::kPauli;
  PauliString pauli;  // kPauli
  int qubit = 0;      // kLowering / kRaising
  double rate = 0.0;  // >= 0
  int sign = 1;
};

/// Applies the bare operator (without sqrt(rate)) to `state`.
StateVector apply_jump_operator(const JumpOperator& jump, const StateVector& state);

/// First-order MCWF step with H_eff = H - (i/2) sum s_k rate_k op_k^dag op_k.
/// Jump k fires with probability dt rate_k |op_k psi|^2 / |psi|^2 and keeps
/// the norm; the no-jump branch divides by sqrt(1 - sum p_k).
void step_trajectory_general(SignedTrajectory& traj, const PauliSumOperator& h,
                             const std::vector<JumpOperator>& jumps, double dt);

/// Samples each factor independently: P with probability 1 - w (sign *= s),
/// identity otherwise. The state is scaled by 1/sqrt(amplitude_scale).
void apply_factor_layer(SignedTrajectory& traj, const std::vector<ChannelFactor>& factors,
                        double amplitude_scale = 1.0);

/// Expectation of one step_trajectory layer over the jump sampler, applied to
/// rho. In trace-preserving mode this is rho_u + dt sum Gamma (P rho_u P - rho_u).
DensityMatrix expected_layer_map(const DensityMatrix& rho, const LayerUnitary& layer, double beta,
                                 const NoiseModel& rates,
                                 NoJumpScaling scaling = NoJumpScaling::kTracePreserving);

struct EnsembleOptions {
  std::size_t trajectories = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  NoJumpScaling scaling = NoJumpScaling::kTracePreserving;
};

/// M signed trajectories advanced layer-synchronously, so the controller can
/// read an estimate between layers. Trajectory m always draws from substream
/// (seed, m), and reductions merge fixed-size chunks in index order: results
/// do not depend on the thread count.
class TrajectoryEnsemble {
 public:
  TrajectoryEnsemble(const StateVector& initial, const EnsembleOptions& options);

  std::size_t size() const { return trajectories_.size(); }
  std::size_t aborted() const;
  const std::vector<SignedTrajectory>& trajectories() const { return trajectories_; }

  /// Applies `fn` to every live trajectory; `fn` must only touch its argument.
  void for_each(const std::function<void(SignedTrajectory&)>& fn);
  void step(const LayerUnitary& layer, double beta, const NoiseModel& rates);
  EnsembleEstimate estimate(const EstimateRequest& request) const;

 private:
  std::vector<SignedTrajectory> trajectories_;
  EnsembleOptions options_;
};

/// Runs `layers` steps with betas[s] and rates[s] for layer s + 1 and returns
/// the estimate after each layer, starting with the initial state (size
/// layers + 1). Throws NormalizationError naming the first layer whose
/// normalization is not positive.
std::vector<EnsembleEstimate> run_ensemble(const StateVector& initial, const LayerUnitary& layer,
                                           const std::vector<double>& betas,
                                           const std::vector<NoiseModel>& rates,
                                           const EnsembleOptions& options,
                                           const EstimateRequest& request);

}  // namespace nafqa
