#include "nafqa/plqt.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "nafqa/error.hpp"

namespace nafqa {
namespace {

constexpr std::size_t kChunk = 256;

unsigned worker_count(unsigned requested, std::size_t chunks) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(chunks, 1)));
}

// Runs fn(chunk) for every chunk index in [0, chunks).
template <typename Fn>
void parallel_chunks(std::size_t chunks, unsigned threads, Fn&& fn) {
  const unsigned workers = worker_count(threads, chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto body = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks || failed.load()) return;
      try {
        fn(c);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

void guard_norm(SignedTrajectory& traj) {
  const double n2 = traj.state.norm_squared();
  if (!std::isfinite(n2) || n2 > kNormGuardHigh || n2 < kNormGuardLow) traj.aborted = true;
}

}  // namespace

LayerUnitary::LayerUnitary(const PauliSumOperator& h_p, double dt, int driver_sign)
    : num_qubits_(h_p.num_qubits()), dt_(dt), sign_(driver_sign) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("layer dt must be positive and finite");
  if (driver_sign != 1 && driver_sign != -1) throw ConfigError("driver sign must be +1 or -1");
  if (h_p.is_diagonal()) {
    const auto e = h_p.diagonal();
    diagonal_.emplace(e, dt);
    return;
  }
  if (num_qubits_ > kMaxDensityQubits)
    throw ConfigError("non-diagonal H_p limited to N <= " + std::to_string(kMaxDensityQubits));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h_p.to_matrix());
  const Eigen::VectorXcd phases =
      (solver.eigenvalues().cast<Complex>() * Complex(0.0, -dt)).array().exp().matrix();
  dense_ = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

void LayerUnitary::apply(StateVector& state, double beta) const {
  if (state.num_qubits() != num_qubits_) throw ConfigError("layer / state qubit count mismatch");
  if (diagonal_) {
    diagonal_->apply(state);
  } else {
    auto a = state.amplitudes();
    Eigen::Map<Eigen::VectorXcd> v(a.data(), static_cast<Eigen::Index>(a.size()));
    const Eigen::VectorXcd out = dense_ * v;
    v = out;
  }
  if (beta != 0.0) apply_driver_unitary(state, beta, dt_, sign_);
}

void LayerUnitary::apply(DensityMatrix& rho, double beta) const {
  if (rho.num_qubits() != num_qubits_) throw ConfigError("layer / state qubit count mismatch");
  if (diagonal_) {
    diagonal_->apply(rho);
  } else {
    rho.matrix() = dense_ * rho.matrix() * dense_.adjoint();
  }
  if (beta != 0.0) apply_driver_unitary(rho, beta, dt_, sign_);
}

double jump_budget(const NoiseModel& rates, double dt) {
  double total = 0.0;
  for (const auto& t : rates.terms()) total += std::abs(t.rate) * dt;
  if (!(total < kJumpBudgetLimit))
    throw NumericGuardError("jump probability sum " + std::to_string(total) + " >= " +
                            std::to_string(kJumpBudgetLimit) + "; reduce dt");
  return total;
}

void apply_jump_layer(SignedTrajectory& traj, const NoiseModel& rates, double dt, NoJumpScaling scaling) {
  if (traj.aborted || rates.empty()) return;
  const double budget = jump_budget(rates, dt);
  double u = traj.rng.uniform();
  for (const auto& t : rates.terms()) {
    const double p = std::abs(t.rate) * dt;
    if (u < p) {
      apply_pauli(traj.state, t.pauli);
      if (t.rate < 0.0) traj.sign = -traj.sign;
      guard_norm(traj);
      return;
    }
    u -= p;
  }
  double signed_sum = 0.0;
  for (const auto& t : rates.terms()) signed_sum += t.rate * dt;
  const double r_res = 1.0 - budget;
  const double factor = scaling == NoJumpScaling::kTracePreserving ? std::sqrt((1.0 - signed_sum) / r_res)
                                                                   : 1.0 / std::sqrt(r_res);
  if (factor != 1.0) traj.state.scale(factor);
  guard_norm(traj);
}

void step_trajectory(SignedTrajectory& traj, const LayerUnitary& layer, double beta, const NoiseModel& rates,
                     NoJumpScaling scaling) {
  if (traj.aborted) return;
  layer.apply(traj.state, beta);
  apply_jump_layer(traj, rates, layer.dt(), scaling);
}

StateVector apply_jump_operator(const JumpOperator& jump, const StateVector& state) {
  if (jump.kind == JumpKind::kPauli) {
    StateVector out = state;
    apply_pauli(out, jump.pauli);
    return out;
  }
  if (jump.qubit < 0 || jump.qubit >= state.num_qubits()) throw ConfigError("ladder operator qubit out of range");
  const std::size_t bit = std::size_t{1} << jump.qubit;
  StateVector out(state.num_qubits(), std::vector<Complex>(state.dimension(), Complex(0.0)));
  // Lowering maps |1> to |0>; raising maps |0> to |1>.
  const bool lower = jump.kind == JumpKind::kLowering;
  for (std::size_t b = 0; b < state.dimension(); ++b) {
    const bool set = (b & bit) != 0;
    if (set == lower) out[b ^ bit] = state[b];
  }
  return out;
}

void step_trajectory_general(SignedTrajectory& traj, const PauliSumOperator& h,
                             const std::vector<JumpOperator>& jumps, double dt) {
  if (traj.aborted) return;
  const double n2 = traj.state.norm_squared();
  std::vector<StateVector> images;
  std::vector<double> probs;
  images.reserve(jumps.size());
  double total = 0.0;
  for (const auto& j : jumps) {
    if (j.rate < 0.0 || !std::isfinite(j.rate)) throw ConfigError("jump rates must be finite and >= 0");
    if (j.sign != 1 && j.sign != -1) throw ConfigError("jump sign must be +1 or -1");
    images.push_back(apply_jump_operator(j, traj.state));
    const double p = dt * j.rate * images.back().norm_squared() / n2;
    probs.push_back(p);
    total += p;
  }
  if (!(total < kJumpBudgetLimit))
    throw NumericGuardError("jump probability sum " + std::to_string(total) + " >= " +
                            std::to_string(kJumpBudgetLimit) + "; reduce dt");

  double u = traj.rng.uniform();
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    if (probs[k] > 0.0 && u < probs[k]) {
      StateVector next = std::move(images[k]);
      next.scale(std::sqrt(jumps[k].rate * dt / probs[k]));
      traj.state = std::move(next);
      traj.sign *= jumps[k].sign;
      guard_norm(traj);
      return;
    }
    u -= probs[k];
  }

  // (1 - i dt H - dt/2 sum s r L^dag L) psi
  StateVector next = traj.state;
  if (!h.empty()) {
    const StateVector hpsi = apply_operator(h, traj.state);
    for (std::size_t b = 0; b < next.dimension(); ++b) next[b] += Complex(0.0, -dt) * hpsi[b];
  }
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const auto& j = jumps[k];
    if (j.rate == 0.0) continue;
    const double c = -0.5 * dt * j.sign * j.rate;
    if (j.kind == JumpKind::kPauli) {
      for (std::size_t b = 0; b < next.dimension(); ++b) next[b] += c * traj.state[b];
      continue;
    }
    // L^dag L is the projector onto |1> (lowering) or |0> (raising) on the qubit.
    const std::size_t bit = std::size_t{1} << j.qubit;
    const bool want_set = j.kind == JumpKind::kLowering;
    for (std::size_t b = 0; b < next.dimension(); ++b)
      if (((b & bit) != 0) == want_set) next[b] += c * traj.state[b];
  }
  next.scale(1.0 / std::sqrt(1.0 - total));
  traj.state = std::move(next);
  guard_norm(traj);
}

void apply_factor_layer(SignedTrajectory& traj, const std::vector<ChannelFactor>& factors, double amplitude_scale) {
  if (traj.aborted) return;
  for (const auto& f : factors) {
    if (f.weight >= 1.0) continue;
    if (traj.rng.uniform() >= f.weight) {
      apply_pauli(traj.state, f.pauli);
      traj.sign *= f.sign;
    }
  }
  if (amplitude_scale != 1.0) traj.state.scale(1.0 / std::sqrt(amplitude_scale));
  guard_norm(traj);
}

DensityMatrix expected_layer_map(const DensityMatrix& rho, const LayerUnitary& layer, double beta,
                                 const NoiseModel& rates, NoJumpScaling scaling) {
  DensityMatrix u = rho;
  layer.apply(u, beta);
  if (rates.empty()) return u;
  const double dt = layer.dt();
  jump_budget(rates, dt);
  double signed_sum = 0.0;
  for (const auto& t : rates.terms()) signed_sum += t.rate * dt;
  const double keep = scaling == NoJumpScaling::kTracePreserving ? 1.0 - signed_sum : 1.0;
  Eigen::MatrixXcd out = keep * u.matrix();
  for (const auto& t : rates.terms()) {
    if (t.rate == 0.0) continue;
    out += (t.rate * dt) * conjugate(u, t.pauli).matrix();
  }
  return DensityMatrix(rho.num_qubits(), std::move(out));
}

TrajectoryEnsemble::TrajectoryEnsemble(const StateVector& initial, const EnsembleOptions& options)
    : options_(options) {
  if (options.trajectories == 0) throw ConfigError("trajectory count must be >= 1");
  trajectories_.resize(options.trajectories);
  for (std::size_t m = 0; m < trajectories_.size(); ++m) {
    trajectories_[m].state = initial;
    trajectories_[m].rng = substream(options.seed, m);
  }
}

std::size_t TrajectoryEnsemble::aborted() const {
  std::size_t n = 0;
  for (const auto& t : trajectories_) n += t.aborted ? 1 : 0;
  return n;
}

void TrajectoryEnsemble::for_each(const std::function<void(SignedTrajectory&)>& fn) {
  const std::size_t chunks = (trajectories_.size() + kChunk - 1) / kChunk;
  parallel_chunks(chunks, options_.threads, [&](std::size_t c) {
    const std::size_t end = std::min(trajectories_.size(), (c + 1) * kChunk);
    for (std::size_t m = c * kChunk; m < end; ++m)
      if (!trajectories_[m].aborted) fn(trajectories_[m]);
  });
}

void TrajectoryEnsemble::step(const LayerUnitary& layer, double beta, const NoiseModel& rates) {
  jump_budget(rates, layer.dt());
  const NoJumpScaling scaling = options_.scaling;
  for_each([&](SignedTrajectory& t) { step_trajectory(t, layer, beta, rates, scaling); });
}

EnsembleEstimate TrajectoryEnsemble::estimate(const EstimateRequest& request) const {
  const int n = trajectories_.front().state.num_qubits();
  const std::size_t chunks = (trajectories_.size() + kChunk - 1) / kChunk;
  std::vector<EstimateAccumulator> partial(chunks);
  parallel_chunks(chunks, options_.threads, [&](std::size_t c) {
    EstimateAccumulator acc(request, n);
    const std::size_t end = std::min(trajectories_.size(), (c + 1) * kChunk);
    for (std::size_t m = c * kChunk; m < end; ++m) {
      if (trajectories_[m].aborted) {
        acc.add_aborted();
      } else {
        acc.add(trajectories_[m].state, trajectories_[m].sign);
      }
    }
    partial[c] = std::move(acc);
  });
  EstimateAccumulator total(request, n);
  for (const auto& p : partial) total.merge(p);
  return total.finish();
}

std::vector<EnsembleEstimate> run_ensemble(const StateVector& initial, const LayerUnitary& layer,
                                           const std::vector<double>& betas, const std::vector<NoiseModel>& rates,
                                           const EnsembleOptions& options, const EstimateRequest& request) {
  if (betas.size() != rates.size()) throw ConfigError("beta schedule and rate schedule differ in length");
  TrajectoryEnsemble ensemble(initial, options);
  std::vector<EnsembleEstimate> out;
  out.reserve(betas.size() + 1);
  out.push_back(ensemble.estimate(request));
  for (std::size_t s = 0; s < betas.size(); ++s) {
    ensemble.step(layer, betas[s], rates[s]);
    out.push_back(ensemble.estimate(request));
    if (!out.back().valid())
      throw NormalizationError("ensemble normalization " + std::to_string(out.back().normalization) +
                                   " is not positive at layer " + std::to_string(s + 1),
                               s + 1);
  }
  return out;
}

}  // namespace nafqa
