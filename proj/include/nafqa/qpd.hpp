#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nafqa/noise.hpp"
#include "nafqa/pauli.hpp"
#include "nafqa/random.hpp"
#include "nafqa/state.hpp"

namespace nafqa {

/// Signed two-branch decomposition of one engineered layer.
/// Each factor w . + s (1 - w) P . P has sum |eta| = 1, so layer_overhead is 1;
/// the factors scale the trace by trace_factor = prod e^{-2|nu_k|} over negative nu_k.
struct QpdLayerPlan {
  std::vector<ChannelFactor> factors;
  double layer_overhead = 1.0;
  double trace_factor = 1.0;
};

/// Factors for integrated rates nu_k * duration.
QpdLayerPlan plan_layer(const NoiseModel& engineered, double duration = 1.0);

/// One branch draw for every factor of a plan.
struct SignedSample {
  std::vector<bool> pauli_branch;  // per factor: P sampled instead of identity
  int parity = 1;
  int negative_draws = 0;
};

SignedSample sample_branches(const QpdLayerPlan& plan, SplitMix64& rng);

/// Applies the sampled operations to rho.
void apply_sample(DensityMatrix& rho, const QpdLayerPlan& plan, const SignedSample& sample);

/// N_tot = prod_s N_s.
double total_overhead(const std::vector<QpdLayerPlan>& plans);
double total_trace_factor(const std::vector<QpdLayerPlan>& plans);

/// exp[sum_s sum_k (|nu_k,s| + nu_k,s) dt] for piecewise-constant rates.
double integral_overhead(const std::vector<NoiseModel>& engineered, double dt);

/// One circuit layer on the device: ideal unitary, intrinsic noise, then the
/// engineered decomposition.
struct QpdCircuitLayer {
  std::function<void(DensityMatrix&)> unitary;  // may be empty
  NoiseModel intrinsic;
  double duration = 1.0;  // intrinsic rates are integrated over this time
  QpdLayerPlan plan;
};

struct QpdResult {
  double mean = 0.0;             // N_tot sum parity tr[O rho_i] / samples
  double std_error = 0.0;
  double normalized_mean = 0.0;  // mean / trace factor
  double normalized_std_error = 0.0;
  double overhead = 1.0;
  double trace_factor = 1.0;
  std::size_t samples = 0;
  std::size_t negative_samples = 0;
};

/// Monte Carlo over branch choices. Every sample's measured value is the
/// exact tr[O rho_i] of its noisy circuit.
QpdResult qpd_estimate(const DensityMatrix& rho0, const std::vector<QpdCircuitLayer>& layers,
                       const PauliSumOperator& observable, std::size_t samples, std::uint64_t seed);

}  // namespace nafqa
