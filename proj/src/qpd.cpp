#include "nafqa/qpd.hpp"

#include <cmath>

#include "nafqa/error.hpp"

namespace nafqa {

QpdLayerPlan plan_layer(const NoiseModel& engineered, double duration) {
  QpdLayerPlan plan;
  for (const auto& t : engineered.terms()) {
    if (!std::isfinite(t.rate)) throw ConfigError("non-finite engineered rate for " + t.pauli.str());
    const ChannelFactor f = make_channel_factor(t.pauli, t.rate * duration);
    plan.layer_overhead *= f.weight + (1.0 - f.weight);
    if (f.sign < 0) plan.trace_factor *= 2.0 * f.weight - 1.0;
    plan.factors.push_back(f);
  }
  return plan;
}

SignedSample sample_branches(const QpdLayerPlan& plan, SplitMix64& rng) {
  SignedSample s;
  s.pauli_branch.resize(plan.factors.size(), false);
  for (std::size_t k = 0; k < plan.factors.size(); ++k) {
    const auto& f = plan.factors[k];
    if (f.weight >= 1.0) continue;
    if (rng.uniform() >= f.weight) {
      s.pauli_branch[k] = true;
      if (f.sign < 0) {
        s.parity = -s.parity;
        ++s.negative_draws;
      }
    }
  }
  return s;
}

void apply_sample(DensityMatrix& rho, const QpdLayerPlan& plan, const SignedSample& sample) {
  for (std::size_t k = 0; k < plan.factors.size(); ++k)
    if (sample.pauli_branch[k]) rho = conjugate(rho, plan.factors[k].pauli);
}

double total_overhead(const std::vector<QpdLayerPlan>& plans) {
  double n = 1.0;
  for (const auto& p : plans) n *= p.layer_overhead;
  return n;
}

double total_trace_factor(const std::vector<QpdLayerPlan>& plans) {
  double n = 1.0;
  for (const auto& p : plans) n *= p.trace_factor;
  return n;
}

double integral_overhead(const std::vector<NoiseModel>& engineered, double dt) {
  double acc = 0.0;
  for (const auto& m : engineered)
    for (const auto& t : m.terms()) acc += (std::abs(t.rate) + t.rate) * dt;
  return std::exp(acc);
}

QpdResult qpd_estimate(const DensityMatrix& rho0, const std::vector<QpdCircuitLayer>& layers,
                       const PauliSumOperator& observable, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw ConfigError("QPD needs at least one sample");
  QpdResult res;
  res.samples = samples;
  std::vector<QpdLayerPlan> plans;
  for (const auto& l : layers) plans.push_back(l.plan);
  res.overhead = total_overhead(plans);
  res.trace_factor = total_trace_factor(plans);

  // The noisy part before each layer's engineered factors is deterministic, so
  // reuse it across samples when no layer depends on an earlier draw.
  const bool single = layers.size() == 1;
  DensityMatrix noisy0;
  if (single) {
    noisy0 = rho0;
    if (layers[0].unitary) layers[0].unitary(noisy0);
    noisy0 = apply_pauli_channel_exact(noisy0, layers[0].intrinsic, layers[0].duration);
  }

  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    SplitMix64 rng = substream(seed, i);
    int parity = 1;
    DensityMatrix rho;
    if (single) {
      rho = noisy0;
      const SignedSample s = sample_branches(layers[0].plan, rng);
      apply_sample(rho, layers[0].plan, s);
      parity = s.parity;
    } else {
      rho = rho0;
      for (const auto& l : layers) {
        if (l.unitary) l.unitary(rho);
        rho = apply_pauli_channel_exact(rho, l.intrinsic, l.duration);
        const SignedSample s = sample_branches(l.plan, rng);
        apply_sample(rho, l.plan, s);
        parity *= s.parity;
      }
    }
    if (parity < 0) ++res.negative_samples;
    const double v = res.overhead * parity * expectation(rho, observable);
    sum += v;
    sum_sq += v * v;
  }
  const double m = static_cast<double>(samples);
  res.mean = sum / m;
  const double var = samples > 1 ? std::max(0.0, (sum_sq - m * res.mean * res.mean) / (m - 1.0)) : 0.0;
  res.std_error = std::sqrt(var / m);
  res.normalized_mean = res.mean / res.trace_factor;
  res.normalized_std_error = res.std_error / res.trace_factor;
  return res;
}

}  // namespace nafqa
