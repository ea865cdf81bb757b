#include "nafqa/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "nafqa/error.hpp"

namespace nafqa {

GroundSpace ground_space(const PauliSumOperator& h_p, double tolerance) {
  if (!h_p.is_diagonal()) throw ConfigError("ground space enumeration needs a Z-diagonal H_p");
  const auto e = h_p.diagonal();
  GroundSpace g;
  g.energy = *std::min_element(e.begin(), e.end());
  g.projector.assign(e.size(), 0.0);
  for (std::size_t b = 0; b < e.size(); ++b) {
    if (e[b] <= g.energy + tolerance) {
      g.states.push_back(static_cast<std::uint32_t>(b));
      g.projector[b] = 1.0;
    }
  }
  return g;
}

double approximation_ratio(double energy, double ground_energy) {
  if (std::abs(ground_energy) <= 1e-9) throw ConfigError("approximation ratio undefined for zero ground energy");
  return energy / ground_energy;
}

double approximation_ratio(const DensityMatrix& rho, const PauliSumOperator& h_p, double ground_energy) {
  return approximation_ratio(expectation(rho, h_p) / rho.trace().real(), ground_energy);
}

double success_probability(const DensityMatrix& rho, const GroundSpace& ground) {
  return expectation(rho, ground.projector) / rho.trace().real();
}

double success_probability(const StateVector& state, const GroundSpace& ground) {
  return expectation(state, ground.projector) / state.norm_squared();
}

double relative_error(double trace) { return (trace - 1.0) * 100.0; }

double relative_error(const EnsembleEstimate& est) { return relative_error(est.trace()); }

double fidelity_shorttime(const DensityMatrix& rho0, const NoiseModel& model, double t) {
  if (std::abs(purity(rho0) - 1.0) > 1e-9) throw ConfigError("short-time fidelity expansion needs a pure initial state");
  double acc = 0.0;
  for (const auto& term : model.terms()) {
    const double p = expectation(rho0, term.pauli).real();
    acc += term.rate * (1.0 - p * p);
  }
  return 1.0 - t * acc;
}

}  // namespace nafqa
