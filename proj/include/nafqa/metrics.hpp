#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nafqa/estimate.hpp"
#include "nafqa/noise.hpp"
#include "nafqa/pauli.hpp"
#include "nafqa/state.hpp"

namespace nafqa {

/// One CSV row: state after layer s plus the controls computed from it.
struct RunRecord {
  std::size_t s = 0;
  double t = 0.0;
  double r = 0.0;
  double phi = 0.0;
  double purity = 0.0;
  double trace = 1.0;
  double delta = 0.0;
  double beta = 0.0;
  double energy = 0.0;
  std::vector<std::pair<std::string, double>> gammas;
  std::size_t aborted_trajectories = 0;
  bool phi_unphysical = false;  // phi outside [0, 1] from a signed pseudo-state
};

/// Minimum-energy subspace of a Z-diagonal H_p.
struct GroundSpace {
  double energy = 0.0;
  std::vector<std::uint32_t> states;
  std::vector<double> projector;  // 1 on ground basis states, 0 elsewhere
};

inline constexpr double kDegeneracyTolerance = 1e-9;

GroundSpace ground_space(const PauliSumOperator& h_p, double tolerance = kDegeneracyTolerance);

/// <H_p> / E_0. Throws ConfigError when |E_0| <= 1e-9.
double approximation_ratio(double energy, double ground_energy);
double approximation_ratio(const DensityMatrix& rho, const PauliSumOperator& h_p, double ground_energy);

/// Population of the ground subspace.
double success_probability(const DensityMatrix& rho, const GroundSpace& ground);
double success_probability(const StateVector& state, const GroundSpace& ground);

/// (trace - 1) * 100.
double relative_error(double trace);
double relative_error(const EnsembleEstimate& est);

/// 1 - t sum_k lambda_k (1 - <P_k>^2) for pure rho0; throws ConfigError for a
/// mixed rho0.
double fidelity_shorttime(const DensityMatrix& rho0, const NoiseModel& model, double t);

}  // namespace nafqa
