#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nafqa/estimate.hpp"
#include "nafqa/noise.hpp"
#include "nafqa/pauli.hpp"
#include "nafqa/random.hpp"
#include "nafqa/state.hpp"

namespace nafqa {

inline constexpr double kDefaultThreshold = 0.15;
inline constexpr double kLcdfsEpsilon = 1e-6;

/// Controls for one layer, computed from the state after the previous one.
struct ControlState {
  std::size_t layer = 0;  // the layer these controls drive (1-based)
  double a = 0.0;         // <i[H_d, H_p]>
  double beta = 0.0;      // -a
  NoiseModel gammas;      // effective rates Gamma_k
  std::map<PauliString, double> c;  // C_k = <P_k H_p P_k> - <H_p>, controlled terms only
};

/// beta = -<i[H_d, H_p]>. Throws NormalizationError on an invalid estimate.
double compute_beta(const EnsembleEstimate& est, const PauliSumOperator& comm);

/// C = <P H P> - <H> = -2 sum_{j: {Q_j, P} = 0} c_j <Q_j>, from Pauli expectations.
double energy_change(const EnsembleEstimate& est, const PauliSumOperator& h_p, const PauliString& p);
double energy_change(const DensityMatrix& rho, const PauliSumOperator& h_p, const PauliString& p);

/// Gamma = -min(C, th) for C > 0 and -C otherwise.
double clamp_gamma(double c, double threshold);

/// Effective rates for every intrinsic term plus any extra controlled strings.
/// Controlled terms get clamp_gamma(C_k, th) (or -C_k when `clamp` is false);
/// the rest keep lambda_k, or 0 when `zero_uncontrolled` is set.
NoiseModel compute_gammas(const std::map<PauliString, double>& c, const NoiseModel& intrinsic,
                          const std::vector<PauliString>& controlled, double threshold, bool clamp,
                          bool zero_uncontrolled);

/// nu_k = Gamma_k - lambda_k; intrinsic terms missing from `gammas` count as
/// Gamma_k = 0.
NoiseModel compute_nu(const NoiseModel& gammas, const NoiseModel& intrinsic);

/// gamma(t) = -Tr(D_int[rho] H_p) / <i[H_n, H_p]>. Throws NumericGuardError
/// when the denominator magnitude is <= eps (no control exists at this state).
double compute_lcdfs_gamma(const DensityMatrix& rho, const NoiseModel& intrinsic, const PauliSumOperator& h_p,
                           const PauliSumOperator& h_n, double eps = kLcdfsEpsilon);

struct ControlBounds {
  double beta_lower = 0.0;            // -sqrt(|H_p|) sqrt(|H_d|) / 2, seminorms
  double beta_lower_rigorous = 0.0;   // -|H_p| |H_d| / 2
  double dt_upper = 0.0;              // 1 / (4 |H_p|_2 |H_d|_2^2)
  double gamma_abs_upper = 0.0;       // 2 |H_p|_2
};

ControlBounds control_bounds(const OperatorNorms& h_p, const OperatorNorms& h_d);

/// |Gamma_k - lambda_k| <= 2 |O_k| sqrt(1 - F) with O_k = P_k H_p P_k - H_p.
double fidelity_gamma_bound(double o_norm, double fidelity);

struct BoundCheck {
  std::string name;
  bool ok = true;
  double value = 0.0;
  double limit = 0.0;
};

/// Pass/warn report; never throws. The fidelity check runs only when both
/// `fidelity` and `h_p` are provided.
std::vector<BoundCheck> validate_bounds(const ControlState& control, const ControlBounds& bounds, double dt,
                                        const NoiseModel& intrinsic = {},
                                        std::optional<double> fidelity = std::nullopt,
                                        const PauliSumOperator* h_p = nullptr);

struct FeedbackSettings {
  bool nafqa = true;          // false: Gamma_k = lambda_k throughout
  double threshold = kDefaultThreshold;
  bool clamp = true;
  std::vector<PauliString> controlled;  // empty: every intrinsic term
  bool zero_uncontrolled_lambda = false;
  bool kickstart = true;      // layer 1 uses Gamma = lambda
  std::size_t shots = 0;      // 0: exact expectations
  std::uint64_t shot_seed = 7;
};

/// Lyapunov controller. Pure apart from the optional shot-noise stream.
class FeedbackController {
 public:
  FeedbackController(PauliSumOperator h_p, PauliSumOperator h_d, NoiseModel intrinsic, FeedbackSettings settings);

  const PauliSumOperator& h_p() const { return h_p_; }
  const PauliSumOperator& h_d() const { return h_d_; }
  const PauliSumOperator& comm() const { return comm_; }
  const NoiseModel& intrinsic() const { return intrinsic_; }
  const FeedbackSettings& settings() const { return settings_; }
  const std::vector<PauliString>& controlled() const { return controlled_; }

  /// Pauli strings whose expectations next() reads.
  std::vector<PauliString> required_paulis() const;

  /// Controls for layer s + 1 from the estimate after s layers.
  ControlState next(std::size_t s, const EnsembleEstimate& est);
  ControlState next(std::size_t s, const DensityMatrix& rho);

 private:
  ControlState from_values(std::size_t s, const std::map<PauliString, double>& values);

  PauliSumOperator h_p_, h_d_, comm_;
  NoiseModel intrinsic_;
  FeedbackSettings settings_;
  std::vector<PauliString> controlled_;
  SplitMix64 shot_rng_;
};

}  // namespace nafqa
