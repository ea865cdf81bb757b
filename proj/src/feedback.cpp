#include "nafqa/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <set>

#include "nafqa/error.hpp"

namespace nafqa {
namespace {

double change_from(const PauliSumOperator& h_p, const PauliString& p,
                   const std::function<double(const PauliString&)>& value) {
  double acc = 0.0;
  for (const auto& t : h_p.terms())
    if (!t.pauli.commutes_with(p)) acc += -2.0 * t.coefficient * value(t.pauli);
  return acc;
}

}  // namespace

double compute_beta(const EnsembleEstimate& est, const PauliSumOperator& comm) {
  if (!est.valid()) throw NormalizationError("cannot compute beta from an invalid ensemble estimate", 0);
  return -est.expect(comm);
}

double energy_change(const EnsembleEstimate& est, const PauliSumOperator& h_p, const PauliString& p) {
  return change_from(h_p, p, [&](const PauliString& q) {
    const auto it = est.pauli_values.find(q);
    if (it == est.pauli_values.end()) throw ConfigError("Pauli " + q.str() + " was not estimated");
    return it->second;
  });
}

double energy_change(const DensityMatrix& rho, const PauliSumOperator& h_p, const PauliString& p) {
  const double tr = rho.trace().real();
  return change_from(h_p, p, [&](const PauliString& q) { return expectation(rho, q).real() / tr; });
}

double clamp_gamma(double c, double threshold) {
  if (threshold < 0.0) throw ConfigError("threshold must be >= 0");
  return c > 0.0 ? -std::min(c, threshold) : -c;
}

NoiseModel compute_gammas(const std::map<PauliString, double>& c, const NoiseModel& intrinsic,
                          const std::vector<PauliString>& controlled, double threshold, bool clamp,
                          bool zero_uncontrolled) {
  const int n = intrinsic.num_qubits() > 0 ? intrinsic.num_qubits()
                                           : (controlled.empty() ? 0 : controlled.front().num_qubits());
  NoiseModel out(n, NoiseKind::kEffective);
  auto gamma_for = [&](const PauliString& p) {
    const auto it = c.find(p);
    if (it == c.end()) throw ConfigError("no energy change available for " + p.str());
    return clamp ? clamp_gamma(it->second, threshold) : -it->second;
  };
  const std::set<PauliString> ctl(controlled.begin(), controlled.end());
  for (const auto& t : intrinsic.terms()) {
    double g;
    if (ctl.count(t.pauli)) {
      g = gamma_for(t.pauli);
    } else {
      g = zero_uncontrolled ? 0.0 : t.rate;
    }
    out.add_term(t.pauli, g);
  }
  for (const auto& p : controlled)
    if (std::none_of(intrinsic.terms().begin(), intrinsic.terms().end(),
                     [&](const NoiseTerm& t) { return t.pauli == p; }))
      out.add_term(p, gamma_for(p));
  return out;
}

NoiseModel compute_nu(const NoiseModel& gammas, const NoiseModel& intrinsic) {
  const int n = gammas.num_qubits() > 0 ? gammas.num_qubits() : intrinsic.num_qubits();
  NoiseModel out(n, NoiseKind::kEngineered);
  std::set<PauliString> seen;
  for (const auto& t : gammas.terms()) {
    out.add_term(t.pauli, t.rate - intrinsic.rate(t.pauli));
    seen.insert(t.pauli);
  }
  for (const auto& t : intrinsic.terms())
    if (!seen.count(t.pauli)) out.add_term(t.pauli, -t.rate);
  return out;
}

double compute_lcdfs_gamma(const DensityMatrix& rho, const NoiseModel& intrinsic, const PauliSumOperator& h_p,
                           const PauliSumOperator& h_n, double eps) {
  const double denom = expectation(rho, i_commutator(h_n, h_p));
  if (!(std::abs(denom) > eps))
    throw NumericGuardError("<i[H_n, H_p]> = " + std::to_string(denom) + " is within eps of zero; no LC-DFS control");
  return -dissipator_expectation(rho, intrinsic, h_p) / denom;
}

ControlBounds control_bounds(const OperatorNorms& h_p, const OperatorNorms& h_d) {
  ControlBounds b;
  b.beta_lower = -std::sqrt(h_p.seminorm) * std::sqrt(h_d.seminorm) / 2.0;
  b.beta_lower_rigorous = -h_p.seminorm * h_d.seminorm / 2.0;
  const double denom = 4.0 * h_p.spectral * h_d.spectral * h_d.spectral;
  b.dt_upper = denom > 0.0 ? 1.0 / denom : std::numeric_limits<double>::infinity();
  b.gamma_abs_upper = 2.0 * h_p.spectral;
  return b;
}

double fidelity_gamma_bound(double o_norm, double fidelity) {
  return 2.0 * o_norm * std::sqrt(std::max(0.0, 1.0 - fidelity));
}

std::vector<BoundCheck> validate_bounds(const ControlState& control, const ControlBounds& bounds, double dt,
                                        const NoiseModel& intrinsic, std::optional<double> fidelity,
                                        const PauliSumOperator* h_p) {
  std::vector<BoundCheck> out;
  out.push_back({"beta_lower", control.beta >= bounds.beta_lower, control.beta, bounds.beta_lower});
  out.push_back({"dt_upper", dt <= bounds.dt_upper, dt, bounds.dt_upper});
  for (const auto& t : control.gammas.terms())
    out.push_back({"gamma_abs_" + t.pauli.str(), std::abs(t.rate) <= bounds.gamma_abs_upper, std::abs(t.rate),
                   bounds.gamma_abs_upper});
  if (fidelity && h_p) {
    for (const auto& t : control.gammas.terms()) {
      const PauliSumOperator o = conjugate_by(*h_p, t.pauli) - *h_p;
      const double limit = fidelity_gamma_bound(norms(o).spectral, *fidelity);
      const double dev = std::abs(t.rate - intrinsic.rate(t.pauli));
      out.push_back({"gamma_fidelity_" + t.pauli.str(), dev <= limit + 1e-12, dev, limit});
    }
  }
  return out;
}

FeedbackController::FeedbackController(PauliSumOperator h_p, PauliSumOperator h_d, NoiseModel intrinsic,
                                       FeedbackSettings settings)
    : h_p_(std::move(h_p)),
      h_d_(std::move(h_d)),
      comm_(i_commutator(h_d_, h_p_)),
      intrinsic_(std::move(intrinsic)),
      settings_(std::move(settings)),
      shot_rng_(substream(settings_.shot_seed, 0)) {
  if (h_p_.num_qubits() != h_d_.num_qubits()) throw ConfigError("H_p and H_d act on different qubit counts");
  if (settings_.threshold < 0.0) throw ConfigError("threshold must be >= 0");
  if (!intrinsic_.empty() && intrinsic_.num_qubits() != h_p_.num_qubits())
    throw ConfigError("noise model has " + std::to_string(intrinsic_.num_qubits()) + " qubits, problem has " +
                      std::to_string(h_p_.num_qubits()));
  controlled_ = settings_.controlled.empty() ? intrinsic_.paulis() : settings_.controlled;
  for (const auto& p : controlled_)
    if (p.num_qubits() != h_p_.num_qubits()) throw ConfigError("controlled string " + p.str() + " has wrong length");
}

std::vector<PauliString> FeedbackController::required_paulis() const {
  std::set<PauliString> need;
  for (const auto& t : comm_.terms())
    if (!t.pauli.is_identity()) need.insert(t.pauli);
  if (settings_.nafqa)
    for (const auto& t : h_p_.terms())
      if (!t.pauli.is_identity()) need.insert(t.pauli);
  return {need.begin(), need.end()};
}

ControlState FeedbackController::from_values(std::size_t s, const std::map<PauliString, double>& raw) {
  std::map<PauliString, double> values = raw;
  if (settings_.shots > 0) {
    // Finite-shot estimate of each +-1 valued Pauli measurement.
    for (auto& [p, v] : values) {
      const double prob = std::clamp(0.5 * (1.0 + v), 0.0, 1.0);
      std::binomial_distribution<std::size_t> draw(settings_.shots, prob);
      v = 2.0 * static_cast<double>(draw(shot_rng_)) / static_cast<double>(settings_.shots) - 1.0;
    }
  }
  auto value = [&](const PauliString& q) {
    const auto it = values.find(q);
    if (it == values.end()) throw ConfigError("Pauli " + q.str() + " was not estimated");
    return it->second;
  };
  ControlState cs;
  cs.layer = s + 1;
  double a = 0.0;
  for (const auto& t : comm_.terms()) a += t.pauli.is_identity() ? t.coefficient : t.coefficient * value(t.pauli);
  cs.a = a;
  cs.beta = -a;
  if (!settings_.nafqa || (settings_.kickstart && s == 0)) {
    const int n = h_p_.num_qubits();
    NoiseModel g(intrinsic_.empty() ? n : intrinsic_.num_qubits(), NoiseKind::kEffective);
    std::set<PauliString> ctl(controlled_.begin(), controlled_.end());
    for (const auto& t : intrinsic_.terms()) {
      const bool zero = settings_.nafqa && settings_.zero_uncontrolled_lambda && !ctl.count(t.pauli);
      g.add_term(t.pauli, zero ? 0.0 : t.rate);
    }
    cs.gammas = std::move(g);
    return cs;
  }
  for (const auto& p : controlled_) cs.c[p] = change_from(h_p_, p, value);
  cs.gammas = compute_gammas(cs.c, intrinsic_, controlled_, settings_.threshold, settings_.clamp,
                             settings_.zero_uncontrolled_lambda);
  return cs;
}

ControlState FeedbackController::next(std::size_t s, const EnsembleEstimate& est) {
  if (!est.valid())
    throw NormalizationError("ensemble normalization " + std::to_string(est.normalization) +
                                 " is not positive at layer " + std::to_string(s),
                             s);
  std::map<PauliString, double> values;
  for (const auto& p : required_paulis()) {
    const auto it = est.pauli_values.find(p);
    if (it == est.pauli_values.end()) throw ConfigError("Pauli " + p.str() + " was not estimated");
    values[p] = it->second;
  }
  return from_values(s, values);
}

ControlState FeedbackController::next(std::size_t s, const DensityMatrix& rho) {
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw NormalizationError("density matrix trace is not positive", s);
  std::map<PauliString, double> values;
  for (const auto& p : required_paulis()) values[p] = expectation(rho, p).real() / tr;
  return from_values(s, values);
}

}  // namespace nafqa
