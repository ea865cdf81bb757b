#include "nafqa/estimate.hpp"

#include <cmath>

#include "nafqa/error.hpp"

namespace nafqa {

Observable Observable::pauli_sum(std::string name, PauliSumOperator op) {
  Observable o;
  o.name_ = std::move(name);
  if (op.is_diagonal()) {
    o.diag_ = op.diagonal();
  } else {
    o.op_ = std::move(op);
  }
  return o;
}

Observable Observable::diagonal(std::string name, std::vector<double> values) {
  Observable o;
  o.name_ = std::move(name);
  o.diag_ = std::move(values);
  return o;
}

double Observable::evaluate(const StateVector& state) const {
  if (op_) return expectation(state, *op_);
  return expectation(state, diag_);
}

double Observable::evaluate(const DensityMatrix& rho) const {
  if (op_) return expectation(rho, *op_);
  return expectation(rho, diag_);
}

double EnsembleEstimate::trace() const {
  return sample_count == 0 ? 0.0 : normalization / static_cast<double>(sample_count);
}

double EnsembleEstimate::value(const std::string& name) const {
  const auto it = observables.find(name);
  if (it == observables.end()) throw ConfigError("observable '" + name + "' was not estimated");
  return it->second.value;
}

double EnsembleEstimate::std_error(const std::string& name) const {
  const auto it = observables.find(name);
  if (it == observables.end()) throw ConfigError("observable '" + name + "' was not estimated");
  return it->second.std_error;
}

double EnsembleEstimate::expect(const PauliSumOperator& op) const {
  double acc = 0.0;
  for (const auto& t : op.terms()) {
    if (t.pauli.is_identity()) {
      acc += t.coefficient;
      continue;
    }
    const auto it = pauli_values.find(t.pauli);
    if (it == pauli_values.end()) throw ConfigError("Pauli " + t.pauli.str() + " was not estimated");
    acc += t.coefficient * it->second;
  }
  return acc;
}

EstimateAccumulator::EstimateAccumulator(const EstimateRequest& request, int num_qubits)
    : request_(&request),
      num_qubits_(num_qubits),
      sum_a_(request.observables.size(), 0.0),
      sum_aa_(request.observables.size(), 0.0),
      sum_ab_(request.observables.size(), 0.0),
      sum_pauli_(request.paulis.size(), 0.0) {
  if (request.density) {
    if (num_qubits > kMaxDensityQubits)
      throw ConfigError("density estimates limited to N <= " + std::to_string(kMaxDensityQubits));
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    rho_ = Eigen::MatrixXcd::Zero(dim, dim);
  }
}

void EstimateAccumulator::add(const StateVector& state, int sign) {
  const double s = static_cast<double>(sign);
  const double b = s * state.norm_squared();
  ++count_;
  sum_b_ += b;
  sum_bb_ += b * b;
  for (std::size_t i = 0; i < request_->observables.size(); ++i) {
    const double a = s * request_->observables[i].evaluate(state);
    sum_a_[i] += a;
    sum_aa_[i] += a * a;
    sum_ab_[i] += a * b;
  }
  for (std::size_t i = 0; i < request_->paulis.size(); ++i)
    sum_pauli_[i] += s * expectation(state, request_->paulis[i]).real();
  if (rho_) {
    const auto amps = state.amplitudes();
    Eigen::Map<const Eigen::VectorXcd> v(amps.data(), static_cast<Eigen::Index>(amps.size()));
    rho_->noalias() += s * (v * v.adjoint());
  }
}

void EstimateAccumulator::merge(const EstimateAccumulator& other) {
  count_ += other.count_;
  aborted_ += other.aborted_;
  sum_b_ += other.sum_b_;
  sum_bb_ += other.sum_bb_;
  for (std::size_t i = 0; i < sum_a_.size(); ++i) {
    sum_a_[i] += other.sum_a_[i];
    sum_aa_[i] += other.sum_aa_[i];
    sum_ab_[i] += other.sum_ab_[i];
  }
  for (std::size_t i = 0; i < sum_pauli_.size(); ++i) sum_pauli_[i] += other.sum_pauli_[i];
  if (rho_ && other.rho_) *rho_ += *other.rho_;
}

EnsembleEstimate EstimateAccumulator::finish() const {
  EnsembleEstimate est;
  est.normalization = sum_b_;
  est.sample_count = count_;
  est.aborted = aborted_;
  const bool ok = sum_b_ != 0.0;
  for (std::size_t i = 0; i < sum_a_.size(); ++i) {
    ObservableValue v;
    if (ok) {
      v.value = sum_a_[i] / sum_b_;
      // Ratio-estimator variance: sum (a - R b)^2 / (sum b)^2.
      const double r = v.value;
      const double resid = sum_aa_[i] - 2.0 * r * sum_ab_[i] + r * r * sum_bb_;
      v.std_error = std::sqrt(std::max(resid, 0.0)) / std::abs(sum_b_);
    }
    est.observables[request_->observables[i].name()] = v;
  }
  for (std::size_t i = 0; i < sum_pauli_.size(); ++i)
    est.pauli_values[request_->paulis[i]] = ok ? sum_pauli_[i] / sum_b_ : 0.0;
  if (rho_ && ok) est.rho = DensityMatrix(num_qubits_, *rho_ / sum_b_);
  return est;
}

EnsembleEstimate exact_estimate(const StateVector& state, const EstimateRequest& request) {
  EstimateAccumulator acc(request, state.num_qubits());
  acc.add(state, 1);
  return acc.finish();
}

EnsembleEstimate exact_estimate(const DensityMatrix& rho, const EstimateRequest& request) {
  EnsembleEstimate est;
  const double tr = rho.trace().real();
  est.normalization = tr;
  est.sample_count = 1;
  for (const auto& o : request.observables) est.observables[o.name()] = {o.evaluate(rho) / tr, 0.0};
  for (const auto& p : request.paulis) est.pauli_values[p] = expectation(rho, p).real() / tr;
  if (request.density) est.rho = DensityMatrix(rho.num_qubits(), rho.matrix() / tr);
  return est;
}

}  // namespace nafqa
