#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "nafqa/pauli.hpp"
#include "nafqa/state.hpp"

namespace nafqa {

/// A named Hermitian observable, either a Pauli sum or a diagonal in the
/// computational basis (projectors, energies).
class Observable {
 public:
  static Observable pauli_sum(std::string name, PauliSumOperator op);
  static Observable diagonal(std::string name, std::vector<double> values);

  const std::string& name() const { return name_; }
  /// Unnormalized <psi|O|psi>.
  double evaluate(const StateVector& state) const;
  double evaluate(const DensityMatrix& rho) const;

 private:
  std::string name_;
  std::optional<PauliSumOperator> op_;
  std::vector<double> diag_;  // used when op_ is empty or diagonal
};

/// What an ensemble reduction should produce.
struct EstimateRequest {
  std::vector<Observable> observables;  // reported with standard errors
  std::vector<PauliString> paulis;      // reported as plain expectations
  bool density = false;                 // accumulate rho (N <= 8)
};

struct ObservableValue {
  double value = 0.0;
  double std_error = 0.0;
};

/// Signed-ensemble estimate rho_M = (1/N) sum_m s_m |psi_m><psi_m| with
/// N = sum_m s_m <psi_m|psi_m>, plus the requested expectations.
class EnsembleEstimate {
 public:
  double normalization = 0.0;  // N
  std::size_t sample_count = 0;  // trajectories contributing to N
  std::size_t aborted = 0;       // trajectories excluded by norm guards
  std::map<std::string, ObservableValue> observables;
  std::unordered_map<PauliString, double> pauli_values;
  std::optional<DensityMatrix> rho;

  bool valid() const { return normalization > 0.0 && sample_count > 0; }
  /// Signed trace before renormalization, N / M.
  double trace() const;
  double value(const std::string& name) const;
  double std_error(const std::string& name) const;
  /// <O> assembled from pauli_values; every term of `op` must be present.
  double expect(const PauliSumOperator& op) const;
};

/// Running sums for a signed ensemble. Merging accumulators in a fixed order
/// gives reproducible results independent of thread count.
class EstimateAccumulator {
 public:
  EstimateAccumulator() = default;
  EstimateAccumulator(const EstimateRequest& request, int num_qubits);

  void add(const StateVector& state, int sign);
  void add_aborted() { ++aborted_; }
  void merge(const EstimateAccumulator& other);
  EnsembleEstimate finish() const;

 private:
  const EstimateRequest* request_ = nullptr;
  int num_qubits_ = 0;
  std::size_t count_ = 0;
  std::size_t aborted_ = 0;
  double sum_b_ = 0.0;
  double sum_bb_ = 0.0;
  std::vector<double> sum_a_, sum_aa_, sum_ab_;
  std::vector<double> sum_pauli_;
  std::optional<Eigen::MatrixXcd> rho_;
};

/// Exact estimates from a single pure or mixed state (normalization Tr rho).
EnsembleEstimate exact_estimate(const StateVector& state, const EstimateRequest& request);
EnsembleEstimate exact_estimate(const DensityMatrix& rho, const EstimateRequest& request);

}  // namespace nafqa
