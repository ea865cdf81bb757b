#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nafqa/feedback.hpp"
#include "nafqa/metrics.hpp"
#include "nafqa/noise.hpp"
#include "nafqa/pauli.hpp"
#include "nafqa/plqt.hpp"

namespace nafqa {

enum class RunMode { kIdeal, kNoisy, kNafqa, kOracle, kQpd };

RunMode parse_mode(const std::string& name);
std::string mode_name(RunMode mode);

/// A problem Hamiltonian read from `edge i j` (Maxcut) or `coupling i j J` /
/// `field i h` (spin glass) lines. `qubits N` fixes the size; otherwise it is
/// one more than the largest vertex index.
struct Problem {
  int num_qubits = 0;
  PauliSumOperator h_p;
  bool spin_glass = false;
};

Problem parse_problem(std::istream& in, const std::string& source = "<stream>");
Problem load_problem(const std::filesystem::path& path);

/// Flat configuration. Keys match the field names; CLI flags override them.
struct RunConfig {
  RunMode mode = RunMode::kNafqa;
  std::filesystem::path problem;
  std::filesystem::path noise;  // empty: bundled default when the size matches
  std::optional<Problem> problem_override;  // in-memory problem, skips the file
  std::optional<NoiseModel> noise_override;
  std::size_t layers = 41;
  double dt = 0.07;
  double threshold = kDefaultThreshold;
  std::size_t trajectories = 12000;
  std::uint64_t seed = 1;
  std::vector<PauliString> controlled;  // empty: all noise terms
  std::string controlled_text;          // raw value, resolved once N is known
  std::filesystem::path out;
  std::size_t shots = 0;
  unsigned threads = 0;
  std::optional<int> driver_sign;  // default: +1 Maxcut, -1 spin glass
  bool zero_uncontrolled_lambda = false;
  bool kickstart = true;
  bool clamp = true;
  NoJumpScaling scaling = NoJumpScaling::kTracePreserving;
  std::size_t oracle_substeps = 4;
  RunMode oracle_law = RunMode::kNafqa;  // feedback law used by mode=oracle
  std::size_t instances = 25;
  std::uint64_t coupling_seed = 2024;
  std::string sweep;  // "key=v1,v2,..."

  void set(const std::string& key, const std::string& value);
  void validate() const;
};

/// `key = value` lines, `#` comments.
RunConfig parse_config(std::istream& in, const std::string& source = "<stream>");
RunConfig load_config(const std::filesystem::path& path);

struct RunResult {
  std::vector<RunRecord> records;
  std::vector<ControlState> controls;  // controls computed from each record's state
  std::vector<std::string> gamma_names;
  std::vector<double> r_std_error;  // per record, 0 for exact modes
  std::vector<BoundCheck> violations;
  std::vector<std::string> warnings;
  ControlBounds bounds;
  double ground_energy = 0.0;
  double integral_overhead = 1.0;  // exp sum (|nu| + nu) dt over the run
};

/// Mode dispatch. Throws ConfigError / NormalizationError / NumericGuardError.
RunResult run(const RunConfig& config);

/// Runs `config` with the controls recorded in `reference` replayed on the
/// dense oracle; returns the oracle records.
RunResult replay_on_oracle(const RunConfig& config, const RunResult& reference);

void write_csv(std::ostream& out, const RunResult& result);
void write_csv(const std::filesystem::path& path, const RunResult& result);

struct SweepPoint {
  std::string value;
  RunResult result;
  double mean_abs_delta = 0.0;  // time-averaged |delta| over layers 1..S
};

/// Runs one job per value of `config.sweep`.
std::vector<SweepPoint> sweep(const RunConfig& config);

/// OLS slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct SpinGlassSummary {
  std::vector<double> r_mean, r_std_error;
  std::vector<double> phi_mean, phi_std_error;
  std::vector<double> beta_mean, beta_std_error;
  std::vector<RunResult> instances;
  std::size_t resampled = 0;
};

/// Random N-qubit spin glass with J, h uniform in [-1, 1] from (seed, index),
/// redrawn while |E_0| <= 1e-9.
Problem random_spin_glass(int num_qubits, std::uint64_t seed, std::uint64_t index, std::size_t* redraws = nullptr);

/// `config.instances` random instances run independently with `config`.
SpinGlassSummary run_spin_glass_ensemble(const RunConfig& config, int num_qubits = 3);

std::filesystem::path default_noise_path(int num_qubits);

}  // namespace nafqa
