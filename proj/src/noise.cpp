#include "nafqa/noise.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nafqa/error.hpp"

namespace nafqa {

NoiseModel::NoiseModel(int num_qubits, NoiseKind kind) : num_qubits_(num_qubits), kind_(kind) {
  if (num_qubits < 0 || num_qubits > kMaxQubits) throw ConfigError("noise model qubit count out of range");
}

NoiseModel::NoiseModel(int num_qubits, NoiseKind kind, std::vector<NoiseTerm> terms)
    : NoiseModel(num_qubits, kind) {
  for (const auto& t : terms) add_term(t.pauli, t.rate);
}

void NoiseModel::validate_term(const NoiseTerm& t) const {
  if (t.pauli.num_qubits() != num_qubits_)
    throw ConfigError("noise term " + t.pauli.str() + " has " + std::to_string(t.pauli.num_qubits()) +
                      " qubits, model has " + std::to_string(num_qubits_));
  if (t.pauli.is_identity()) throw ConfigError("identity is not a noise term");
  if (!std::isfinite(t.rate)) throw ConfigError("non-finite rate for " + t.pauli.str());
  if (kind_ == NoiseKind::kIntrinsic && t.rate < 0.0)
    throw ConfigError("intrinsic rate for " + t.pauli.str() + " is negative");
}

void NoiseModel::add_term(const PauliString& pauli, double rate) {
  NoiseTerm t{pauli, rate};
  validate_term(t);
  for (const auto& existing : terms_)
    if (existing.pauli == pauli) throw ConfigError("duplicate noise term " + pauli.str());
  if (terms_.size() >= kMaxNoiseTerms)
    throw ConfigError("noise model exceeds " + std::to_string(kMaxNoiseTerms) + " terms");
  terms_.push_back(t);
}

double NoiseModel::rate(const PauliString& pauli) const {
  for (const auto& t : terms_)
    if (t.pauli == pauli) return t.rate;
  return 0.0;
}

std::vector<PauliString> NoiseModel::paulis() const {
  std::vector<PauliString> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(t.pauli);
  return out;
}

ChannelFactor make_channel_factor(const PauliString& pauli, double rate) {
  return {pauli, 0.5 * (1.0 + std::exp(-2.0 * std::abs(rate))), rate < 0.0 ? -1 : 1};
}

DensityMatrix apply_pauli_channel_exact(const DensityMatrix& rho, const NoiseModel& model, double duration) {
  if (model.empty()) return rho;
  if (model.num_qubits() != rho.num_qubits()) throw ConfigError("noise model / state qubit count mismatch");
  DensityMatrix out = rho;
  for (const auto& t : model.terms()) {
    if (t.rate == 0.0) continue;
    const ChannelFactor f = make_channel_factor(t.pauli, t.rate * duration);
    const DensityMatrix flipped = conjugate(out, t.pauli);
    out.matrix() = f.weight * out.matrix() + (f.sign * (1.0 - f.weight)) * flipped.matrix();
  }
  return out;
}

double dissipator_expectation(const DensityMatrix& rho, const NoiseModel& model, const PauliSumOperator& h) {
  double acc = 0.0;
  for (const auto& t : model.terms()) {
    if (t.rate == 0.0) continue;
    // P H P - H keeps only anticommuting terms, with coefficient -2c.
    double c = 0.0;
    for (const auto& term : h.terms())
      if (!term.pauli.commutes_with(t.pauli))
        c += -2.0 * term.coefficient * expectation(rho, term.pauli).real();
    acc += t.rate * c;
  }
  return acc;
}

DampingModel::DampingModel(std::vector<double> rates) : rates_(std::move(rates)) {
  if (rates_.empty() || static_cast<int>(rates_.size()) > kMaxQubits)
    throw ConfigError("damping model needs 1..12 per-qubit rates");
  for (double r : rates_)
    if (!std::isfinite(r) || r < 0.0) throw ConfigError("damping rates must be finite and >= 0");
}

Eigen::MatrixXcd lowering_matrix(int num_qubits, int qubit) {
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  const Eigen::Index bit = Eigen::Index{1} << qubit;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b)
    if (b & bit) m(b ^ bit, b) = 1.0;
  return m;
}

double damping_dissipator_expectation(const DensityMatrix& rho, const DampingModel& model,
                                      const PauliSumOperator& h) {
  if (model.num_qubits() != rho.num_qubits() || h.num_qubits() != rho.num_qubits())
    throw ConfigError("damping model / state qubit count mismatch");
  const Eigen::MatrixXcd hm = h.to_matrix();
  const Eigen::MatrixXcd& r = rho.matrix();
  double acc = 0.0;
  for (int k = 0; k < model.num_qubits(); ++k) {
    const double lambda = model.rates()[k];
    if (lambda == 0.0) continue;
    const Eigen::MatrixXcd lo = lowering_matrix(rho.num_qubits(), k);
    const Eigen::MatrixXcd n1 = lo.adjoint() * lo;
    const Complex jump = (r * lo.adjoint() * hm * lo).trace();
    const Complex anti = (r * (hm * n1 + n1 * hm)).trace();
    acc += lambda * (jump - 0.5 * anti).real();
    const PauliString z = PauliString::single(rho.num_qubits(), k, 'Z');
    double c = 0.0;
    for (const auto& term : h.terms())
      if (!term.pauli.commutes_with(z)) c += -2.0 * term.coefficient * expectation(rho, term.pauli).real();
    acc += 0.25 * lambda * c;
  }
  return acc;
}

NoiseModel parse_noise_model(std::istream& in, const std::string& source) {
  std::vector<NoiseTerm> terms;
  int n = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string letters;
    if (!(ls >> letters)) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    double rate = 0.0;
    std::string extra;
    if (!(ls >> rate)) throw ConfigError(where + "expected '<PauliString> <rate>'");
    if (ls >> extra) throw ConfigError(where + "trailing token '" + extra + "'");
    PauliString p;
    try {
      p = PauliString::from_string(letters);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
    if (n < 0) n = p.num_qubits();
    if (p.num_qubits() != n)
      throw ConfigError(where + "string " + letters + " has " + std::to_string(p.num_qubits()) +
                        " qubits, earlier lines have " + std::to_string(n));
    if (rate < 0.0) throw ConfigError(where + "intrinsic rate must be >= 0, got " + std::to_string(rate));
    terms.push_back({p, rate});
  }
  try {
    return NoiseModel(std::max(n, 0), NoiseKind::kIntrinsic, std::move(terms));
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

NoiseModel load_noise_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open noise model " + path.string());
  return parse_noise_model(in, path.string());
}

}  // namespace nafqa
