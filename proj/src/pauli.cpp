#include "nafqa/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "nafqa/error.hpp"

namespace nafqa {
namespace {

void check_qubits(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw ConfigError("qubit count " + std::to_string(n) + " outside [1, " +
                      std::to_string(kMaxQubits) + "]");
  }
}

Complex i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

int popcount(std::uint32_t v) { return std::popcount(v); }

}  // namespace

PauliString::PauliString(int num_qubits) : num_qubits_(num_qubits) { check_qubits(num_qubits); }

PauliString::PauliString(int num_qubits, std::uint32_t x_mask, std::uint32_t z_mask)
    : num_qubits_(num_qubits), x_(x_mask), z_(z_mask) {
  check_qubits(num_qubits);
  const std::uint32_t valid = (1u << num_qubits) - 1u;
  if ((x_mask | z_mask) & ~valid) throw ConfigError("Pauli mask exceeds qubit count");
}

PauliString PauliString::from_string(std::string_view letters) {
  const int n = static_cast<int>(letters.size());
  check_qubits(n);
  std::uint32_t x = 0, z = 0;
  for (int q = 0; q < n; ++q) {
    switch (letters[q]) {
      case 'I': break;
      case 'X': x |= 1u << q; break;
      case 'Y': x |= 1u << q; z |= 1u << q; break;
      case 'Z': z |= 1u << q; break;
      default:
        throw ConfigError("invalid Pauli letter '" + std::string(1, letters[q]) +
                          "' at position " + std::to_string(q) + " in \"" +
                          std::string(letters) + "\"");
    }
  }
  return PauliString(n, x, z);
}

PauliString PauliString::single(int num_qubits, int qubit, char letter) {
  check_qubits(num_qubits);
  if (qubit < 0 || qubit >= num_qubits) throw ConfigError("qubit index out of range");
  std::string s(num_qubits, 'I');
  s[qubit] = letter;
  return from_string(s);
}

char PauliString::letter(int qubit) const {
  const bool x = (x_ >> qubit) & 1u;
  const bool z = (z_ >> qubit) & 1u;
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

std::string PauliString::str() const {
  std::string s(num_qubits_, 'I');
  for (int q = 0; q < num_qubits_; ++q) s[q] = letter(q);
  return s;
}

int PauliString::weight() const { return popcount(x_ | z_); }

bool PauliString::commutes_with(const PauliString& other) const {
  return (popcount(x_ & other.z_) + popcount(z_ & other.x_)) % 2 == 0;
}

Complex PauliString::phase_on(std::uint32_t basis) const {
  const int k = popcount(x_ & z_) + 2 * popcount(basis & z_);
  return i_power(k);
}

std::pair<Complex, PauliString> multiply(const PauliString& a, const PauliString& b) {
  if (a.num_qubits() != b.num_qubits()) throw ConfigError("Pauli qubit count mismatch");
  const std::uint32_t xr = a.x_mask() ^ b.x_mask();
  const std::uint32_t zr = a.z_mask() ^ b.z_mask();
  const int k = popcount(a.x_mask() & a.z_mask()) + popcount(b.x_mask() & b.z_mask()) +
                2 * popcount(a.z_mask() & b.x_mask()) - popcount(xr & zr);
  return {i_power(k), PauliString(a.num_qubits(), xr, zr)};
}

PauliSumOperator::PauliSumOperator(int num_qubits) : num_qubits_(num_qubits) {
  check_qubits(num_qubits);
}

void PauliSumOperator::add_term(double coefficient, const PauliString& pauli) {
  if (pauli.num_qubits() != num_qubits_) throw ConfigError("term qubit count mismatch");
  if (!std::isfinite(coefficient)) throw ConfigError("non-finite coefficient");
  for (auto& t : terms_) {
    if (t.pauli == pauli) {
      t.coefficient += coefficient;
      return;
    }
  }
  terms_.push_back({coefficient, pauli});
}

void PauliSumOperator::add_term(double coefficient, std::string_view letters) {
  add_term(coefficient, PauliString::from_string(letters));
}

void PauliSumOperator::prune(double tolerance) {
  std::erase_if(terms_, [&](const PauliTerm& t) { return std::abs(t.coefficient) <= tolerance; });
}

double PauliSumOperator::constant() const {
  for (const auto& t : terms_)
    if (t.pauli.is_identity()) return t.coefficient;
  return 0.0;
}

double PauliSumOperator::coefficient(const PauliString& pauli) const {
  for (const auto& t : terms_)
    if (t.pauli == pauli) return t.coefficient;
  return 0.0;
}

bool PauliSumOperator::is_diagonal() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const PauliTerm& t) { return t.pauli.is_diagonal(); });
}

std::vector<double> PauliSumOperator::diagonal() const {
  if (!is_diagonal()) throw ConfigError("operator is not Z-diagonal");
  const std::uint32_t dim = 1u << num_qubits_;
  std::vector<double> energies(dim, 0.0);
  for (const auto& t : terms_) {
    const std::uint32_t z = t.pauli.z_mask();
    for (std::uint32_t b = 0; b < dim; ++b)
      energies[b] += (popcount(b & z) % 2 ? -t.coefficient : t.coefficient);
  }
  return energies;
}

Eigen::MatrixXcd PauliSumOperator::to_matrix() const {
  const std::uint32_t dim = 1u << num_qubits_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : terms_) {
    const std::uint32_t x = t.pauli.x_mask();
    for (std::uint32_t b = 0; b < dim; ++b) m(b ^ x, b) += t.coefficient * t.pauli.phase_on(b);
  }
  return m;
}

PauliSumOperator PauliSumOperator::operator+(const PauliSumOperator& other) const {
  if (other.num_qubits_ != num_qubits_) throw ConfigError("operator qubit count mismatch");
  PauliSumOperator out = *this;
  for (const auto& t : other.terms_) out.add_term(t.coefficient, t.pauli);
  return out;
}

PauliSumOperator PauliSumOperator::operator-(const PauliSumOperator& other) const {
  return *this + other * -1.0;
}

PauliSumOperator PauliSumOperator::operator*(double scale) const {
  PauliSumOperator out = *this;
  for (auto& t : out.terms_) t.coefficient *= scale;
  return out;
}

std::string PauliSumOperator::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    os << t.coefficient << "*" << t.pauli.str();
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

PauliSumOperator i_commutator(const PauliSumOperator& a, const PauliSumOperator& b) {
  if (a.num_qubits() != b.num_qubits()) throw ConfigError("operator qubit count mismatch");
  std::unordered_map<PauliString, double> acc;
  std::vector<PauliString> order;
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      if (ta.pauli.commutes_with(tb.pauli)) continue;
      // Anticommuting: [P, Q] = 2 P Q with PQ = phase * R, phase = +-i.
      const auto [phase, r] = multiply(ta.pauli, tb.pauli);
      const double c = (Complex(0.0, 2.0) * phase).real() * ta.coefficient * tb.coefficient;
      auto [it, inserted] = acc.try_emplace(r, 0.0);
      if (inserted) order.push_back(r);
      it->second += c;
    }
  }
  PauliSumOperator out(a.num_qubits());
  for (const auto& r : order) out.add_term(acc[r], r);
  out.prune();
  return out;
}

PauliSumOperator conjugate_by(const PauliSumOperator& h, const PauliString& p) {
  PauliSumOperator out(h.num_qubits());
  for (const auto& t : h.terms())
    out.add_term(t.pauli.commutes_with(p) ? t.coefficient : -t.coefficient, t.pauli);
  return out;
}

PauliSumOperator build_maxcut(const std::vector<Edge>& edges, int num_qubits) {
  PauliSumOperator h(num_qubits);
  std::vector<std::pair<int, int>> seen;
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= num_qubits || e.v >= num_qubits)
      throw ConfigError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                        ") has a vertex outside [0, " + std::to_string(num_qubits) + ")");
    if (e.u == e.v) throw ConfigError("self-loop edge on vertex " + std::to_string(e.u));
    const std::pair<int, int> key = std::minmax(e.u, e.v);
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      throw ConfigError("duplicate edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    seen.push_back(key);
  }
  if (edges.empty()) return h;
  h.add_term(-0.5 * static_cast<double>(edges.size()), PauliString(num_qubits));
  for (const auto& e : edges) {
    const std::uint32_t z = (1u << e.u) | (1u << e.v);
    h.add_term(0.5, PauliString(num_qubits, 0, z));
  }
  return h;
}

PauliSumOperator build_spin_glass(const Eigen::MatrixXd& couplings,
                                  const Eigen::VectorXd& fields, int num_qubits) {
  if (couplings.rows() != num_qubits || couplings.cols() != num_qubits ||
      fields.size() != num_qubits)
    throw ConfigError("spin-glass dimensions do not match N=" + std::to_string(num_qubits));
  if (!couplings.allFinite() || !fields.allFinite())
    throw ConfigError("non-finite spin-glass parameter");
  PauliSumOperator h(num_qubits);
  for (int m = 0; m < num_qubits; ++m)
    for (int n = m + 1; n < num_qubits; ++n)
      if (couplings(m, n) != 0.0)
        h.add_term(couplings(m, n), PauliString(num_qubits, 0, (1u << m) | (1u << n)));
  for (int l = 0; l < num_qubits; ++l)
    if (fields(l) != 0.0) h.add_term(fields(l), PauliString(num_qubits, 0, 1u << l));
  return h;
}

PauliSumOperator build_driver(int num_qubits, int sign) {
  if (sign != 1 && sign != -1) throw ConfigError("driver sign must be +1 or -1");
  PauliSumOperator h(num_qubits);
  for (int j = 0; j < num_qubits; ++j) h.add_term(static_cast<double>(sign), PauliString(num_qubits, 1u << j, 0));
  return h;
}

OperatorNorms norms(const PauliSumOperator& h) {
  OperatorNorms out;
  if (h.empty()) return out;
  if (h.is_diagonal()) {
    const auto e = h.diagonal();
    const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
    out.min_eig = *lo;
    out.max_eig = *hi;
  } else {
    if (h.num_qubits() > kMaxDenseQubits)
      throw ConfigError("dense diagonalization limited to N <= " + std::to_string(kMaxDenseQubits));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.to_matrix(), Eigen::EigenvaluesOnly);
    out.min_eig = solver.eigenvalues().minCoeff();
    out.max_eig = solver.eigenvalues().maxCoeff();
  }
  out.seminorm = out.max_eig - out.min_eig;
  out.spectral = std::max(std::abs(out.max_eig), std::abs(out.min_eig));
  return out;
}

}  // namespace nafqa
