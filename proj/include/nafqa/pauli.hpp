#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace nafqa {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 12;

/// Tensor product of single-qubit Paulis, stored in symplectic form.
///
/// Letter k of the string form acts on qubit k, and qubit k is bit k of a
/// computational-basis index. Y is stored as x=z=1 and means the Hermitian
/// Pauli Y, so every PauliString is Hermitian and squares to the identity.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int num_qubits);
  PauliString(int num_qubits, std::uint32_t x_mask, std::uint32_t z_mask);

  /// Parses letters from {I,X,Y,Z}; throws ConfigError naming a bad letter.
  static PauliString from_string(std::string_view letters);
  /// Single-qubit Pauli `letter` on `qubit`, identity elsewhere.
  static PauliString single(int num_qubits, int qubit, char letter);

  int num_qubits() const { return num_qubits_; }
  std::uint32_t x_mask() const { return x_; }
  std::uint32_t z_mask() const { return z_; }
  char letter(int qubit) const;
  std::string str() const;

  bool is_identity() const { return x_ == 0 && z_ == 0; }
  bool is_diagonal() const { return x_ == 0; }
  int weight() const;
  bool commutes_with(const PauliString& other) const;

  /// Matrix element <basis ^ x_mask| P |basis>: P|z> = phase(z) |z ^ x_mask>.
  Complex phase_on(std::uint32_t basis) const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString&, const PauliString&) = default;

 private:
  int num_qubits_ = 0;
  std::uint32_t x_ = 0;
  std::uint32_t z_ = 0;
};

/// a * b = phase * result, phase in {+1, -1, +i, -i}.
std::pair<Complex, PauliString> multiply(const PauliString& a, const PauliString& b);

struct PauliTerm {
  double coefficient = 0.0;
  PauliString pauli;
};

/// Real-weighted sum of Pauli strings on a fixed number of qubits.
/// Hermitian by construction. Terms with equal strings are merged on insert.
class PauliSumOperator {
 public:
  PauliSumOperator() = default;
  explicit PauliSumOperator(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add_term(double coefficient, const PauliString& pauli);
  void add_term(double coefficient, std::string_view letters);
  /// Drops terms whose magnitude is at most `tolerance`.
  void prune(double tolerance = 1e-14);

  /// Coefficient of the identity string (0 if absent).
  double constant() const;
  /// Coefficient of `pauli` (0 if absent).
  double coefficient(const PauliString& pauli) const;

  bool is_diagonal() const;
  /// Diagonal entries E(z) for every basis index z. Requires is_diagonal().
  std::vector<double> diagonal() const;
  /// Dense 2^N x 2^N matrix.
  Eigen::MatrixXcd to_matrix() const;

  PauliSumOperator operator+(const PauliSumOperator& other) const;
  PauliSumOperator operator-(const PauliSumOperator& other) const;
  PauliSumOperator operator*(double scale) const;

  std::string str() const;

 private:
  int num_qubits_ = 0;
  std::vector<PauliTerm> terms_;
};

/// i [A, B] evaluated with Pauli product rules. Result has real coefficients.
PauliSumOperator i_commutator(const PauliSumOperator& a, const PauliSumOperator& b);

/// P^dagger H P for a Pauli string P: flips the sign of terms anticommuting with P.
PauliSumOperator conjugate_by(const PauliSumOperator& h, const PauliString& p);

struct Edge {
  int u = 0;
  int v = 0;
};

/// H_p = -sum_{(i,j) in E} (1 - Z_i Z_j) / 2, constant kept as the identity term.
PauliSumOperator build_maxcut(const std::vector<Edge>& edges, int num_qubits);

/// H_p = sum_{m<n} J_mn Z_m Z_n + sum_l h_l Z_l. Only the strict upper
/// triangle of `couplings` is read.
PauliSumOperator build_spin_glass(const Eigen::MatrixXd& couplings,
                                  const Eigen::VectorXd& fields, int num_qubits);

/// H_d = sign * sum_j X_j.
PauliSumOperator build_driver(int num_qubits, int sign);

/// Exact spectral quantities of a Hermitian operator.
struct OperatorNorms {
  double seminorm = 0.0;  // max_eig - min_eig
  double spectral = 0.0;  // max |eigenvalue|
  double max_eig = 0.0;
  double min_eig = 0.0;
};

inline constexpr int kMaxDenseQubits = 10;

/// Exact norms. Diagonal operators use 2^N enumeration (N <= 12); others use
/// dense diagonalization and throw ConfigError above kMaxDenseQubits.
OperatorNorms norms(const PauliSumOperator& h);

}  // namespace nafqa

template <>
struct std::hash<nafqa::PauliString> {
  std::size_t operator()(const nafqa::PauliString& p) const noexcept {
    return (static_cast<std::size_t>(p.x_mask()) << 32) ^ p.z_mask() ^
           (static_cast<std::size_t>(p.num_qubits()) << 58);
  }
};
