#include "nafqa/state.hpp"

#include <array>
#include <bit>
#include <cmath>

#include "nafqa/error.hpp"

namespace nafqa {
namespace {

void check_same(int a, int b) {
  if (a != b) throw ConfigError("qubit count mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

using Gate = std::array<Complex, 4>;  // row-major 2x2

Gate rx_gate(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {Complex(c, 0), Complex(0, -s), Complex(0, -s), Complex(c, 0)};
}

// Columns of m are transformed as state vectors: m <- G_q m.
void apply_left(Eigen::MatrixXcd& m, int q, const Gate& g) {
  const Eigen::Index dim = m.rows();
  const Eigen::Index bit = Eigen::Index{1} << q;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & bit) continue;
    const Eigen::Index j = i | bit;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const Complex a = m(i, c), b = m(j, c);
      m(i, c) = g[0] * a + g[1] * b;
      m(j, c) = g[2] * a + g[3] * b;
    }
  }
}

// m <- m G_q^dagger.
void apply_right_adjoint(Eigen::MatrixXcd& m, int q, const Gate& g) {
  const Eigen::Index dim = m.cols();
  const Eigen::Index bit = Eigen::Index{1} << q;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & bit) continue;
    const Eigen::Index j = i | bit;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const Complex a = m(r, i), b = m(r, j);
      m(r, i) = a * std::conj(g[0]) + b * std::conj(g[1]);
      m(r, j) = a * std::conj(g[2]) + b * std::conj(g[3]);
    }
  }
}

}  // namespace

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) throw ConfigError("qubit count out of range");
  amps_.assign(std::size_t{1} << num_qubits, Complex(0.0, 0.0));
  amps_[0] = 1.0;
}

StateVector::StateVector(int num_qubits, std::vector<Complex> amplitudes)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) throw ConfigError("qubit count out of range");
  if (amps_.size() != (std::size_t{1} << num_qubits))
    throw ConfigError("amplitude count must be 2^N");
}

StateVector StateVector::plus(int num_qubits) {
  StateVector s(num_qubits);
  const double a = 1.0 / std::sqrt(static_cast<double>(s.dimension()));
  for (auto& x : s.amps_) x = a;
  return s;
}

StateVector StateVector::basis(int num_qubits, std::uint32_t index) {
  StateVector s(num_qubits);
  if (index >= s.dimension()) throw ConfigError("basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

double StateVector::norm_squared() const {
  double n = 0.0;
  for (const auto& a : amps_) n += std::norm(a);
  return n;
}

void StateVector::scale(double factor) {
  for (auto& a : amps_) a *= factor;
}

void StateVector::scale(Complex factor) {
  for (auto& a : amps_) a *= factor;
}

DensityMatrix::DensityMatrix(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxDensityQubits)
    throw ConfigError("density matrices are limited to N <= " + std::to_string(kMaxDensityQubits));
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  m_ = Eigen::MatrixXcd::Zero(dim, dim);
}

DensityMatrix::DensityMatrix(int num_qubits, Eigen::MatrixXcd matrix) : DensityMatrix(num_qubits) {
  if (matrix.rows() != m_.rows() || matrix.cols() != m_.cols())
    throw ConfigError("density matrix must be 2^N x 2^N");
  m_ = std::move(matrix);
}

DensityMatrix DensityMatrix::pure(const StateVector& state) {
  DensityMatrix rho(state.num_qubits());
  const auto a = state.amplitudes();
  Eigen::Map<const Eigen::VectorXcd> v(a.data(), static_cast<Eigen::Index>(a.size()));
  rho.m_ = v * v.adjoint();
  return rho;
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
  DensityMatrix rho(num_qubits);
  rho.m_.diagonal().setConstant(1.0 / static_cast<double>(rho.m_.rows()));
  return rho;
}

double DensityMatrix::hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::MatrixXcd h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void apply_pauli(StateVector& state, const PauliString& pauli) {
  check_same(state.num_qubits(), pauli.num_qubits());
  auto a = state.amplitudes();
  const std::uint32_t x = pauli.x_mask();
  const std::uint32_t dim = static_cast<std::uint32_t>(a.size());
  if (x == 0) {
    for (std::uint32_t b = 0; b < dim; ++b) a[b] *= pauli.phase_on(b);
    return;
  }
  for (std::uint32_t b = 0; b < dim; ++b) {
    const std::uint32_t f = b ^ x;
    if (f < b) continue;
    const Complex ab = a[b], af = a[f];
    a[f] = pauli.phase_on(b) * ab;
    a[b] = pauli.phase_on(f) * af;
  }
}

DensityMatrix conjugate(const DensityMatrix& rho, const PauliString& pauli) {
  check_same(rho.num_qubits(), pauli.num_qubits());
  const std::uint32_t x = pauli.x_mask();
  const std::uint32_t dim = static_cast<std::uint32_t>(rho.matrix().rows());
  std::vector<Complex> ph(dim);
  for (std::uint32_t b = 0; b < dim; ++b) ph[b] = pauli.phase_on(b);
  DensityMatrix out(rho.num_qubits());
  auto& o = out.matrix();
  const auto& m = rho.matrix();
  // (P rho P)(i^x, j^x) = ph(i) rho(i, j) conj(ph(j)).
  for (std::uint32_t i = 0; i < dim; ++i)
    for (std::uint32_t j = 0; j < dim; ++j) o(i ^ x, j ^ x) = ph[i] * m(i, j) * std::conj(ph[j]);
  return out;
}

StateVector apply_operator(const PauliSumOperator& op, const StateVector& state) {
  check_same(state.num_qubits(), op.num_qubits());
  std::vector<Complex> out(state.dimension(), Complex(0.0, 0.0));
  const auto a = state.amplitudes();
  for (const auto& t : op.terms()) {
    const std::uint32_t x = t.pauli.x_mask();
    for (std::uint32_t b = 0; b < a.size(); ++b) out[b ^ x] += t.coefficient * t.pauli.phase_on(b) * a[b];
  }
  return StateVector(state.num_qubits(), std::move(out));
}

Complex expectation(const StateVector& state, const PauliString& pauli) {
  check_same(state.num_qubits(), pauli.num_qubits());
  const auto a = state.amplitudes();
  const std::uint32_t x = pauli.x_mask();
  Complex acc(0.0, 0.0);
  for (std::uint32_t b = 0; b < a.size(); ++b) acc += std::conj(a[b ^ x]) * pauli.phase_on(b) * a[b];
  return acc;
}

double expectation(const StateVector& state, const PauliSumOperator& op) {
  double acc = 0.0;
  for (const auto& t : op.terms()) acc += t.coefficient * expectation(state, t.pauli).real();
  return acc;
}

double expectation(const StateVector& state, std::span<const double> diagonal) {
  const auto a = state.amplitudes();
  if (diagonal.size() != a.size()) throw ConfigError("diagonal observable size mismatch");
  double acc = 0.0;
  for (std::size_t b = 0; b < a.size(); ++b) acc += std::norm(a[b]) * diagonal[b];
  return acc;
}

Complex expectation(const DensityMatrix& rho, const PauliString& pauli) {
  check_same(rho.num_qubits(), pauli.num_qubits());
  const auto& m = rho.matrix();
  const std::uint32_t x = pauli.x_mask();
  Complex acc(0.0, 0.0);
  // Tr(rho P) = sum_b <b|rho|b^x> phase(b).
  for (std::uint32_t b = 0; b < m.rows(); ++b) acc += m(b, b ^ x) * pauli.phase_on(b);
  return acc;
}

double expectation(const DensityMatrix& rho, const PauliSumOperator& op) {
  double acc = 0.0;
  for (const auto& t : op.terms()) acc += t.coefficient * expectation(rho, t.pauli).real();
  return acc;
}

double expectation(const DensityMatrix& rho, std::span<const double> diagonal) {
  const auto& m = rho.matrix();
  if (diagonal.size() != static_cast<std::size_t>(m.rows()))
    throw ConfigError("diagonal observable size mismatch");
  double acc = 0.0;
  for (Eigen::Index b = 0; b < m.rows(); ++b) acc += m(b, b).real() * diagonal[b];
  return acc;
}

DiagonalPropagator::DiagonalPropagator(std::span<const double> energies, double dt) {
  phases_.reserve(energies.size());
  for (double e : energies) phases_.push_back(std::polar(1.0, -e * dt));
}

void DiagonalPropagator::apply(StateVector& state) const {
  auto a = state.amplitudes();
  if (a.size() != phases_.size()) throw ConfigError("propagator dimension mismatch");
  for (std::size_t b = 0; b < a.size(); ++b) a[b] *= phases_[b];
}

void DiagonalPropagator::apply(DensityMatrix& rho) const {
  auto& m = rho.matrix();
  if (static_cast<std::size_t>(m.rows()) != phases_.size()) throw ConfigError("propagator dimension mismatch");
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) *= phases_[i] * std::conj(phases_[j]);
}

void apply_problem_unitary(StateVector& state, const PauliSumOperator& h, double dt) {
  check_same(state.num_qubits(), h.num_qubits());
  if (h.is_diagonal()) {
    const auto e = h.diagonal();
    DiagonalPropagator(e, dt).apply(state);
    return;
  }
  if (h.num_qubits() > kMaxDensityQubits)
    throw ConfigError("non-diagonal problem unitary limited to N <= " + std::to_string(kMaxDensityQubits));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.to_matrix());
  const Eigen::VectorXcd phases =
      (solver.eigenvalues().cast<Complex>() * Complex(0.0, -dt)).array().exp().matrix();
  const Eigen::MatrixXcd u = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
  auto a = state.amplitudes();
  Eigen::Map<Eigen::VectorXcd> v(a.data(), static_cast<Eigen::Index>(a.size()));
  const Eigen::VectorXcd out = u * v;
  v = out;
}

void apply_driver_unitary(StateVector& state, double beta, double dt, int sign) {
  if (beta == 0.0 || dt == 0.0) return;
  const double theta = beta * static_cast<double>(sign) * dt;
  const double c = std::cos(theta), s = std::sin(theta);
  const Complex mis(0.0, -s);
  auto a = state.amplitudes();
  const std::size_t dim = a.size();
  for (int q = 0; q < state.num_qubits(); ++q) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & bit) continue;
      const Complex lo = a[i], hi = a[i | bit];
      a[i] = c * lo + mis * hi;
      a[i | bit] = mis * lo + c * hi;
    }
  }
}

void apply_driver_unitary(DensityMatrix& rho, double beta, double dt, int sign) {
  if (beta == 0.0 || dt == 0.0) return;
  const Gate g = rx_gate(beta * static_cast<double>(sign) * dt);
  auto& m = rho.matrix();
  for (int q = 0; q < rho.num_qubits(); ++q) {
    apply_left(m, q, g);
    apply_right_adjoint(m, q, g);
  }
}

double purity(const DensityMatrix& rho) {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return (rho.matrix() * rho.matrix()).trace().real();
}

double overlap(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_same(rho.num_qubits(), sigma.num_qubits());
  return (rho.matrix() * sigma.matrix()).trace().real();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_same(rho.num_qubits(), sigma.num_qubits());
  Eigen::MatrixXcd d = rho.matrix() - sigma.matrix();
  d = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(d, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace nafqa
