#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nafqa/pauli.hpp"

namespace nafqa {

/// 2^N complex amplitudes. The norm is not forced to one: signed trajectories
/// carry their weight in the norm.
class StateVector {
 public:
  StateVector() = default;
  /// |0...0>.
  explicit StateVector(int num_qubits);
  StateVector(int num_qubits, std::vector<Complex> amplitudes);

  /// |+>^N.
  static StateVector plus(int num_qubits);
  static StateVector basis(int num_qubits, std::uint32_t index);

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return amps_.size(); }
  std::span<Complex> amplitudes() { return amps_; }
  std::span<const Complex> amplitudes() const { return amps_; }
  Complex& operator[](std::size_t i) { return amps_[i]; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const;
  void scale(double factor);
  void scale(Complex factor);

 private:
  int num_qubits_ = 0;
  std::vector<Complex> amps_;
};

inline constexpr int kMaxDensityQubits = 8;

/// Dense 2^N x 2^N density matrix (N <= kMaxDensityQubits). Pseudo-states from
/// signed averages may lose positivity but stay Hermitian.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(int num_qubits);
  DensityMatrix(int num_qubits, Eigen::MatrixXcd matrix);

  static DensityMatrix pure(const StateVector& state);
  static DensityMatrix maximally_mixed(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  Eigen::MatrixXcd& matrix() { return m_; }

  Complex trace() const { return m_.trace(); }
  /// max |rho - rho^dagger| entry.
  double hermiticity_error() const;
  double min_eigenvalue() const;

 private:
  int num_qubits_ = 0;
  Eigen::MatrixXcd m_;
};

/// In-place P|psi>.
void apply_pauli(StateVector& state, const PauliString& pauli);
/// Returns P rho P^dagger.
DensityMatrix conjugate(const DensityMatrix& rho, const PauliString& pauli);
/// Returns O|psi> for a general Pauli sum.
StateVector apply_operator(const PauliSumOperator& op, const StateVector& state);

/// <psi|P|psi> without normalization.
Complex expectation(const StateVector& state, const PauliString& pauli);
/// <psi|O|psi> without normalization. Real because O is Hermitian.
double expectation(const StateVector& state, const PauliSumOperator& op);
double expectation(const StateVector& state, std::span<const double> diagonal);
Complex expectation(const DensityMatrix& rho, const PauliString& pauli);
/// Tr(rho O).
double expectation(const DensityMatrix& rho, const PauliSumOperator& op);
double expectation(const DensityMatrix& rho, std::span<const double> diagonal);

/// exp(-i H_p dt) for Z-diagonal H_p, stored as per-basis phases.
class DiagonalPropagator {
 public:
  DiagonalPropagator(std::span<const double> energies, double dt);
  void apply(StateVector& state) const;
  void apply(DensityMatrix& rho) const;

 private:
  std::vector<Complex> phases_;
};

/// exp(-i H dt). Z-diagonal H takes the phase path at any N <= 12; other H use
/// a dense eigendecomposition and are limited to N <= 8.
void apply_problem_unitary(StateVector& state, const PauliSumOperator& h, double dt);

/// prod_j exp(-i beta sign dt X_j): the driver layer for H_d = sign * sum X_j.
void apply_driver_unitary(StateVector& state, double beta, double dt, int sign);
void apply_driver_unitary(DensityMatrix& rho, double beta, double dt, int sign);

double purity(const DensityMatrix& rho);
/// Tr(rho sigma), the overlap fidelity for a pure reference.
double overlap(const DensityMatrix& rho, const DensityMatrix& sigma);
/// (1/2) sum |eig(rho - sigma)|.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace nafqa
