#pragma once

// Shared fixtures for the unit tests. The dense Pauli builder here is an
// independent oracle: it uses Kronecker products rather than the symplectic
// masks the library works with.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "nafqa/pauli.hpp"
#include "nafqa/random.hpp"
#include "nafqa/state.hpp"

namespace nafqa::testing {

inline Eigen::Matrix2cd single_pauli(char c) {
  Eigen::Matrix2cd m;
  const Complex i(0.0, 1.0);
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

// Letter k acts on bit k of the basis index, so the Kronecker order runs from
// the last letter to the first.
inline Eigen::MatrixXcd dense_pauli(const std::string& letters) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (int k = static_cast<int>(letters.size()) - 1; k >= 0; --k) {
    const Eigen::Matrix2cd p = single_pauli(letters[k]);
    Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index a = 0; a < m.rows(); ++a)
      for (Eigen::Index b = 0; b < m.cols(); ++b) next.block(a * 2, b * 2, 2, 2) = m(a, b) * p;
    m = next;
  }
  return m;
}

inline std::string random_letters(int n, SplitMix64& rng) {
  static const char kLetters[] = "IXYZ";
  std::string s;
  for (int q = 0; q < n; ++q) s += kLetters[rng() % 4];
  return s;
}

inline StateVector random_state(int n, SplitMix64& rng) {
  StateVector psi(n);
  for (std::size_t i = 0; i < psi.dimension(); ++i) psi[i] = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
  psi.scale(1.0 / std::sqrt(psi.norm_squared()));
  return psi;
}

inline DensityMatrix random_density(int n, SplitMix64& rng) {
  const int dim = 1 << n;
  Eigen::MatrixXcd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
  Eigen::MatrixXcd r = a * a.adjoint();
  r /= r.trace();
  return DensityMatrix(n, r);
}

inline PauliSumOperator random_operator(int n, int terms, SplitMix64& rng) {
  PauliSumOperator op(n);
  for (int t = 0; t < terms; ++t) op.add_term(2.0 * rng.uniform() - 1.0, random_letters(n, rng));
  return op;
}

inline PauliSumOperator random_spin_glass_hp(int n, SplitMix64& rng) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd h(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) J(i, j) = 2.0 * rng.uniform() - 1.0;
  for (int i = 0; i < n; ++i) h(i) = 2.0 * rng.uniform() - 1.0;
  return build_spin_glass(J, h, n);
}

inline Eigen::VectorXcd to_eigen(const StateVector& psi) {
  Eigen::VectorXcd v(psi.dimension());
  for (std::size_t i = 0; i < psi.dimension(); ++i) v(static_cast<Eigen::Index>(i)) = psi[i];
  return v;
}

}  // namespace nafqa::testing
