#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "nafqa/error.hpp"
#include "nafqa/lindblad.hpp"
#include "nafqa/plqt.hpp"

using namespace nafqa;

namespace {

PauliSumOperator single_op(const std::string& p, double c = 1.0) {
  PauliSumOperator op(static_cast<int>(p.size()));
  op.add_term(c, p);
  return op;
}

NoiseModel single(const std::string& p, double rate) {
  return NoiseModel(static_cast<int>(p.size()), NoiseKind::kEffective, {{PauliString::from_string(p), rate}});
}

}  // namespace

TEST(Oracle, LarmorPeriod) {
  LindbladGenerator gen(1);
  gen.set_hamiltonian(single_op("Z"));
  const auto plus = DensityMatrix::pure(StateVector::plus(1));
  const auto out = integrate_to(plus, gen, std::numbers::pi, 1e-3);
  EXPECT_LT((out.matrix() - plus.matrix()).norm(), 1e-8);
}

TEST(Oracle, DephasingDecay) {
  const double lambda = 0.3;
  LindbladGenerator gen(1);
  gen.add_pauli_channel(single("Z", lambda));
  const auto states = integrate(DensityMatrix::pure(StateVector::plus(1)), gen, 0.01, 200);
  for (std::size_t s = 0; s < states.size(); s += 20) {
    const double t = 0.01 * static_cast<double>(s);
    EXPECT_NEAR(expectation(states[s], PauliString::from_string("X")).real(), std::exp(-2.0 * lambda * t), 1e-10);
  }
}

TEST(Oracle, NegativeRateUndoesPositive) {
  const double lambda = 0.4;
  LindbladGenerator forward(1), backward(1);
  forward.add_pauli_channel(single("Z", lambda));
  backward.add_pauli_channel(single("Z", -lambda));
  const auto mid = integrate_to(DensityMatrix::pure(StateVector::plus(1)), forward, 1.0, 1e-3);
  EXPECT_LT(expectation(mid, PauliString::from_string("X")).real(), 0.5);
  const auto end = integrate_to(mid, backward, 1.0, 1e-3);
  EXPECT_NEAR(expectation(end, PauliString::from_string("X")).real(), 1.0, 1e-8);
}

TEST(OracleProperty, PositiveRatesStayPhysical) {
  SplitMix64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    LindbladGenerator gen(n);
    gen.set_hamiltonian(nafqa::testing::random_operator(n, 4, rng));
    NoiseModel m(n, NoiseKind::kIntrinsic);
    for (int k = 0; k < 3; ++k) {
      const auto p = PauliString::from_string(nafqa::testing::random_letters(n, rng));
      if (!p.is_identity() && m.rate(p) == 0.0) m.add_term(p, rng.uniform());
    }
    gen.add_pauli_channel(m);
    std::vector<double> damp(n);
    for (auto& d : damp) d = 0.5 * rng.uniform();
    gen.add_damping(DampingModel(damp));
    for (const auto& rho : integrate(nafqa::testing::random_density(n, rng), gen, 0.01, 150)) {
      EXPECT_NEAR(rho.trace().real(), 1.0, 1e-9);
      EXPECT_GE(rho.min_eigenvalue(), -1e-8);
      EXPECT_LT(rho.hermiticity_error(), 1e-9);
    }
  }
}

TEST(OracleProperty, FourthOrderConvergence) {
  SplitMix64 rng(2);
  LindbladGenerator gen(2);
  gen.set_hamiltonian(nafqa::testing::random_operator(2, 5, rng));
  gen.add_pauli_channel(NoiseModel(2, NoiseKind::kEffective,
                                   {{PauliString::from_string("XI"), 0.3}, {PauliString::from_string("YZ"), -0.2}}));
  gen.add_damping(DampingModel({0.4, 0.1}));
  const auto rho0 = nafqa::testing::random_density(2, rng);
  const double dt = 0.1;
  const auto ref = integrate_to(rho0, gen, 2.0, dt / 8.0);
  const double e1 = (integrate_to(rho0, gen, 2.0, dt).matrix() - ref.matrix()).norm();
  const double e2 = (integrate_to(rho0, gen, 2.0, dt / 2.0).matrix() - ref.matrix()).norm();
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Oracle, HermiticityGuard) {
  LindbladGenerator gen(1);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
  h(0, 1) = 5.0;  // not Hermitian
  gen.set_hamiltonian(h);
  DensityMatrix rho = DensityMatrix::pure(StateVector::plus(1));
  EXPECT_THROW(rk4_step(rho, gen, 0.1), NumericGuardError);
}

TEST(Oracle, Validation) {
  EXPECT_THROW(LindbladGenerator(7), ConfigError);
  LindbladGenerator gen(2);
  EXPECT_THROW(gen.set_hamiltonian(single_op("XXX")), ConfigError);
  EXPECT_THROW(gen.add_pauli_channel(single("X", 0.1)), ConfigError);
  EXPECT_THROW(integrate(DensityMatrix(1), gen, 0.1, 1), ConfigError);
  EXPECT_THROW(integrate(DensityMatrix(2), gen, 0.0, 1), ConfigError);
}

TEST(Oracle, RhsMatchesDissipatorExpectations) {
  SplitMix64 rng(3);
  const auto hp = nafqa::testing::random_operator(2, 4, rng);
  const auto rho = nafqa::testing::random_density(2, rng);
  const NoiseModel m(2, NoiseKind::kEffective,
                     {{PauliString::from_string("XY"), 0.3}, {PauliString::from_string("IZ"), -0.7}});
  LindbladGenerator gen(2);
  gen.add_pauli_channel(m);
  EXPECT_NEAR((gen.rhs(rho.matrix()) * hp.to_matrix()).trace().real(), dissipator_expectation(rho, m, hp), 1e-12);
  LindbladGenerator damp(2);
  const DampingModel d({0.2, 0.6});
  damp.add_damping(d);
  EXPECT_NEAR((damp.rhs(rho.matrix()) * hp.to_matrix()).trace().real(), damping_dissipator_expectation(rho, d, hp),
              1e-12);
}

TEST(EvolveClosed, ZeroBetaKeepsDiagonalObservables) {
  SplitMix64 rng(4);
  const auto hp = nafqa::testing::random_spin_glass_hp(3, rng);
  const StateVector psi = nafqa::testing::random_state(3, rng);
  const auto states = evolve_closed(psi, hp, -1, std::vector<double>(10, 0.0), 0.1);
  const auto z = PauliString::from_string("ZIZ");
  for (const auto& s : states) {
    EXPECT_NEAR(expectation(s, hp), expectation(psi, hp), 1e-12);
    EXPECT_NEAR(expectation(s, z).real(), expectation(psi, z).real(), 1e-12);
  }
}

TEST(EvolveClosed, OneLayerIsTwoUnitaries) {
  const auto hp = build_maxcut({{0, 1}, {1, 2}}, 3);
  const auto states = evolve_closed(StateVector::plus(3), hp, 1, {0.7}, 0.05);
  StateVector expected = StateVector::plus(3);
  apply_problem_unitary(expected, hp, 0.05);
  apply_driver_unitary(expected, 0.7, 0.05, 1);
  for (std::size_t i = 0; i < expected.dimension(); ++i) EXPECT_LE(std::abs(states[1][i] - expected[i]), 1e-14);
}

TEST(EvolveClosed, FeedbackIsMonotoneOnTriangle) {
  const auto hp = build_maxcut({{0, 1}, {1, 2}, {0, 2}}, 3);
  const auto comm = i_commutator(build_driver(3, 1), hp);
  std::vector<double> betas;
  const auto states = evolve_closed_feedback(StateVector::plus(3), hp, 1, comm, 0.01, 60, &betas);
  ASSERT_EQ(betas.size(), 60u);
  EXPECT_NEAR(betas[0], 0.0, 1e-15);
  for (std::size_t s = 1; s < states.size(); ++s)
    EXPECT_LE(expectation(states[s], hp), expectation(states[s - 1], hp) + 1e-9) << "layer " << s;
  EXPECT_LT(expectation(states.back(), hp), expectation(states.front(), hp) - 1e-3);
}

TEST(IntegrateLayers, ControlSeesLayerStartState) {
  const auto hp = build_maxcut({{0, 1}}, 2);
  const auto hd = build_driver(2, 1);
  std::vector<double> traces;
  const auto out = integrate_layers(DensityMatrix::pure(StateVector::plus(2)), hp, hd, 0.05, 5, 3,
                                    [&](std::size_t s, const DensityMatrix& rho) {
                                      traces.push_back(rho.trace().real());
                                      EXPECT_LT(s, 5u);
                                      return OracleLayer{0.2, single("XI", 0.1), {}};
                                    });
  EXPECT_EQ(out.size(), 6u);
  EXPECT_EQ(traces.size(), 5u);
  for (double t : traces) EXPECT_NEAR(t, 1.0, 1e-12);
}
