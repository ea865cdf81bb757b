#include "nafqa/lindblad.hpp"

#include <cmath>

#include "nafqa/error.hpp"
#include "nafqa/plqt.hpp"

namespace nafqa {

LindbladGenerator::LindbladGenerator(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxOracleQubits)
    throw ConfigError("oracle supports 1..6 qubits, got " + std::to_string(num_qubits));
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  h_ = Eigen::MatrixXcd::Zero(dim, dim);
}

void LindbladGenerator::set_hamiltonian(const Eigen::MatrixXcd& h) {
  if (h.rows() != h_.rows() || h.cols() != h_.cols()) throw ConfigError("Hamiltonian dimension mismatch");
  h_ = h;
}

void LindbladGenerator::set_hamiltonian(const PauliSumOperator& h) {
  if (h.num_qubits() != num_qubits_) throw ConfigError("Hamiltonian qubit count mismatch");
  h_ = h.to_matrix();
}

void LindbladGenerator::add_dissipator(const Eigen::MatrixXcd& op, double rate) {
  if (op.rows() != h_.rows() || op.cols() != h_.cols()) throw ConfigError("jump operator dimension mismatch");
  if (!std::isfinite(rate)) throw ConfigError("non-finite dissipator rate");
  if (rate == 0.0) return;
  terms_.push_back({op, op.adjoint(), 0.5 * (op.adjoint() * op), rate});
}

void LindbladGenerator::add_pauli_channel(const NoiseModel& model) {
  if (model.empty()) return;
  if (model.num_qubits() != num_qubits_) throw ConfigError("noise model qubit count mismatch");
  for (const auto& t : model.terms()) {
    PauliSumOperator p(num_qubits_);
    p.add_term(1.0, t.pauli);
    add_dissipator(p.to_matrix(), t.rate);
  }
}

void LindbladGenerator::add_damping(const DampingModel& model) {
  if (model.num_qubits() == 0) return;
  if (model.num_qubits() != num_qubits_) throw ConfigError("damping model qubit count mismatch");
  for (int q = 0; q < num_qubits_; ++q) {
    const double lambda = model.rates()[q];
    add_dissipator(lowering_matrix(num_qubits_, q), lambda);
    PauliSumOperator z(num_qubits_);
    z.add_term(1.0, PauliString::single(num_qubits_, q, 'Z'));
    add_dissipator(z.to_matrix(), 0.25 * lambda);
  }
}

void LindbladGenerator::clear_dissipators() { terms_.clear(); }

Eigen::MatrixXcd LindbladGenerator::rhs(const Eigen::MatrixXcd& rho) const {
  const Complex mi(0.0, -1.0);
  Eigen::MatrixXcd out = mi * (h_ * rho - rho * h_);
  for (const auto& t : terms_) out += t.rate * (t.op * rho * t.op_dag - t.anti * rho - rho * t.anti);
  return out;
}

void rk4_step(DensityMatrix& rho, const LindbladGenerator& gen, double dt) {
  const Eigen::MatrixXcd& y = rho.matrix();
  const Eigen::MatrixXcd k1 = gen.rhs(y);
  const Eigen::MatrixXcd k2 = gen.rhs(y + (0.5 * dt) * k1);
  const Eigen::MatrixXcd k3 = gen.rhs(y + (0.5 * dt) * k2);
  const Eigen::MatrixXcd k4 = gen.rhs(y + dt * k3);
  rho.matrix() = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  const double drift = rho.hermiticity_error();
  if (!(drift <= kHermiticityGuard))
    throw NumericGuardError("oracle Hermiticity drift " + std::to_string(drift) + " exceeds guard");
}

std::vector<DensityMatrix> integrate(const DensityMatrix& rho0, const LindbladGenerator& gen, double dt,
                                     std::size_t steps) {
  if (rho0.num_qubits() != gen.num_qubits()) throw ConfigError("state / generator qubit count mismatch");
  if (!(dt > 0.0)) throw ConfigError("oracle dt must be positive");
  std::vector<DensityMatrix> out;
  out.reserve(steps + 1);
  out.push_back(rho0);
  DensityMatrix rho = rho0;
  for (std::size_t s = 0; s < steps; ++s) {
    rk4_step(rho, gen, dt);
    out.push_back(rho);
  }
  return out;
}

DensityMatrix integrate_to(const DensityMatrix& rho0, const LindbladGenerator& gen, double T, double dt) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw ConfigError("oracle needs dt > 0 and T >= 0");
  if (rho0.num_qubits() != gen.num_qubits()) throw ConfigError("state / generator qubit count mismatch");
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  DensityMatrix rho = rho0;
  if (steps == 0) return rho;
  const double h = T / static_cast<double>(steps);
  for (std::size_t s = 0; s < steps; ++s) rk4_step(rho, gen, h);
  return rho;
}

std::vector<DensityMatrix> integrate_layers(
    const DensityMatrix& rho0, const PauliSumOperator& h_p, const PauliSumOperator& h_d, double dt,
    std::size_t layers, std::size_t substeps,
    const std::function<OracleLayer(std::size_t, const DensityMatrix&)>& control) {
  if (substeps == 0) throw ConfigError("substeps must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("oracle dt must be positive");
  const int n = rho0.num_qubits();
  if (h_p.num_qubits() != n || h_d.num_qubits() != n) throw ConfigError("Hamiltonian / state qubit count mismatch");
  const Eigen::MatrixXcd hp = h_p.to_matrix();
  const Eigen::MatrixXcd hd = h_d.to_matrix();
  const double h = dt / static_cast<double>(substeps);
  std::vector<DensityMatrix> out;
  out.reserve(layers + 1);
  out.push_back(rho0);
  DensityMatrix rho = rho0;
  for (std::size_t s = 0; s < layers; ++s) {
    const OracleLayer c = control(s, rho);
    LindbladGenerator gen(n);
    gen.set_hamiltonian(hp + c.beta * hd);
    gen.add_pauli_channel(c.rates);
    gen.add_damping(c.damping);
    for (std::size_t k = 0; k < substeps; ++k) rk4_step(rho, gen, h);
    out.push_back(rho);
  }
  return out;
}

std::vector<StateVector> evolve_closed(const StateVector& psi0, const PauliSumOperator& h_p, int driver_sign,
                                       const std::vector<double>& betas, double dt) {
  const LayerUnitary layer(h_p, dt, driver_sign);
  std::vector<StateVector> out;
  out.reserve(betas.size() + 1);
  out.push_back(psi0);
  StateVector psi = psi0;
  for (double b : betas) {
    layer.apply(psi, b);
    out.push_back(psi);
  }
  return out;
}

std::vector<StateVector> evolve_closed_feedback(const StateVector& psi0, const PauliSumOperator& h_p,
                                                int driver_sign, const PauliSumOperator& comm, double dt,
                                                std::size_t layers, std::vector<double>* betas_out) {
  const LayerUnitary layer(h_p, dt, driver_sign);
  std::vector<StateVector> out;
  out.reserve(layers + 1);
  out.push_back(psi0);
  StateVector psi = psi0;
  if (betas_out) betas_out->clear();
  for (std::size_t s = 0; s < layers; ++s) {
    const double beta = -expectation(psi, comm) / psi.norm_squared();
    if (betas_out) betas_out->push_back(beta);
    layer.apply(psi, beta);
    out.push_back(psi);
  }
  return out;
}

}  // namespace nafqa
