// Acceptance suite for the trajectory simulator. Prints one PASS/FAIL line
// per criterion and exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nafqa/error.hpp"
#include "nafqa/feedback.hpp"
#include "nafqa/lindblad.hpp"
#include "nafqa/metrics.hpp"
#include "nafqa/noise.hpp"
#include "nafqa/pauli.hpp"
#include "nafqa/plqt.hpp"
#include "nafqa/qpd.hpp"
#include "nafqa/random.hpp"
#include "nafqa/runner.hpp"
#include "nafqa/state.hpp"

using namespace nafqa;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Every beta and Gamma produced by criteria 1-4, checked by criterion 5.
struct ControlLog {
  struct Entry {
    std::string source;
    double beta;
    double beta_limit;
    double beta_rigorous;
    double gamma_abs;
    double gamma_limit;
  };
  std::vector<Entry> entries;

  void add(const std::string& src, double beta, const NoiseModel& gammas, const ControlBounds& b) {
    double g = 0.0;
    for (const auto& t : gammas.terms()) g = std::max(g, std::abs(t.rate));
    entries.push_back({src, beta, b.beta_lower, b.beta_lower_rigorous, g, b.gamma_abs_upper});
  }
};

ControlLog g_log;

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

PauliSumOperator random_diagonal_hp(int n, SplitMix64& rng) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd h(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) J(i, j) = 2.0 * rng.uniform() - 1.0;
  for (int i = 0; i < n; ++i) h(i) = 2.0 * rng.uniform() - 1.0;
  return build_spin_glass(J, h, n);
}

// Shared setup for criteria 1, 2 and 10: N=2, H_d = sum X, one term XI at
// Gamma = -0.1, T = 1.
struct ToyProblem {
  PauliSumOperator h_p, h_d, comm;
  NoiseModel rates;
  ControlBounds bounds;
};

ToyProblem toy_problem() {
  SplitMix64 rng = substream(11, 0);
  ToyProblem t;
  t.h_p = random_diagonal_hp(2, rng);
  t.h_d = build_driver(2, 1);
  t.comm = i_commutator(t.h_d, t.h_p);
  t.rates = NoiseModel(2, NoiseKind::kEffective, {{PauliString::from_string("XI"), -0.1}});
  t.bounds = control_bounds(norms(t.h_p), norms(t.h_d));
  return t;
}

// Oracle with feedback beta = -<i[H_d,H_p]> at each layer start; returns the
// states and fills the beta schedule.
std::vector<DensityMatrix> toy_oracle(const ToyProblem& t, double dt, std::size_t layers,
                                      std::vector<double>& betas) {
  betas.clear();
  return integrate_layers(DensityMatrix::pure(StateVector::plus(2)), t.h_p, t.h_d, dt, layers, 10,
                          [&](std::size_t, const DensityMatrix& rho) {
                            OracleLayer c;
                            c.beta = -expectation(rho, t.comm) / rho.trace().real();
                            c.rates = t.rates;
                            betas.push_back(c.beta);
                            return c;
                          });
}

Outcome criterion1() {
  const ToyProblem t = toy_problem();
  const double dt = 0.01;
  const std::size_t layers = 100;
  std::vector<double> betas;
  const auto oracle = toy_oracle(t, dt, layers, betas);
  for (double b : betas) g_log.add("c1", b, t.rates, t.bounds);

  EnsembleOptions opts;
  opts.trajectories = 100000;
  opts.seed = 101;
  EstimateRequest req;
  req.density = true;
  const LayerUnitary layer(t.h_p, dt, 1);
  const auto start = std::chrono::steady_clock::now();
  const auto est = run_ensemble(StateVector::plus(2), layer, betas, std::vector<NoiseModel>(layers, t.rates),
                                opts, req);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double td = trace_distance(*est.back().rho, DensityMatrix(2, oracle.back().matrix() /
                                                                      oracle.back().trace().real()));
  Outcome o;
  o.pass = td <= 0.02 && secs <= 120.0;
  o.detail = "trace distance " + fmt("%.5f", td) + " (limit 0.02), runtime " + fmt("%.1f", secs) + " s";
  return o;
}

Outcome criterion2() {
  const ToyProblem t = toy_problem();
  const double dt = 0.01;
  const std::size_t layers = 100;
  std::vector<double> betas;
  toy_oracle(t, dt, layers, betas);
  const std::vector<double> ms = {500, 2000, 8000, 32000};
  const int seeds = 6;
  std::vector<double> deltas;
  const LayerUnitary layer(t.h_p, dt, 1);
  EstimateRequest req;
  for (double m : ms) {
    double acc = 0.0;
    for (int k = 0; k < seeds; ++k) {
      EnsembleOptions opts;
      opts.trajectories = static_cast<std::size_t>(m);
      opts.seed = 900 + static_cast<std::uint64_t>(k);
      const auto est = run_ensemble(StateVector::plus(2), layer, betas, std::vector<NoiseModel>(layers, t.rates),
                                    opts, req);
      double d = 0.0;
      for (std::size_t s = 1; s < est.size(); ++s) d += std::abs(relative_error(est[s]));
      acc += d / static_cast<double>(layers);
    }
    deltas.push_back(acc / seeds);
  }
  const double slope = loglog_slope(ms, deltas);
  Outcome o;
  o.pass = std::abs(slope + 0.5) <= 0.15;
  o.detail = "slope " + fmt("%.3f", slope) + " (target -0.5 +- 0.15); mean |delta| at M=500: " +
             fmt("%.4f", deltas.front()) + ", M=32000: " + fmt("%.5f", deltas.back());
  return o;
}

Outcome criterion3() {
  const PauliSumOperator h_p = build_maxcut({{0, 1}, {1, 2}, {0, 2}}, 3);
  const PauliSumOperator h_d = build_driver(3, 1);
  const PauliSumOperator comm = i_commutator(h_d, h_p);
  const ControlBounds bounds = control_bounds(norms(h_p), norms(h_d));
  std::vector<double> betas;
  const auto states = evolve_closed_feedback(StateVector::plus(3), h_p, 1, comm, 0.01, 60, &betas);
  for (double b : betas) g_log.add("c3", b, NoiseModel(3, NoiseKind::kEffective), bounds);
  double worst = -1e300;
  for (std::size_t s = 1; s < states.size(); ++s)
    worst = std::max(worst, expectation(states[s], h_p) - expectation(states[s - 1], h_p));
  Outcome o;
  o.pass = worst <= 1e-9;
  o.detail = "largest layer-to-layer change of <H_p> " + fmt("%.3e", worst) + " over 60 layers (<H_p> " +
             fmt("%.4f", expectation(states.front(), h_p)) + " -> " + fmt("%.4f", expectation(states.back(), h_p)) +
             ")";
  return o;
}

Outcome criterion4() {
  const NoiseModel intrinsic = load_noise_model(default_noise_path(3));
  double worst = -1e300;
  std::size_t evaluations = 0, truncated = 0, first_stop = 200;
  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    const Problem p = random_spin_glass(3, 404, inst);
    const PauliSumOperator h_d = build_driver(3, -1);
    FeedbackSettings fs;
    fs.clamp = false;
    fs.kickstart = false;
    FeedbackController ctl(p.h_p, h_d, intrinsic, fs);
    const ControlBounds bounds = control_bounds(norms(p.h_p), norms(h_d));
    const Eigen::MatrixXcd hp = p.h_p.to_matrix();
    const Eigen::MatrixXcd hd = h_d.to_matrix();
    std::size_t done = 0;
    try {
      integrate_layers(DensityMatrix::pure(StateVector::plus(3)), p.h_p, h_d, 0.005, 200, 2,
                       [&](std::size_t s, const DensityMatrix& rho) {
                         const ControlState cs = ctl.next(s, rho);
                         g_log.add("c4", cs.beta, cs.gammas, bounds);
                         LindbladGenerator gen(3);
                         gen.set_hamiltonian(hp + cs.beta * hd);
                         gen.add_pauli_channel(cs.gammas);
                         const double dE = (gen.rhs(rho.matrix()) * hp).trace().real() / rho.trace().real();
                         worst = std::max(worst, dE);
                         ++evaluations;
                         done = s;
                         OracleLayer c;
                         c.beta = cs.beta;
                         c.rates = cs.gammas;
                         return c;
                       });
    } catch (const Error&) {
      // The unclamped law drives the pseudo-state to a finite-time blow-up;
      // the oracle guard ends the instance there.
      ++truncated;
      first_stop = std::min(first_stop, done);
    }
  }
  Outcome o;
  o.pass = worst <= 1e-9;
  o.detail = "max d<H_p>/dt " + fmt("%.3e", worst) + " over " + std::to_string(evaluations) +
             " layer boundaries; " + std::to_string(truncated) + " of 20 instances stopped by the oracle guard (earliest at s=" +
             std::to_string(first_stop) + " of 200)";
  return o;
}

Outcome criterion5() {
  struct Counts {
    std::size_t beta = 0, gamma = 0, rigorous = 0;
  };
  std::map<std::string, Counts> viol;
  std::size_t beta_viol = 0, gamma_viol = 0, rigorous_viol = 0;
  for (const auto& e : g_log.entries) {
    auto& v = viol[e.source];
    if (e.beta < e.beta_limit) {
      ++beta_viol;
      ++v.beta;
    }
    if (e.beta < e.beta_rigorous) {
      ++rigorous_viol;
      ++v.rigorous;
    }
    if (e.gamma_abs > e.gamma_limit) {
      ++gamma_viol;
      ++v.gamma;
    }
  }
  Outcome o;
  o.pass = beta_viol == 0 && gamma_viol == 0 && !g_log.entries.empty();
  o.detail = std::to_string(g_log.entries.size()) + " control points, beta violations " + std::to_string(beta_viol) +
             ", Gamma violations " + std::to_string(gamma_viol) + " (beta/Gamma/rigorous beta by source:";
  for (const auto& [src, v] : viol)
    o.detail += " " + src + " " + std::to_string(v.beta) + "/" + std::to_string(v.gamma) + "/" +
                std::to_string(v.rigorous);
  o.detail += "); against -|H_p||H_d|/2: " + std::to_string(rigorous_viol) + " beta violations";
  return o;
}

Outcome criterion6() {
  const PauliSumOperator h_p = [] {
    SplitMix64 rng = substream(66, 0);
    return random_diagonal_hp(2, rng);
  }();
  const PauliSumOperator h = h_p + build_driver(2, 1) * 0.5;
  const NoiseModel model(2, NoiseKind::kIntrinsic,
                         {{PauliString::from_string("XI"), 0.1}, {PauliString::from_string("IY"), 0.05}});
  const DensityMatrix rho0 = DensityMatrix::pure(StateVector(2));
  LindbladGenerator gen(2);
  gen.set_hamiltonian(h);
  gen.add_pauli_channel(model);
  std::vector<double> ts, res;
  for (int k = 0; k <= 8; ++k) {
    const double t = std::pow(10.0, -3.0 + 2.0 * k / 8.0);
    const DensityMatrix rt = integrate_to(rho0, gen, t, t / 200.0);
    const double f = overlap(rho0, rt);
    ts.push_back(t);
    res.push_back(std::abs(f - fidelity_shorttime(rho0, model, t)));
  }
  const double slope = loglog_slope(ts, res);
  double c_max = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) c_max = std::max(c_max, res[i] / (ts[i] * ts[i]));
  Outcome o;
  o.pass = std::abs(slope - 2.0) <= 0.2;
  o.detail = "residual slope " + fmt("%.3f", slope) + " (target 2 +- 0.2), max residual/t^2 " + fmt("%.4f", c_max);
  return o;
}

Outcome criterion7() {
  const PauliString z = PauliString::from_string("Z");
  const NoiseModel intrinsic(1, NoiseKind::kIntrinsic, {{z, 0.1}});
  const NoiseModel engineered(1, NoiseKind::kEngineered, {{z, -0.1}});
  QpdCircuitLayer layer;
  layer.intrinsic = intrinsic;
  layer.plan = plan_layer(engineered);
  PauliSumOperator x(1);
  x.add_term(1.0, "X");
  const QpdResult q = qpd_estimate(DensityMatrix::pure(StateVector::plus(1)), {layer}, x, 100000, 77);
  const bool qpd_ok = std::abs(q.normalized_mean - 1.0) <= 3.0 * q.normalized_std_error;

  // Same generator unraveled as signed trajectories: Z at +0.1 and Z at -0.1.
  const std::vector<JumpOperator> jumps = {{JumpKind::kPauli, z, 0, 0.1, 1}, {JumpKind::kPauli, z, 0, 0.1, -1}};
  EnsembleOptions opts;
  opts.trajectories = 100000;
  opts.seed = 78;
  TrajectoryEnsemble ens(StateVector::plus(1), opts);
  const PauliSumOperator zero(1);
  for (int s = 0; s < 100; ++s)
    ens.for_each([&](SignedTrajectory& t) { step_trajectory_general(t, zero, jumps, 0.01); });
  EstimateRequest req;
  req.observables.push_back(Observable::pauli_sum("X", x));
  const EnsembleEstimate e = ens.estimate(req);
  const double diff = std::abs(e.value("X") - q.normalized_mean);
  const double comb = std::sqrt(e.std_error("X") * e.std_error("X") + q.normalized_std_error * q.normalized_std_error);
  const bool cross_ok = diff <= 3.0 * comb;
  Outcome o;
  o.pass = qpd_ok && cross_ok;
  o.detail = "QPD <X> " + fmt("%.5f", q.normalized_mean) + " +- " + fmt("%.5f", q.normalized_std_error) +
             " (raw " + fmt("%.5f", q.mean) + "), PLQT <X> " + fmt("%.5f", e.value("X")) + " +- " +
             fmt("%.5f", e.std_error("X")) + ", |diff| " + fmt("%.5f", diff) + " vs 3 sigma " + fmt("%.5f", 3 * comb);
  return o;
}

Outcome criterion8() {
  SplitMix64 rng = substream(88, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const PauliSumOperator h_p = random_diagonal_hp(n, rng);
    NoiseModel model(n, NoiseKind::kIntrinsic);
    const std::uint32_t dim = 1u << n;
    for (std::uint32_t zmask = 1; zmask < dim; ++zmask)
      if (rng.uniform() < 0.6) model.add_term(PauliString(n, 0, zmask), 0.1 * rng.uniform());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::uint32_t i = 0; i < dim; ++i)
      for (std::uint32_t j = 0; j < dim; ++j) a(i, j) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
    Eigen::MatrixXcd r = a * a.adjoint();
    r /= r.trace();
    const DensityMatrix rho(n, r);
    LindbladGenerator gen(n);
    gen.add_pauli_channel(model);
    const double dense = (gen.rhs(r) * h_p.to_matrix()).trace().real();
    const double symbolic = dissipator_expectation(rho, model, h_p);
    worst = std::max({worst, std::abs(dense), std::abs(symbolic)});
  }
  Outcome o;
  o.pass = worst <= 1e-12;
  o.detail = "max |Tr(D[rho] H_p)| " + fmt("%.3e", worst) + " over 100 random states";
  return o;
}

Outcome criterion9() {
  RunConfig ring;
  ring.problem = std::filesystem::path(NAFQA_DATA_DIR) / "problems" / "ring5.txt";
  ring.noise = default_noise_path(5);
  ring.dt = 0.07;
  ring.threshold = 0.15;
  ring.trajectories = 12000;
  ring.layers = 41;
  ring.seed = 9;
  ring.set("controlled", "IIYII");
  ring.zero_uncontrolled_lambda = true;
  ring.mode = RunMode::kNoisy;
  const RunResult noisy = run(ring);
  ring.mode = RunMode::kNafqa;
  const RunResult nafqa = run(ring);
  const double ring_margin = nafqa.records.back().r - noisy.records.back().r;
  std::size_t ring_drops = 0;
  for (std::size_t s = 1; s < nafqa.records.size(); ++s) {
    const double se = std::hypot(nafqa.r_std_error[s], nafqa.r_std_error[s - 1]);
    if (nafqa.records[s].r < nafqa.records[s - 1].r - 2.0 * se) ++ring_drops;
  }

  RunConfig sg;
  sg.dt = 0.005;
  sg.layers = 200;
  sg.trajectories = 5000;
  sg.threshold = 0.15;
  sg.instances = 25;
  sg.coupling_seed = 2024;
  sg.seed = 5;
  sg.noise = default_noise_path(3);
  sg.set("controlled", "IYI,ZYI,XII,IXZ,IXI");
  sg.mode = RunMode::kNoisy;
  const SpinGlassSummary sg_noisy = run_spin_glass_ensemble(sg, 3);
  sg.mode = RunMode::kNafqa;
  const SpinGlassSummary sg_nafqa = run_spin_glass_ensemble(sg, 3);
  const double sg_margin = sg_nafqa.r_mean.back() - sg_noisy.r_mean.back();
  std::size_t sg_drops = 0;
  for (std::size_t s = 1; s < sg_nafqa.r_mean.size(); ++s) {
    const double se = std::hypot(sg_nafqa.r_std_error[s], sg_nafqa.r_std_error[s - 1]);
    if (sg_nafqa.r_mean[s] < sg_nafqa.r_mean[s - 1] - 2.0 * se) ++sg_drops;
  }

  Outcome o;
  o.pass = ring_margin > 0.0 && sg_margin > 0.0 && ring_drops == 0 && sg_drops == 0;
  o.detail = "ring5 final r nafqa " + fmt("%.4f", nafqa.records.back().r) + " vs noisy " +
             fmt("%.4f", noisy.records.back().r) + ", drops " + std::to_string(ring_drops) +
             "; spin glass final mean r nafqa " + fmt("%.4f", sg_nafqa.r_mean.back()) + " vs noisy " +
             fmt("%.4f", sg_noisy.r_mean.back()) + ", drops " + std::to_string(sg_drops);
  return o;
}

Outcome criterion10() {
  const ToyProblem t = toy_problem();
  const double T = 1.0;
  auto discrepancy = [&](double dt) {
    const auto layers = static_cast<std::size_t>(std::llround(T / dt));
    const double beta = 0.5;
    DensityMatrix mean = DensityMatrix::pure(StateVector::plus(2));
    const LayerUnitary layer(t.h_p, dt, 1);
    for (std::size_t s = 0; s < layers; ++s) mean = expected_layer_map(mean, layer, beta, t.rates);
    const auto oracle = integrate_layers(DensityMatrix::pure(StateVector::plus(2)), t.h_p, t.h_d, dt, layers, 20,
                                         [&](std::size_t, const DensityMatrix&) {
                                           OracleLayer c;
                                           c.beta = beta;
                                           c.rates = t.rates;
                                           return c;
                                         });
    return trace_distance(DensityMatrix(2, mean.matrix() / mean.trace().real()),
                          DensityMatrix(2, oracle.back().matrix() / oracle.back().trace().real()));
  };
  const double d1 = discrepancy(0.02);
  const double d2 = discrepancy(0.01);
  const double ratio = d1 / d2;
  Outcome o;
  o.pass = ratio >= 1.6 && ratio <= 2.4;
  o.detail = "endpoint discrepancy dt=0.02: " + fmt("%.3e", d1) + ", dt=0.01: " + fmt("%.3e", d2) + ", ratio " +
             fmt("%.3f", ratio);
  return o;
}

}  // namespace

// Optional arguments select criteria by number, e.g. `acceptance 1 4`.
int main(int argc, char** argv) {
  struct Item {
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Item> items = {
      {"1 trajectory ensemble matches RK4 oracle", criterion1},
      {"2 relative trace error scales as 1/sqrt(M)", criterion2},
      {"3 closed-system energy is non-increasing", criterion3},
      {"4 open-system energy derivative is non-positive", criterion4},
      {"5 control bounds hold on all recorded controls", criterion5},
      {"6 short-time fidelity residual is quadratic", criterion6},
      {"7 QPD estimate is unbiased and matches trajectories", criterion7},
      {"8 dephasing dissipator leaves diagonal energy unchanged", criterion8},
      {"9 noise-assisted runs beat noisy runs", criterion9},
      {"10 Trotter discrepancy is first order in dt", criterion10},
  };
  std::vector<bool> selected(items.size(), argc <= 1);
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k >= 1 && k <= static_cast<int>(items.size())) selected[k - 1] = true;
  }
  int failures = 0, ran = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!selected[i]) continue;
    const auto& it = items[i];
    ++ran;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = it.fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", it.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
