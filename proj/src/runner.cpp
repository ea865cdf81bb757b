#include "nafqa/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "nafqa/error.hpp"
#include "nafqa/lindblad.hpp"
#include "nafqa/plqt.hpp"
#include "nafqa/qpd.hpp"

#ifndef NAFQA_DATA_DIR
#define NAFQA_DATA_DIR "data"
#endif

namespace nafqa {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": integer out of range: '" + v + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Setup {
  Problem problem;
  NoiseModel intrinsic;
  int driver_sign = 1;
  PauliSumOperator h_d;
  GroundSpace ground;
  std::vector<PauliString> controlled;
  FeedbackSettings settings;
  ControlBounds bounds;
};

Setup make_setup(const RunConfig& config, RunMode law) {
  Setup s;
  s.problem = config.problem_override ? *config.problem_override : load_problem(config.problem);
  const int n = s.problem.num_qubits;
  s.driver_sign = config.driver_sign ? *config.driver_sign : (s.problem.spin_glass ? -1 : 1);
  s.h_d = build_driver(n, s.driver_sign);

  if (law == RunMode::kIdeal) {
    s.intrinsic = NoiseModel(n, NoiseKind::kIntrinsic);
  } else if (config.noise_override) {
    s.intrinsic = *config.noise_override;
  } else {
    const auto path = config.noise.empty() ? default_noise_path(n) : config.noise;
    if (path.empty())
      throw ConfigError("mode " + mode_name(config.mode) + " needs a noise model; no bundled default for N=" +
                        std::to_string(n));
    s.intrinsic = load_noise_model(path);
  }
  if (!s.intrinsic.empty() && s.intrinsic.num_qubits() != n)
    throw ConfigError("noise model has " + std::to_string(s.intrinsic.num_qubits()) + " qubits, problem has " +
                      std::to_string(n));
  if (s.intrinsic.empty()) s.intrinsic = NoiseModel(n, NoiseKind::kIntrinsic);

  if (!config.controlled.empty()) {
    s.controlled = config.controlled;
  } else if (!config.controlled_text.empty()) {
    for (const auto& item : split(config.controlled_text, ',')) s.controlled.push_back(PauliString::from_string(item));
  }
  for (const auto& p : s.controlled)
    if (p.num_qubits() != n) throw ConfigError("controlled string " + p.str() + " does not match N=" + std::to_string(n));
  if (law == RunMode::kIdeal) s.controlled.clear();

  s.ground = ground_space(s.problem.h_p);
  if (std::abs(s.ground.energy) <= 1e-9) throw ConfigError("problem ground energy is zero; r is undefined");

  s.settings.nafqa = law == RunMode::kNafqa;
  s.settings.threshold = config.threshold;
  s.settings.clamp = config.clamp;
  s.settings.controlled = s.controlled;
  s.settings.zero_uncontrolled_lambda = config.zero_uncontrolled_lambda;
  s.settings.kickstart = config.kickstart;
  s.settings.shots = config.shots;
  s.settings.shot_seed = config.seed ^ 0x5eedULL;
  if (s.controlled.empty() && law != RunMode::kIdeal) s.controlled = s.intrinsic.paulis();
  s.bounds = control_bounds(norms(s.problem.h_p), norms(s.h_d));
  return s;
}

EstimateRequest make_request(const Setup& s, const FeedbackController& ctl) {
  EstimateRequest req;
  req.observables.push_back(Observable::pauli_sum("H_p", s.problem.h_p));
  req.observables.push_back(Observable::diagonal("P_gs", s.ground.projector));
  req.paulis = ctl.required_paulis();
  req.density = s.problem.num_qubits <= kMaxDensityQubits;
  return req;
}

void fill_controls(RunRecord& rec, const ControlState& cs, const std::vector<PauliString>& controlled) {
  rec.beta = cs.beta;
  for (const auto& p : controlled) rec.gammas.emplace_back(p.str(), cs.gammas.rate(p));
}

void check_controls(RunResult& res, const ControlState& cs, const Setup& s, double dt) {
  for (auto& b : validate_bounds(cs, res.bounds, dt, s.intrinsic)) {
    if (b.name == "dt_upper") continue;
    if (!b.ok) {
      b.name = "layer " + std::to_string(cs.layer) + ": " + b.name;
      res.violations.push_back(b);
    }
  }
  double budget = 0.0;
  for (const auto& t : cs.gammas.terms()) budget += std::abs(t.rate) * dt;
  if (budget > kJumpBudgetWarn)
    res.warnings.push_back("layer " + std::to_string(cs.layer) + ": jump probability sum " + fmt(budget) +
                           " exceeds " + fmt(kJumpBudgetWarn));
}

RunResult start_result(const Setup& s, const RunConfig& config) {
  RunResult res;
  res.bounds = s.bounds;
  res.ground_energy = s.ground.energy;
  for (const auto& p : s.controlled) res.gamma_names.push_back("gamma_" + p.str());
  if (config.dt > s.bounds.dt_upper)
    res.warnings.push_back("dt " + fmt(config.dt) + " exceeds the Trotter-step bound " + fmt(s.bounds.dt_upper));
  return res;
}

void add_overhead(RunResult& res, const ControlState& cs, const NoiseModel& intrinsic, double dt) {
  const NoiseModel nu = compute_nu(cs.gammas, intrinsic);
  res.integral_overhead *= integral_overhead({nu}, dt);
}

RunResult run_ideal(const RunConfig& config) {
  Setup s = make_setup(config, RunMode::kIdeal);
  FeedbackController ctl(s.problem.h_p, s.h_d, s.intrinsic, s.settings);
  RunResult res = start_result(s, config);
  const LayerUnitary layer(s.problem.h_p, config.dt, s.driver_sign);
  StateVector psi = StateVector::plus(s.problem.num_qubits);
  EstimateRequest req = make_request(s, ctl);
  req.density = false;
  for (std::size_t step = 0; step <= config.layers; ++step) {
    const EnsembleEstimate est = exact_estimate(psi, req);
    const ControlState cs = ctl.next(step, est);
    RunRecord rec;
    rec.s = step;
    rec.t = static_cast<double>(step) * config.dt;
    rec.energy = est.value("H_p");
    rec.r = approximation_ratio(rec.energy, s.ground.energy);
    rec.phi = est.value("P_gs");
    rec.purity = 1.0;
    rec.trace = psi.norm_squared();
    rec.delta = relative_error(rec.trace);
    fill_controls(rec, cs, s.controlled);
    check_controls(res, cs, s, config.dt);
    res.records.push_back(rec);
    res.controls.push_back(cs);
    res.r_std_error.push_back(0.0);
    if (step < config.layers) layer.apply(psi, cs.beta);
  }
  return res;
}

RunRecord record_from(std::size_t step, double dt, const EnsembleEstimate& est, const Setup& s) {
  RunRecord rec;
  rec.s = step;
  rec.t = static_cast<double>(step) * dt;
  rec.energy = est.value("H_p");
  rec.r = approximation_ratio(rec.energy, s.ground.energy);
  rec.phi = est.value("P_gs");
  rec.phi_unphysical = rec.phi < -1e-12 || rec.phi > 1.0 + 1e-12;
  rec.purity = est.rho ? purity(*est.rho) : std::numeric_limits<double>::quiet_NaN();
  rec.trace = est.trace();
  rec.delta = relative_error(est);
  rec.aborted_trajectories = est.aborted;
  return rec;
}

// Shared loop for the trajectory modes. `advance` moves the ensemble by one
// layer under the given controls.
template <typename Advance>
RunResult run_trajectories(const RunConfig& config, RunMode law, Advance&& advance) {
  Setup s = make_setup(config, law);
  FeedbackController ctl(s.problem.h_p, s.h_d, s.intrinsic, s.settings);
  RunResult res = start_result(s, config);
  const LayerUnitary layer(s.problem.h_p, config.dt, s.driver_sign);
  EnsembleOptions opts;
  opts.trajectories = config.trajectories;
  opts.seed = config.seed;
  opts.threads = config.threads;
  opts.scaling = config.scaling;
  TrajectoryEnsemble ens(StateVector::plus(s.problem.num_qubits), opts);
  const EstimateRequest req = make_request(s, ctl);
  for (std::size_t step = 0; step <= config.layers; ++step) {
    const EnsembleEstimate est = ens.estimate(req);
    if (!est.valid())
      throw NormalizationError("ensemble normalization " + fmt(est.normalization) + " is not positive at layer " +
                                   std::to_string(step),
                               step);
    const ControlState cs = ctl.next(step, est);
    RunRecord rec = record_from(step, config.dt, est, s);
    fill_controls(rec, cs, s.controlled);
    check_controls(res, cs, s, config.dt);
    res.records.push_back(rec);
    res.controls.push_back(cs);
    res.r_std_error.push_back(est.std_error("H_p") / std::abs(s.ground.energy));
    if (step < config.layers) {
      add_overhead(res, cs, s.intrinsic, config.dt);
      advance(ens, layer, cs, s);
    }
  }
  return res;
}

RunResult run_oracle(const RunConfig& config, const RunResult* replay) {
  const RunMode law = config.oracle_law == RunMode::kOracle ? RunMode::kNafqa : config.oracle_law;
  Setup s = make_setup(config, law == RunMode::kQpd ? RunMode::kNafqa : law);
  const int n = s.problem.num_qubits;
  if (n > kMaxOracleQubits) throw ConfigError("oracle mode supports N <= 6");
  FeedbackController ctl(s.problem.h_p, s.h_d, s.intrinsic, s.settings);
  RunResult res = start_result(s, config);
  const Eigen::MatrixXcd hp = s.problem.h_p.to_matrix();
  const Eigen::MatrixXcd hd = s.h_d.to_matrix();
  DensityMatrix rho = DensityMatrix::pure(StateVector::plus(n));
  const double h = config.dt / static_cast<double>(config.oracle_substeps);
  for (std::size_t step = 0; step <= config.layers; ++step) {
    ControlState cs;
    if (replay) {
      if (step >= replay->controls.size()) throw ConfigError("replayed run has fewer layers than the config");
      cs = replay->controls[step];
    } else {
      cs = ctl.next(step, rho);
    }
    RunRecord rec;
    rec.s = step;
    rec.t = static_cast<double>(step) * config.dt;
    const double tr = rho.trace().real();
    rec.energy = expectation(rho, s.problem.h_p) / tr;
    rec.r = approximation_ratio(rec.energy, s.ground.energy);
    rec.phi = success_probability(rho, s.ground);
    rec.purity = purity(DensityMatrix(n, rho.matrix() / tr));
    rec.trace = tr;
    rec.delta = relative_error(tr);
    fill_controls(rec, cs, s.controlled);
    check_controls(res, cs, s, config.dt);
    res.records.push_back(rec);
    res.controls.push_back(cs);
    res.r_std_error.push_back(0.0);
    if (step == config.layers) break;
    add_overhead(res, cs, s.intrinsic, config.dt);
    LindbladGenerator gen(n);
    gen.set_hamiltonian(hp + cs.beta * hd);
    gen.add_pauli_channel(cs.gammas);
    for (std::size_t k = 0; k < config.oracle_substeps; ++k) rk4_step(rho, gen, h);
  }
  return res;
}

}  // namespace

RunMode parse_mode(const std::string& name) {
  if (name == "ideal") return RunMode::kIdeal;
  if (name == "noisy") return RunMode::kNoisy;
  if (name == "nafqa") return RunMode::kNafqa;
  if (name == "oracle") return RunMode::kOracle;
  if (name == "qpd") return RunMode::kQpd;
  throw ConfigError("unknown mode '" + name + "' (expected ideal, noisy, nafqa, oracle or qpd)");
}

std::string mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::kIdeal: return "ideal";
    case RunMode::kNoisy: return "noisy";
    case RunMode::kNafqa: return "nafqa";
    case RunMode::kOracle: return "oracle";
    case RunMode::kQpd: return "qpd";
  }
  return "?";
}

Problem parse_problem(std::istream& in, const std::string& source) {
  std::vector<Edge> edges;
  std::vector<std::tuple<int, int, double>> couplings;
  std::vector<std::pair<int, double>> fields;
  int declared = -1;
  int max_index = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    std::string extra;
    if (kw == "qubits") {
      if (!(ls >> declared) || declared < 1 || declared > kMaxQubits)
        throw ConfigError(where + "qubits needs an integer in [1, 12]");
    } else if (kw == "edge") {
      Edge e;
      if (!(ls >> e.u >> e.v)) throw ConfigError(where + "expected 'edge i j'");
      edges.push_back(e);
      max_index = std::max({max_index, e.u, e.v});
    } else if (kw == "coupling") {
      int i = 0, j = 0;
      double J = 0.0;
      if (!(ls >> i >> j >> J)) throw ConfigError(where + "expected 'coupling i j J'");
      if (i == j) throw ConfigError(where + "coupling needs two distinct sites");
      couplings.emplace_back(i, j, J);
      max_index = std::max({max_index, i, j});
    } else if (kw == "field") {
      int i = 0;
      double hv = 0.0;
      if (!(ls >> i >> hv)) throw ConfigError(where + "expected 'field i h'");
      fields.emplace_back(i, hv);
      max_index = std::max(max_index, i);
    } else {
      throw ConfigError(where + "unknown keyword '" + kw + "'");
    }
    if (ls >> extra) throw ConfigError(where + "trailing token '" + extra + "'");
  }
  Problem p;
  p.num_qubits = declared > 0 ? declared : max_index + 1;
  if (p.num_qubits < 1) throw ConfigError(source + ": problem defines no qubits");
  if (!edges.empty() && (!couplings.empty() || !fields.empty()))
    throw ConfigError(source + ": mixes Maxcut edges with spin-glass couplings");
  try {
    if (!couplings.empty() || !fields.empty()) {
      const int n = p.num_qubits;
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
      Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
      for (const auto& [i, j, v] : couplings) {
        if (i < 0 || j < 0 || i >= n || j >= n) throw ConfigError("coupling index outside [0, N)");
        J(std::min(i, j), std::max(i, j)) += v;
      }
      for (const auto& [i, v] : fields) {
        if (i < 0 || i >= n) throw ConfigError("field index outside [0, N)");
        h(i) += v;
      }
      p.h_p = build_spin_glass(J, h, n);
      p.spin_glass = true;
    } else {
      p.h_p = build_maxcut(edges, p.num_qubits);
    }
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return p;
}

Problem load_problem(const std::filesystem::path& path) {
  if (path.empty()) throw ConfigError("no problem file given");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file " + path.string());
  return parse_problem(in, path.string());
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "mode") {
    mode = parse_mode(v);
  } else if (key == "problem") {
    problem = v;
  } else if (key == "noise") {
    noise = v;
  } else if (key == "layers") {
    layers = parse_uint(key, v);
  } else if (key == "dt") {
    dt = parse_double(key, v);
  } else if (key == "threshold") {
    threshold = parse_double(key, v);
  } else if (key == "trajectories") {
    trajectories = parse_uint(key, v);
  } else if (key == "seed") {
    seed = parse_uint(key, v);
  } else if (key == "controlled") {
    controlled.clear();
    controlled_text = v;
  } else if (key == "out") {
    out = v;
  } else if (key == "shots") {
    shots = parse_uint(key, v);
  } else if (key == "threads") {
    threads = static_cast<unsigned>(parse_uint(key, v));
  } else if (key == "driver_sign") {
    const double d = parse_double(key, v);
    if (d != 1.0 && d != -1.0) throw ConfigError("driver_sign must be +1 or -1");
    driver_sign = static_cast<int>(d);
  } else if (key == "zero_uncontrolled_lambda") {
    zero_uncontrolled_lambda = parse_bool(key, v);
  } else if (key == "kickstart") {
    kickstart = parse_bool(key, v);
  } else if (key == "clamp") {
    clamp = parse_bool(key, v);
  } else if (key == "scaling") {
    if (v == "trace_preserving") {
      scaling = NoJumpScaling::kTracePreserving;
    } else if (v == "algorithm1") {
      scaling = NoJumpScaling::kAlgorithm1;
    } else {
      throw ConfigError("scaling must be trace_preserving or algorithm1");
    }
  } else if (key == "oracle_substeps") {
    oracle_substeps = parse_uint(key, v);
  } else if (key == "oracle_law") {
    oracle_law = parse_mode(v);
    if (oracle_law == RunMode::kOracle || oracle_law == RunMode::kQpd)
      throw ConfigError("oracle_law must be ideal, noisy or nafqa");
  } else if (key == "instances") {
    instances = parse_uint(key, v);
  } else if (key == "coupling_seed") {
    coupling_seed = parse_uint(key, v);
  } else if (key == "sweep") {
    sweep = v;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void RunConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
  if (layers < 1) throw ConfigError("layers must be >= 1");
  if (trajectories < 1) throw ConfigError("trajectories must be >= 1");
  if (!(threshold >= 0.0)) throw ConfigError("threshold must be >= 0");
  if (oracle_substeps < 1) throw ConfigError("oracle_substeps must be >= 1");
  if (instances < 1) throw ConfigError("instances must be >= 1");
  if (problem.empty() && !problem_override) throw ConfigError("no problem file given");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    try {
      cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  RunConfig cfg = parse_config(in, path.string());
  // Relative paths inside a config are relative to the config file.
  const auto base = path.parent_path();
  if (!cfg.problem.empty() && cfg.problem.is_relative() && !std::filesystem::exists(cfg.problem))
    cfg.problem = base / cfg.problem;
  if (!cfg.noise.empty() && cfg.noise.is_relative() && !std::filesystem::exists(cfg.noise))
    cfg.noise = base / cfg.noise;
  return cfg;
}

std::filesystem::path default_noise_path(int num_qubits) {
  const char* env = std::getenv("NAFQA_DATA_DIR");
  const std::filesystem::path dir = env ? env : NAFQA_DATA_DIR;
  if (num_qubits == 5) return dir / "noise" / "default5.txt";
  if (num_qubits == 3) return dir / "noise" / "spin_glass3.txt";
  return {};
}

RunResult run(const RunConfig& config) {
  config.validate();
  switch (config.mode) {
    case RunMode::kIdeal:
      return run_ideal(config);
    case RunMode::kNoisy:
    case RunMode::kNafqa:
      return run_trajectories(config, config.mode,
                              [](TrajectoryEnsemble& ens, const LayerUnitary& layer, const ControlState& cs,
                                 const Setup&) { ens.step(layer, cs.beta, cs.gammas); });
    case RunMode::kQpd: {
      const double dt = config.dt;
      return run_trajectories(config, RunMode::kNafqa,
                              [dt](TrajectoryEnsemble& ens, const LayerUnitary& layer, const ControlState& cs,
                                   const Setup& s) {
                                const NoiseModel nu = compute_nu(cs.gammas, s.intrinsic);
                                const QpdLayerPlan plan = plan_layer(nu, dt);
                                jump_budget(s.intrinsic, dt);
                                ens.for_each([&](SignedTrajectory& t) {
                                  layer.apply(t.state, cs.beta);
                                  apply_jump_layer(t, s.intrinsic, dt);
                                  apply_factor_layer(t, plan.factors, plan.trace_factor);
                                });
                              });
    }
    case RunMode::kOracle:
      return run_oracle(config, nullptr);
  }
  throw ConfigError("unhandled mode");
}

RunResult replay_on_oracle(const RunConfig& config, const RunResult& reference) {
  config.validate();
  return run_oracle(config, &reference);
}

void write_csv(std::ostream& out, const RunResult& result) {
  out << "s,t,r,phi,purity,trace,delta,beta";
  for (const auto& g : result.gamma_names) out << ',' << g;
  out << '\n';
  for (const auto& r : result.records) {
    out << r.s << ',' << fmt(r.t) << ',' << fmt(r.r) << ',' << fmt(r.phi) << ',' << fmt(r.purity) << ','
        << fmt(r.trace) << ',' << fmt(r.delta) << ',' << fmt(r.beta);
    for (const auto& [name, g] : r.gammas) out << ',' << fmt(g);
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const RunResult& result) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_csv(out, result);
}

std::vector<SweepPoint> sweep(const RunConfig& config) {
  const auto eq = config.sweep.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep must look like key=v1,v2,...");
  const std::string key = trim(config.sweep.substr(0, eq));
  const auto values = split(config.sweep.substr(eq + 1), ',');
  if (values.empty()) throw ConfigError("sweep has no values");
  std::vector<SweepPoint> out;
  for (const auto& v : values) {
    RunConfig c = config;
    c.sweep.clear();
    c.set(key, v);
    if (!config.out.empty()) {
      auto p = config.out;
      p.replace_filename(config.out.stem().string() + "_" + key + v + config.out.extension().string());
      c.out = p;
    }
    SweepPoint pt;
    pt.value = v;
    pt.result = run(c);
    double acc = 0.0;
    for (std::size_t s = 1; s < pt.result.records.size(); ++s) acc += std::abs(pt.result.records[s].delta);
    pt.mean_abs_delta = acc / static_cast<double>(std::max<std::size_t>(1, pt.result.records.size() - 1));
    if (!c.out.empty()) write_csv(c.out, pt.result);
    out.push_back(std::move(pt));
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs two or more matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConfigError("log-log fit needs positive values");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Problem random_spin_glass(int num_qubits, std::uint64_t seed, std::uint64_t index, std::size_t* redraws) {
  SplitMix64 rng = substream(seed, index);
  for (std::size_t attempt = 0;; ++attempt) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(num_qubits, num_qubits);
    Eigen::VectorXd h(num_qubits);
    for (int m = 0; m < num_qubits; ++m)
      for (int n = m + 1; n < num_qubits; ++n) J(m, n) = 2.0 * rng.uniform() - 1.0;
    for (int l = 0; l < num_qubits; ++l) h(l) = 2.0 * rng.uniform() - 1.0;
    Problem p;
    p.num_qubits = num_qubits;
    p.h_p = build_spin_glass(J, h, num_qubits);
    p.spin_glass = true;
    if (std::abs(ground_space(p.h_p).energy) > 1e-9) {
      if (redraws) *redraws += attempt;
      return p;
    }
  }
}

SpinGlassSummary run_spin_glass_ensemble(const RunConfig& config, int num_qubits) {
  if (config.instances < 1) throw ConfigError("instances must be >= 1");
  SpinGlassSummary out;
  for (std::size_t i = 0; i < config.instances; ++i) {
    RunConfig c = config;
    c.problem_override = random_spin_glass(num_qubits, config.coupling_seed, i, &out.resampled);
    c.seed = substream(config.seed, i)();
    out.instances.push_back(run(c));
  }
  const std::size_t rows = out.instances.front().records.size();
  const double k = static_cast<double>(out.instances.size());
  auto reduce = [&](auto get, std::vector<double>& mean, std::vector<double>& se) {
    mean.assign(rows, 0.0);
    se.assign(rows, 0.0);
    for (std::size_t s = 0; s < rows; ++s) {
      double a = 0, aa = 0;
      for (const auto& r : out.instances) {
        const double v = get(r.records[s]);
        a += v;
        aa += v * v;
      }
      mean[s] = a / k;
      se[s] = k > 1 ? std::sqrt(std::max(0.0, (aa - k * mean[s] * mean[s]) / (k - 1)) / k) : 0.0;
    }
  };
  reduce([](const RunRecord& r) { return r.r; }, out.r_mean, out.r_std_error);
  reduce([](const RunRecord& r) { return r.phi; }, out.phi_mean, out.phi_std_error);
  reduce([](const RunRecord& r) { return r.beta; }, out.beta_mean, out.beta_std_error);
  return out;
}

}  // namespace nafqa
