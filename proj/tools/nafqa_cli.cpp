// nafqa: command-line front end for the trajectory simulator.
//
//   nafqa run          --config FILE [overrides]
//   nafqa sweep        --config FILE --sweep trajectories=500,2000
//   nafqa spin-glass   --config FILE [--instances 25]
//   nafqa oracle-check --config FILE
//
// Exit codes: 0 success, 2 configuration error, 3 normalization failure,
// 4 numeric guard.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nafqa/error.hpp"
#include "nafqa/runner.hpp"
#include "nafqa/state.hpp"

namespace {

struct Overrides {
  std::string config, mode, problem, noise, out, controlled, sweep, scaling;
  std::optional<double> dt, threshold;
  std::optional<std::size_t> layers, trajectories, shots, instances;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "key = value config file");
  app->add_option("--mode", o.mode, "ideal | noisy | nafqa | oracle | qpd");
  app->add_option("--problem", o.problem, "problem file (edge / coupling / field lines)");
  app->add_option("--noise", o.noise, "noise model file (<PauliString> <rate> lines)");
  app->add_option("--dt", o.dt, "Trotter step");
  app->add_option("--layers", o.layers, "number of layers");
  app->add_option("--trajectories", o.trajectories, "trajectory count M");
  app->add_option("--threshold", o.threshold, "clamp threshold th >= 0");
  app->add_option("--seed", o.seed, "RNG seed");
  app->add_option("--shots", o.shots, "shots per observable (0: exact)");
  app->add_option("--threads", o.threads, "worker threads (0: all cores)");
  app->add_option("--controlled", o.controlled, "comma-separated controlled Pauli strings");
  app->add_option("--scaling", o.scaling, "trace_preserving | algorithm1");
  app->add_option("--out", o.out, "CSV output path");
}

nafqa::RunConfig build_config(const Overrides& o) {
  nafqa::RunConfig cfg = o.config.empty() ? nafqa::RunConfig{} : nafqa::load_config(o.config);
  if (!o.mode.empty()) cfg.set("mode", o.mode);
  if (!o.problem.empty()) cfg.problem = o.problem;
  if (!o.noise.empty()) cfg.noise = o.noise;
  if (!o.out.empty()) cfg.out = o.out;
  if (!o.controlled.empty()) cfg.set("controlled", o.controlled);
  if (!o.sweep.empty()) cfg.sweep = o.sweep;
  if (!o.scaling.empty()) cfg.set("scaling", o.scaling);
  if (o.dt) cfg.dt = *o.dt;
  if (o.threshold) cfg.threshold = *o.threshold;
  if (o.layers) cfg.layers = *o.layers;
  if (o.trajectories) cfg.trajectories = *o.trajectories;
  if (o.shots) cfg.shots = *o.shots;
  if (o.instances) cfg.instances = *o.instances;
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  return cfg;
}

void report(const nafqa::RunResult& res) {
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& v : res.violations)
    std::cerr << "bound: " << v.name << " value " << v.value << " limit " << v.limit << '\n';
  const auto& last = res.records.back();
  std::printf("final s=%zu r=%.6f phi=%.6f purity=%.6f trace=%.6f beta=%.6f\n", last.s, last.r, last.phi,
              last.purity, last.trace, last.beta);
}

int cmd_run(const Overrides& o) {
  const auto cfg = build_config(o);
  const auto res = nafqa::run(cfg);
  if (!cfg.out.empty()) {
    nafqa::write_csv(cfg.out, res);
  } else {
    nafqa::write_csv(std::cout, res);
  }
  report(res);
  return 0;
}

int cmd_sweep(const Overrides& o) {
  const auto cfg = build_config(o);
  const auto points = nafqa::sweep(cfg);
  std::printf("value,mean_abs_delta,final_r\n");
  std::vector<double> x, y;
  for (const auto& p : points) {
    std::printf("%s,%.8g,%.8g\n", p.value.c_str(), p.mean_abs_delta, p.result.records.back().r);
    try {
      x.push_back(std::stod(p.value));
      y.push_back(p.mean_abs_delta);
    } catch (const std::exception&) {
    }
  }
  if (x.size() == points.size() && x.size() >= 2) {
    bool positive = true;
    for (double v : y) positive = positive && v > 0.0;
    if (positive) std::printf("loglog_slope,%.4f\n", nafqa::loglog_slope(x, y));
  }
  return 0;
}

int cmd_spin_glass(const Overrides& o) {
  auto cfg = build_config(o);
  const auto sum = nafqa::run_spin_glass_ensemble(cfg);
  std::FILE* f = stdout;
  if (!cfg.out.empty()) {
    f = std::fopen(cfg.out.string().c_str(), "w");
    if (!f) throw nafqa::ConfigError("cannot write " + cfg.out.string());
  }
  std::fprintf(f, "s,t,r_mean,r_se,phi_mean,phi_se,beta_mean,beta_se\n");
  for (std::size_t s = 0; s < sum.r_mean.size(); ++s)
    std::fprintf(f, "%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", s, static_cast<double>(s) * cfg.dt,
                 sum.r_mean[s], sum.r_std_error[s], sum.phi_mean[s], sum.phi_std_error[s], sum.beta_mean[s],
                 sum.beta_std_error[s]);
  if (f != stdout) std::fclose(f);
  std::fprintf(stderr, "instances=%zu resampled=%zu final r=%.6f +- %.6f\n", sum.instances.size(), sum.resampled,
               sum.r_mean.back(), sum.r_std_error.back());
  return 0;
}

int cmd_oracle_check(const Overrides& o) {
  auto cfg = build_config(o);
  if (cfg.mode == nafqa::RunMode::kOracle || cfg.mode == nafqa::RunMode::kIdeal) cfg.mode = nafqa::RunMode::kNafqa;
  const auto traj = nafqa::run(cfg);
  const auto oracle = nafqa::replay_on_oracle(cfg, traj);
  double max_dr = 0.0, max_dphi = 0.0;
  for (std::size_t s = 0; s < traj.records.size(); ++s) {
    max_dr = std::max(max_dr, std::abs(traj.records[s].r - oracle.records[s].r));
    max_dphi = std::max(max_dphi, std::abs(traj.records[s].phi - oracle.records[s].phi));
  }
  std::printf("mode=%s layers=%zu max|dr|=%.6g max|dphi|=%.6g\n", nafqa::mode_name(cfg.mode).c_str(), cfg.layers,
              max_dr, max_dphi);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noise-assisted feedback quantum algorithm simulator"};
  app.require_subcommand(1);
  Overrides o;
  auto* run = app.add_subcommand("run", "run one configuration and write its CSV");
  auto* sw = app.add_subcommand("sweep", "run one job per value of a config key");
  auto* sg = app.add_subcommand("spin-glass", "random spin-glass instances, mean and standard error");
  auto* oc = app.add_subcommand("oracle-check", "compare a trajectory run with the dense oracle");
  for (auto* sub : {run, sw, sg, oc}) add_common(sub, o);
  sw->add_option("--sweep", o.sweep, "key=v1,v2,...");
  sg->add_option("--instances", o.instances, "instance count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(o);
    if (*sw) return cmd_sweep(o);
    if (*sg) return cmd_spin_glass(o);
    if (*oc) return cmd_oracle_check(o);
  } catch (const nafqa::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
