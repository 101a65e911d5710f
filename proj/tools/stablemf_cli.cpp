// Command-line driver: stablemf <subcommand> --config cfg.json [--out DIR]

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "stablemf/battery.hpp"
#include "stablemf/coupling.hpp"
#include "stablemf/experiment.hpp"
#include "stablemf/io.hpp"
#include "stablemf/mean_field.hpp"

namespace {

using namespace stablemf;

constexpr int kExitOk = 0;
constexpr int kExitTestFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::string out;
  std::size_t samples = 1000000;
};

ExperimentConfig load(const Options& opt) {
  ExperimentConfig cfg = load_config(opt.config);
  apply_env_overrides(cfg);
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  write_file(cfg.output_dir, "config.json", config_to_json(cfg) + "\n");
  return cfg;
}

template <class F>
std::string render(F&& f) {
  std::ostringstream s;
  f(s);
  return s.str();
}

int verify_stable(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  BatteryOptions b;
  b.samples = opt.samples;
  b.random_sum_samples = opt.samples;
  b.slot_samples = std::max<std::size_t>(opt.samples / 10, 1000);
  b.seed = cfg.seed;
  b.workers = cfg.resolved_workers();
  const BatteryReport rep = run_distribution_suite(b);
  write_file(cfg.output_dir, "battery_report.json", battery_report_json(rep));
  std::size_t failed = 0;
  for (const auto& e : rep.entries) failed += !e.passed;
  std::printf("%zu checks, %zu failed\n", rep.entries.size(), failed);
  return rep.passed() ? kExitOk : kExitTestFailure;
}

CoupledRun single_run(const ExperimentConfig& cfg, const Model& model) {
  const std::size_t n = cfg.n_grid.front();
  return run_coupled(model, n, cfg.grid_for(n), cfg.substep, cfg.seed, 0, cfg.resolved_workers(), true);
}

int simulate_finite_cmd(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  const auto model = cfg.make_model();
  const std::size_t n = cfg.n_grid.front();
  const SlotGrid grid = cfg.grid_for(n);
  SimulationOptions sim;
  sim.horizon = grid.horizon();
  sim.delta = grid.delta;
  sim.substep = cfg.substep;
  sim.workers = cfg.resolved_workers();
  const Trajectory traj = simulate_finite(*model, n, sim, cfg.seed, 0);
  write_file(cfg.output_dir, "atoms.csv", render([&](std::ostream& o) { write_atoms_csv(o, traj.atoms); }));
  write_file(cfg.output_dir, "trajectory.csv", render([&](std::ostream& o) { write_trajectory_csv(o, traj); }));
  if (traj.clamp_warning)
    std::fprintf(stderr, "warning: %zu of %zu particle-steps clamped at 0\n", traj.clamp_count, traj.particle_steps);
  std::printf("N=%zu delta=%g atoms=%zu accepted=%zu clamps=%zu min_position=%g\n", n, grid.delta,
              traj.atoms.atoms.size(), traj.accepted, traj.clamp_count, traj.min_position);
  return kExitOk;
}

int build_coupling_cmd(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  const auto model = cfg.make_model();
  const CoupledRun run = single_run(cfg, *model);
  write_file(cfg.output_dir, "atoms.csv", render([&](std::ostream& o) { write_atoms_csv(o, run.finite.atoms); }));
  write_file(cfg.output_dir, "slots.csv", render([&](std::ostream& o) { write_slots_csv(o, run.records); }));
  write_file(cfg.output_dir, "identity_report.json", identity_report_json(run.identity));
  std::printf("slots=%zu checked=%zu max_relative_residual=%.3g\n", run.records.size(), run.identity.slots_checked,
              run.identity.max_relative_residual);
  return kExitOk;
}

int simulate_meanfield_cmd(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  const auto model = cfg.make_model();
  const CoupledRun run = single_run(cfg, *model);
  write_file(cfg.output_dir, "slots.csv", render([&](std::ostream& o) { write_slots_csv(o, run.records); }));
  write_file(cfg.output_dir, "trajectory.csv",
             render([&](std::ostream& o) { write_trajectory_csv(o, run.finite); }));
  write_file(cfg.output_dir, "meanfield_trajectory.csv",
             render([&](std::ostream& o) { write_trajectory_csv(o, run.mean_field); }));
  write_file(cfg.output_dir, "mu_f.csv",
             render([&](std::ostream& o) { write_mu_f_csv(o, slot_mean_rates(run.mean_field)); }));
  const ReplicationResult r = summarize(run, cfg.q);
  std::printf("coupled a-distance at T: %.6g\n", r.error);
  return kExitOk;
}

int picard_cmd(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  const PicardReport rep = run_picard_experiment(cfg);
  write_file(cfg.output_dir, "picard_report.json", picard_report_json(rep));
  std::vector<double> means;
  for (const auto& iv : rep.mean_from_max) means.push_back(iv.mean);
  write_file(cfg.output_dir, "mu_f.csv", render([&](std::ostream& o) { write_mu_f_csv(o, means); }));
  std::printf("max ratio %.4g, contraction %s, initializations agree %s\n", rep.max_ratio,
              rep.contraction ? "yes" : "no", rep.initializations_agree ? "yes" : "no");
  return rep.contraction && rep.initializations_agree ? kExitOk : kExitTestFailure;
}

int rate_experiment_cmd(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  const RateReport rep = run_rate_experiment(cfg);
  write_file(cfg.output_dir, "rate_report.json", rate_report_json(rep));
  write_file(cfg.output_dir, "rate_table.csv", render([&](std::ostream& o) { write_rate_table_csv(o, rep); }));
  for (const auto& row : rep.rows)
    std::printf("N=%zu delta=%.4f error=%.5g +- %.2g median=%.5g\n", row.n, row.delta, row.error.mean, row.error.half_width,
                row.median_error);
  if (rep.insufficient_grid) {
    std::printf("insufficient grid: slope undefined\n");
    return kExitOk;
  }
  std::printf("slope %.4f (se %.4f), theory %.4f\n", rep.fit.slope, rep.fit.slope_se, rep.exp_theory);
  return rep.strictly_decreasing && rep.slope_within_band ? kExitOk : kExitTestFailure;
}

int measure_convergence_cmd(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  const ConvergenceReport rep = run_convergence_experiment(cfg);
  write_file(cfg.output_dir, "convergence_report.json", convergence_report_json(rep));
  write_file(cfg.output_dir, "convergence_table.csv",
             render([&](std::ostream& o) { write_convergence_csv(o, rep); }));
  for (const auto& row : rep.rows)
    std::printf("N=%zu W_q<=%.5g +- %.2g\n", row.n, row.wq.mean, row.wq.half_width);
  return rep.monotone_within_half_widths && rep.overall_decrease ? kExitOk : kExitTestFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable-driven mean-field particle simulations"};
  app.require_subcommand(1);
  Options opt;

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"verify-stable", "Distribution battery for the sampler, random sums, slots and the distance function",
       verify_stable},
      {"simulate-finite", "Simulate the finite particle system (first N of the grid)", simulate_finite_cmd},
      {"build-coupling", "Simulate and build the coupled subordinator", build_coupling_cmd},
      {"simulate-meanfield", "Simulate the coupled finite and mean-field systems", simulate_meanfield_cmd},
      {"picard", "Picard iteration for the limit law", picard_cmd},
      {"rate-experiment", "Coupling error against N", rate_experiment_cmd},
      {"measure-convergence", "Mean-field empirical measure against a large reference", measure_convergence_cmd},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opt.config, "JSON config file")->required();
    sub->add_option("--out", opt.out, "Output directory (overrides the config)");
    if (std::string(c.name) == "verify-stable") sub->add_option("--samples", opt.samples, "Draws per battery");
    subs.emplace_back(sub, &c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    for (const auto& [sub, cmd] : subs)
      if (sub->parsed()) return cmd->run(opt);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const NumericalAbort& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitTestFailure;
  }
  return kExitUsage;
}
