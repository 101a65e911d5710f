#include "stablemf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stablemf/parallel.hpp"

namespace stablemf {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

InitialLaw parse_initial(const json& j) {
  check_keys(j, {"kind", "lo", "hi", "mu", "sigma"}, "model.initial");
  std::string kind = "uniform";
  read(j, "kind", kind);
  if (kind == "uniform") {
    UniformInitial u;
    read(j, "lo", u.lo);
    read(j, "hi", u.hi);
    return u;
  }
  if (kind == "lognormal") {
    LogNormalInitial l;
    read(j, "mu", l.mu);
    read(j, "sigma", l.sigma);
    return l;
  }
  throw ConfigError("unknown initial law '" + kind + "'");
}

json initial_to_json(const InitialLaw& law) {
  if (const auto* u = std::get_if<UniformInitial>(&law)) return {{"kind", "uniform"}, {"lo", u->lo}, {"hi", u->hi}};
  const auto& l = std::get<LogNormalInitial>(law);
  return {{"kind", "lognormal"}, {"mu", l.mu}, {"sigma", l.sigma}};
}

ModelConfig parse_model(const json& j) {
  check_keys(j, {"kind", "kappa", "cap", "rate_min", "rate_max", "jump0", "drift", "rate", "jump", "initial"},
             "model");
  ModelConfig m;
  std::string kind = "reference";
  read(j, "kind", kind);
  if (kind == "reference") {
    m.kind = ModelConfig::Kind::reference;
    read(j, "kappa", m.reference.kappa);
    read(j, "cap", m.reference.cap);
    read(j, "rate_min", m.reference.rate_min);
    read(j, "rate_max", m.reference.rate_max);
    read(j, "jump0", m.reference.jump0);
    if (j.contains("initial")) m.reference.initial = parse_initial(j.at("initial"));
  } else if (kind == "constant") {
    m.kind = ModelConfig::Kind::constant;
    read(j, "drift", m.constant.drift);
    read(j, "rate", m.constant.rate);
    read(j, "jump", m.constant.jump);
    if (j.contains("initial")) m.constant.initial = parse_initial(j.at("initial"));
  } else {
    throw ConfigError("unknown model kind '" + kind + "'");
  }
  return m;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    StableParams p(alpha, q);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (n_grid.empty()) throw ConfigError("N grid must not be empty");
  if (n_grid.size() > 255) throw ConfigError("N grid longer than 255 entries");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2) throw ConfigError("every N must be at least 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ConfigError("N grid must be strictly increasing");
  }
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (replications < 1 || replications > 65535) throw ConfigError("replications must lie in [1, 65535]");
  if (convergence_replications < 1 || convergence_replications > 65535)
    throw ConfigError("convergence_replications must lie in [1, 65535]");
  if (reference_factor < 1) throw ConfigError("reference_factor must be at least 1");
  if (substep < 0.0) throw ConfigError("substep must be nonnegative");
  try {
    for (std::size_t n : n_grid) {
      const SlotGrid g = grid_for(n);
      if (substep > g.delta) throw ConfigError("substep must not exceed delta");
    }
    SlotGrid::make(picard.horizon, picard.delta);
    make_model();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (picard.particles < 2) throw ConfigError("picard.particles must be at least 2");
  if (picard.iterations < 2) throw ConfigError("picard.iterations must be at least 2");
  if (picard.replications < 2 || picard.replications > 65535)
    throw ConfigError("picard.replications must lie in [2, 65535]");
}

StableParams ExperimentConfig::params() const { return StableParams(alpha, q); }

std::unique_ptr<Model> ExperimentConfig::make_model() const {
  if (model.kind == ModelConfig::Kind::reference) return std::make_unique<ReferenceModel>(params(), model.reference);
  return std::make_unique<ConstantModel>(params(), model.constant);
}

SlotGrid ExperimentConfig::grid_for(std::size_t particles) const {
  if (delta) return SlotGrid::make(horizon, *delta);
  return delta_rule_grid(particles, alpha, q, horizon);
}

int ExperimentConfig::resolved_workers() const { return workers > 0 ? workers : default_workers(); }

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"schema_version", "alpha", "q", "model", "n_grid", "horizon", "replications", "delta", "substep",
              "seed", "workers", "output_dir", "reference_factor", "convergence_replications", "picard"},
             "config");
  int version = kConfigSchemaVersion;
  read(j, "schema_version", version);
  if (version != kConfigSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(version));
  ExperimentConfig cfg;
  read(j, "alpha", cfg.alpha);
  read(j, "q", cfg.q);
  if (j.contains("model")) cfg.model = parse_model(j.at("model"));
  read(j, "n_grid", cfg.n_grid);
  read(j, "horizon", cfg.horizon);
  read(j, "replications", cfg.replications);
  if (j.contains("delta")) {
    const auto& d = j.at("delta");
    if (d.is_string() && d.get<std::string>() == "rule") {
      cfg.delta.reset();
    } else if (d.is_number()) {
      cfg.delta = d.get<double>();
    } else {
      throw ConfigError("delta must be \"rule\" or a number");
    }
  }
  read(j, "substep", cfg.substep);
  read(j, "seed", cfg.seed);
  read(j, "workers", cfg.workers);
  read(j, "output_dir", cfg.output_dir);
  read(j, "reference_factor", cfg.reference_factor);
  read(j, "convergence_replications", cfg.convergence_replications);
  if (j.contains("picard")) {
    const auto& p = j.at("picard");
    check_keys(p, {"horizon", "delta", "particles", "iterations", "replications"}, "picard");
    read(p, "horizon", cfg.picard.horizon);
    read(p, "delta", cfg.picard.delta);
    read(p, "particles", cfg.picard.particles);
    read(p, "iterations", cfg.picard.iterations);
    read(p, "replications", cfg.picard.replications);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json m;
  if (cfg.model.kind == ModelConfig::Kind::reference) {
    const auto& r = cfg.model.reference;
    m = {{"kind", "reference"}, {"kappa", r.kappa},       {"cap", r.cap},
         {"rate_min", r.rate_min}, {"rate_max", r.rate_max}, {"jump0", r.jump0},
         {"initial", initial_to_json(r.initial)}};
  } else {
    const auto& c = cfg.model.constant;
    m = {{"kind", "constant"}, {"drift", c.drift}, {"rate", c.rate}, {"jump", c.jump},
         {"initial", initial_to_json(c.initial)}};
  }
  json j = {{"schema_version", kConfigSchemaVersion},
            {"alpha", cfg.alpha},
            {"q", cfg.q},
            {"model", m},
            {"n_grid", cfg.n_grid},
            {"horizon", cfg.horizon},
            {"replications", cfg.replications},
            {"substep", cfg.substep},
            {"seed", cfg.seed},
            {"workers", cfg.workers},
            {"output_dir", cfg.output_dir},
            {"reference_factor", cfg.reference_factor},
            {"convergence_replications", cfg.convergence_replications},
            {"picard",
             {{"horizon", cfg.picard.horizon},
              {"delta", cfg.picard.delta},
              {"particles", cfg.picard.particles},
              {"iterations", cfg.picard.iterations},
              {"replications", cfg.picard.replications}}}};
  if (cfg.delta)
    j["delta"] = *cfg.delta;
  else
    j["delta"] = "rule";
  return j.dump(2);
}

void apply_env_overrides(ExperimentConfig& cfg) {
  if (const char* s = std::getenv("STABLEMF_SEED"); s && *s) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (*end != '\0') throw ConfigError("STABLEMF_SEED must be an unsigned integer");
    cfg.seed = v;
  }
  if (const char* o = std::getenv("STABLEMF_OUT"); o && *o) cfg.output_dir = o;
}

double rate_exponent_theory(double alpha, double q) {
  const double r = q / alpha;
  return (1.0 - r) * (1.0 - r) - r * r * q / (2.0 + q);
}

double rate_exponent_secondary(double q) {
  if (q < 0.5) return -q;
  if (q > 0.5) return -0.5;
  return 0.0;
}

Interval mean_interval(const std::vector<double>& xs) {
  Interval iv;
  if (xs.empty()) return iv;
  iv.mean = tree_mean(xs);
  if (xs.size() < 2) return iv;
  std::vector<double> dev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = (xs[i] - iv.mean) * (xs[i] - iv.mean);
  const double var = tree_sum(dev) / static_cast<double>(xs.size() - 1);
  iv.half_width = 1.96 * std::sqrt(var / static_cast<double>(xs.size()));
  return iv;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

LogLogFit fit_loglog(const std::vector<double>& ns, const std::vector<double>& values) {
  LogLogFit fit;
  const std::size_t m = ns.size();
  if (m != values.size() || m < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(ns[i] > 0.0 && values[i] > 0.0)) return fit;
    mx += std::log(ns[i]);
    my += std::log(values[i]);
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(ns[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(values[i]) - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.defined = true;
  if (m > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = std::log(values[i]) - (fit.intercept + fit.slope * std::log(ns[i]));
      ssr += r * r;
    }
    fit.slope_se = std::sqrt(ssr / static_cast<double>(m - 2) / sxx);
  }
  return fit;
}

CoupledRun run_coupled(const Model& model, std::size_t particles, const SlotGrid& grid, double substep,
                       std::uint64_t seed, std::uint64_t replication, int workers, bool record_events) {
  CoupledRun run;
  const auto initial = draw_initial_positions(model, particles, seed, replication);
  const auto atoms = generate_atoms(particles, grid.horizon(), model.bounds().rate_max, model.params().alpha(),
                                    seed, replication);
  SimulationOptions sim;
  sim.horizon = grid.horizon();
  sim.delta = grid.delta;
  sim.substep = substep;
  sim.workers = workers;
  sim.record_events = record_events;
  run.finite = simulate_finite(model, initial, atoms, sim);
  run.records = build_slot_records(run.finite, model, seed, replication);
  run.identity = verify_interaction_identity(run.finite, run.records, model);
  run.sub = paste_subordinator(run.records, grid.delta);
  MeanFieldOptions mf;
  mf.substep = substep;
  mf.workers = workers;
  mf.record_events = record_events;
  run.mean_field = simulate_mean_field(model, run.sub, atoms, initial, mf);
  return run;
}

ReplicationResult summarize(const CoupledRun& run, double q) {
  ReplicationResult r;
  const auto x = run.finite.final_state();
  const auto y = run.mean_field.final_state();
  r.error = coupled_a_distance(x, y, q);
  const DistanceFunctionA a(q);
  r.tagged_error = std::abs(a(x[0]) - a(y[0]));
  r.r_total_q = run.identity.r_total_q;
  r.r_live_q = run.identity.r_live_q;
  r.r_frozen_q = run.identity.r_frozen_q;
  r.max_identity_residual = run.identity.max_relative_residual;
  r.closure_residual = run.identity.closure_residual;
  r.clamps = run.finite.clamp_count + run.mean_field.clamp_count;
  r.particle_steps = run.finite.particle_steps + run.mean_field.particle_steps;
  for (const auto& rec : run.records) r.fresh_slots += rec.provenance == SlotProvenance::fresh_draw;
  return r;
}

std::uint64_t replication_key(std::size_t grid_index, std::size_t replication) {
  if (grid_index > 0xFF || replication > 0xFFFF) throw std::out_of_range("replication key out of range");
  return (static_cast<std::uint64_t>(grid_index) << 16) | replication;
}

RateReport run_rate_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto model = cfg.make_model();
  const int workers = cfg.resolved_workers();
  RateReport rep;
  rep.alpha = cfg.alpha;
  rep.q = cfg.q;
  rep.exp_theory = rate_exponent_theory(cfg.alpha, cfg.q);
  rep.exp_secondary = rate_exponent_secondary(cfg.q);

  for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
    const std::size_t n = cfg.n_grid[g];
    const SlotGrid grid = cfg.grid_for(n);
    std::vector<ReplicationResult> results(cfg.replications);
    parallel_for(cfg.replications, workers, [&](std::size_t r) {
      const CoupledRun run = run_coupled(*model, n, grid, cfg.substep, cfg.seed, replication_key(g, r), 1, false);
      results[r] = summarize(run, cfg.q);
    });
    RateRow row;
    row.n = n;
    row.delta = grid.delta;
    row.replications = cfg.replications;
    std::vector<double> err, tagged, rt, rl, rf;
    std::size_t clamps = 0, steps = 0;
    for (const auto& r : results) {
      err.push_back(r.error);
      tagged.push_back(r.tagged_error);
      rt.push_back(r.r_total_q);
      rl.push_back(r.r_live_q);
      rf.push_back(r.r_frozen_q);
      row.max_identity_residual = std::max(row.max_identity_residual, r.max_identity_residual);
      clamps += r.clamps;
      steps += r.particle_steps;
      row.fresh_slots += r.fresh_slots;
    }
    row.error = mean_interval(err);
    row.median_error = median(err);
    row.tagged_error = mean_interval(tagged);
    row.r_total_q = mean_interval(rt);
    row.r_live_q = mean_interval(rl);
    row.r_frozen_q = mean_interval(rf);
    row.clamp_fraction = steps > 0 ? static_cast<double>(clamps) / static_cast<double>(steps) : 0.0;
    rep.rows.push_back(row);
  }

  std::vector<double> ns, means;
  for (const auto& row : rep.rows) {
    ns.push_back(static_cast<double>(row.n));
    means.push_back(row.error.mean);
  }
  rep.insufficient_grid = rep.rows.size() < 2;
  if (!rep.insufficient_grid) {
    rep.fit = fit_loglog(ns, means);
    rep.strictly_decreasing = true;
    for (std::size_t i = 1; i < means.size(); ++i)
      if (!(means[i] < means[i - 1])) rep.strictly_decreasing = false;
    rep.slope_within_band = rep.fit.defined && rep.fit.slope <= 0.5 * rep.exp_theory;
  }
  return rep;
}

ConvergenceReport run_convergence_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto model = cfg.make_model();
  const StableParams params = cfg.params();
  const int workers = cfg.resolved_workers();
  const double rate_max = model->bounds().rate_max;
  const std::size_t sizes = cfg.n_grid.size();
  const std::size_t reps = cfg.convergence_replications;
  MeanFieldOptions mf;
  mf.substep = cfg.substep;
  mf.record_events = false;

  // One subordinator path per replication on the union of all delta(N)
  // grids, so every N in a replication sees the same S.
  std::vector<SlotGrid> grids;
  std::vector<double> times;
  for (std::size_t n : cfg.n_grid) {
    grids.push_back(cfg.grid_for(n));
    for (std::size_t k = 0; k <= grids.back().slots; ++k) times.push_back(grids.back().time(k));
  }
  std::sort(times.begin(), times.end());
  std::vector<double> fine;
  for (double t : times)
    if (fine.empty() || t - fine.back() > 1e-12 * cfg.horizon) fine.push_back(t);
  fine.back() = cfg.horizon;

  std::vector<std::vector<double>> wq(sizes, std::vector<double>(reps)), wa = wq;
  parallel_for(reps, workers, [&](std::size_t r) {
    const std::uint64_t key = replication_key(0, r);
    RngStream sub_rng(cfg.seed, stream_id(StreamDomain::subordinator, key, 0));
    const IncrementPath path = sample_subordinator(params, fine, sub_rng);
    for (std::size_t g = 0; g < sizes; ++g) {
      const std::size_t n = cfg.n_grid[g];
      const std::size_t n_ref = cfg.reference_factor * n;
      const SlotGrid& grid = grids[g];
      CoupledSubordinator sub;
      sub.delta = grid.delta;
      sub.increments.assign(grid.slots, 0.0);
      sub.provenance.assign(grid.slots, SlotProvenance::fresh_draw);
      for (std::size_t i = 0; i < path.increments.size(); ++i) {
        const double mid = 0.5 * (path.grid[i] + path.grid[i + 1]);
        sub.increments[grid.slot_of(mid)] += path.increments[i];
      }
      const auto init = draw_initial_positions(*model, n, cfg.seed, key);
      const auto atoms = generate_atoms(n, grid.horizon(), rate_max, cfg.alpha, cfg.seed, key);
      const auto init_ref =
          draw_initial_positions(*model, n_ref, cfg.seed, key, StreamDomain::reference_initial);
      const auto atoms_ref = generate_atoms(n_ref, grid.horizon(), rate_max, cfg.alpha, cfg.seed, key,
                                            StreamDomain::reference_atoms);
      const Trajectory small = simulate_mean_field(*model, sub, atoms, init, mf);
      const Trajectory large = simulate_mean_field(*model, sub, atoms_ref, init_ref, mf);
      const EmpiricalMeasure mu = empirical_conditional_law(small, grid.horizon());
      const EmpiricalMeasure nu = empirical_conditional_law(large, grid.horizon());
      wq[g][r] = quantile_coupling_cost(mu, nu, TransportCost::power(cfg.q));
      wa[g][r] = quantile_coupling_cost(mu, nu, TransportCost::a_distance(cfg.q));
    }
  });

  ConvergenceReport rep;
  for (std::size_t g = 0; g < sizes; ++g) {
    ConvergenceRow row;
    row.n = cfg.n_grid[g];
    row.reference_n = cfg.reference_factor * row.n;
    row.delta = grids[g].delta;
    row.wq = mean_interval(wq[g]);
    row.wa = mean_interval(wa[g]);
    row.replications = reps;
    rep.rows.push_back(row);
  }
  // Replications share S and particle streams across N, so trends are
  // judged on paired differences.
  auto paired = [&](std::size_t from, std::size_t to) {
    std::vector<double> d(reps);
    for (std::size_t r = 0; r < reps; ++r) d[r] = wq[to][r] - wq[from][r];
    return mean_interval(d);
  };
  rep.monotone_within_half_widths = true;
  for (std::size_t g = 1; g < sizes; ++g) {
    const Interval d = paired(g - 1, g);
    rep.steps.push_back(d);
    if (d.mean > d.half_width) rep.monotone_within_half_widths = false;
  }
  if (sizes >= 2) {
    const Interval d = paired(0, sizes - 1);
    rep.overall_change = d;
    rep.overall_decrease = d.mean < 0.0;
    rep.overall_significant = d.mean + d.half_width < 0.0;
  }
  return rep;
}

PicardReport run_picard_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto model = cfg.make_model();
  const StableParams params = cfg.params();
  const int workers = cfg.resolved_workers();
  const ModelBounds bounds = model->bounds();
  const PicardConfig& pc = cfg.picard;
  const SlotGrid grid = SlotGrid::make(pc.horizon, pc.delta);
  std::vector<double> times(grid.slots + 1);
  for (std::size_t k = 0; k <= grid.slots; ++k) times[k] = grid.time(k);
  MeanFieldOptions mf;
  mf.substep = cfg.substep;
  mf.record_events = false;

  struct RepResult {
    std::vector<double> distances;
    std::vector<double> final_max, final_min;
  };
  std::vector<RepResult> results(pc.replications);
  parallel_for(pc.replications, workers, [&](std::size_t r) {
    const std::uint64_t key = replication_key(0, r);
    RngStream sub_rng(cfg.seed, stream_id(StreamDomain::subordinator, key, 1));
    const CoupledSubordinator sub = subordinator_from_path(sample_subordinator(params, times, sub_rng));
    const auto init = draw_initial_positions(*model, pc.particles, cfg.seed, key);
    const auto atoms = generate_atoms(pc.particles, grid.horizon(), bounds.rate_max, cfg.alpha, cfg.seed, key);
    auto iterate = [&](double start, std::vector<double>* distances) {
      PicardGuess guess = picard_constant_guess(start, grid.slots);
      PicardStep prev = picard_iterate(*model, sub, guess, atoms, init, mf);
      for (std::size_t it = 1; it < pc.iterations; ++it) {
        PicardStep next = picard_iterate(*model, sub, prev.next, atoms, init, mf);
        if (distances) distances->push_back(sup_coupled_a_distance(prev.traj, next.traj, cfg.q));
        prev = std::move(next);
      }
      return prev.next.mean;
    };
    results[r].final_max = iterate(bounds.rate_max, &results[r].distances);
    results[r].final_min = iterate(bounds.rate_min, nullptr);
  });

  PicardReport rep;
  rep.horizon = pc.horizon;
  rep.delta = grid.delta;
  rep.particles = pc.particles;
  rep.replications = pc.replications;
  const std::size_t steps = pc.iterations - 1;
  for (std::size_t i = 0; i < steps; ++i) {
    std::vector<double> d(pc.replications);
    for (std::size_t r = 0; r < pc.replications; ++r) d[r] = results[r].distances[i];
    rep.distances.push_back(tree_mean(d));
  }
  for (std::size_t i = 1; i < rep.distances.size(); ++i) {
    if (rep.distances[i - 1] == 0.0) break;
    rep.ratios.push_back(rep.distances[i] / rep.distances[i - 1]);
  }
  // Landing exactly on the fixed point also counts as contracting.
  const bool exact = std::find(rep.distances.begin(), rep.distances.end(), 0.0) != rep.distances.end();
  rep.contraction = !rep.ratios.empty() || exact;
  for (double ratio : rep.ratios) {
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (!(ratio < 1.0)) rep.contraction = false;
  }

  rep.initializations_agree = true;
  for (std::size_t k = 0; k < grid.slots; ++k) {
    std::vector<double> a(pc.replications), b(pc.replications);
    for (std::size_t r = 0; r < pc.replications; ++r) {
      a[r] = results[r].final_max[k];
      b[r] = results[r].final_min[k];
    }
    rep.mean_from_max.push_back(mean_interval(a));
    rep.mean_from_min.push_back(mean_interval(b));
    const double gap = std::abs(rep.mean_from_max.back().mean - rep.mean_from_min.back().mean);
    rep.max_mean_gap = std::max(rep.max_mean_gap, gap);
    if (gap > std::hypot(rep.mean_from_max.back().half_width, rep.mean_from_min.back().half_width))
      rep.initializations_agree = false;
  }
  return rep;
}

}  // namespace stablemf
