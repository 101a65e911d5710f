#include "stablemf/battery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stablemf/coupling.hpp"
#include "stablemf/distance.hpp"
#include "stablemf/finite_system.hpp"
#include "stablemf/model.hpp"
#include "stablemf/parallel.hpp"
#include "stablemf/stable.hpp"

namespace stablemf {

namespace {

std::string fmt(const char* pattern, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

}  // namespace

bool BatteryReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

void BatteryReport::add(std::string name, double statistic, double tolerance) {
  add(std::move(name), statistic, tolerance, std::abs(statistic) <= tolerance);
}

void BatteryReport::add(std::string name, double statistic, double tolerance, bool passed) {
  entries.push_back({std::move(name), statistic, tolerance, passed});
}

void BatteryReport::append(const BatteryReport& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

double laplace_band(std::size_t n) { return 3.0 / (2.0 * std::sqrt(static_cast<double>(n))); }

BatteryReport laplace_check(const std::string& label, const std::vector<double>& xs, double alpha,
                            const std::vector<double>& lambdas, double target_shift) {
  BatteryReport rep;
  std::vector<double> values(xs.size());
  for (double lambda : lambdas) {
    for (std::size_t i = 0; i < xs.size(); ++i) values[i] = std::exp(-lambda * xs[i]);
    const double dev = tree_mean(values) - stable_laplace(alpha + target_shift, lambda);
    rep.add(label + fmt(" lambda=%g", lambda, 0.0), dev, laplace_band(xs.size()));
  }
  return rep;
}

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("correlation needs paired samples");
  const double mx = tree_mean(x), my = tree_mean(y);
  std::vector<double> sxy(x.size()), sxx(x.size()), syy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy[i] = (x[i] - mx) * (y[i] - my);
    sxx[i] = (x[i] - mx) * (x[i] - mx);
    syy[i] = (y[i] - my) * (y[i] - my);
  }
  const double vx = tree_sum(sxx), vy = tree_sum(syy);
  if (vx == 0.0 || vy == 0.0) return 0.0;
  return tree_sum(sxy) / std::sqrt(vx * vy);
}

BatteryReport stable_laplace_battery(const BatteryOptions& opt) {
  BatteryReport rep;
  for (std::size_t a = 0; a < opt.alphas.size(); ++a) {
    const double alpha = opt.alphas[a];
    const auto ys =
        sample_stable_batch(alpha, opt.samples, opt.seed, stream_id(StreamDomain::battery, a, 0), opt.workers);
    rep.append(laplace_check(fmt("stable alpha=%g", alpha, 0.0), ys, alpha, opt.lambdas, opt.target_shift));
  }
  return rep;
}

BatteryReport random_sum_battery(const BatteryOptions& opt) {
  const StableParams p(opt.random_sum_alpha, opt.random_sum_alpha / 2.0);
  const std::size_t n = opt.random_sum_samples;
  constexpr std::size_t kChunk = 1 << 14;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> ys(n), counts(n);
  parallel_for(chunks, opt.workers, [&](std::size_t c) {
    RngStream rng(opt.seed, stream_id(StreamDomain::battery, 100, c));
    for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) {
      const RandomSum r = random_sum_scaled(p, PoissonCount{opt.random_sum_mean}, rng);
      ys[i] = r.rescaled;
      counts[i] = static_cast<double>(r.count);
    }
  });
  BatteryReport rep =
      laplace_check("random-sum rescaled", ys, p.alpha(), opt.lambdas, opt.target_shift);
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = std::exp(-ys[i]);
  rep.add("random-sum corr(P, exp(-Y))", correlation(counts, e), 3.0 / std::sqrt(static_cast<double>(n)));
  return rep;
}

BatteryReport slot_increment_battery(const BatteryOptions& opt) {
  const StableParams p(0.5, 0.475);
  const ConstantModel model(p, ConstantParams{0.0, opt.slot_rate, 0.0, UniformInitial{}});
  SimulationOptions sim;
  sim.horizon = 1.0;
  sim.delta = opt.slot_delta;
  sim.record_events = false;
  const std::size_t per_run = SlotGrid::make(sim.horizon, sim.delta).slots;
  const std::size_t runs = (opt.slot_samples + per_run - 1) / per_run;
  std::vector<double> increments(runs * per_run), ys(runs * per_run), counts(runs * per_run);
  const double scale = std::pow(sim.delta, -p.inv_alpha());
  parallel_for(runs, opt.workers, [&](std::size_t r) {
    const auto traj = simulate_finite(model, opt.slot_particles, sim, opt.seed + 1, r);
    const auto records = build_slot_records(traj, model, opt.seed + 1, r);
    for (std::size_t k = 0; k < per_run; ++k) {
      increments[r * per_run + k] = scale * records[k].dS;
      ys[r * per_run + k] = records[k].Y;
      counts[r * per_run + k] = static_cast<double>(records[k].P);
    }
  });
  BatteryReport rep = laplace_check("slot dS/delta^(1/alpha)", increments, p.alpha(), opt.lambdas, opt.target_shift);
  rep.add("slot corr(P, Y)", correlation(counts, ys), 3.0 / std::sqrt(static_cast<double>(ys.size())));
  std::vector<double> ey(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) ey[i] = std::exp(-ys[i]);
  rep.add("slot corr(P, exp(-Y))", correlation(counts, ey), 3.0 / std::sqrt(static_cast<double>(ys.size())));
  return rep;
}

BatteryReport metric_battery(const BatteryOptions& opt) {
  BatteryReport rep;
  RngStream rng(opt.seed, stream_id(StreamDomain::battery, 200, 0));
  std::vector<double> qs(opt.metric_q_count);
  for (auto& q : qs) q = rng.uniform();
  std::vector<AssumptionReport> reports(qs.size());
  parallel_for(qs.size(), opt.workers, [&](std::size_t i) {
    reports[i] = check_assumption_a(qs[i], opt.metric_grid, opt.seed + 1000 + i);
  });
  for (const auto& r : reports)
    for (const auto& c : r.checks)
      rep.add(fmt("metric q=%.6f ", r.q, 0.0) + c.name, c.worst_violation, 0.0, c.passed);
  return rep;
}

BatteryReport run_distribution_suite(const BatteryOptions& opt) {
  BatteryReport rep = stable_laplace_battery(opt);
  rep.append(random_sum_battery(opt));
  rep.append(slot_increment_battery(opt));
  rep.append(metric_battery(opt));
  return rep;
}

}  // namespace stablemf
