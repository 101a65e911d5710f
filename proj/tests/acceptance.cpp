// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "stablemf/battery.hpp"
#include "stablemf/coupling.hpp"
#include "stablemf/distance.hpp"
#include "stablemf/experiment.hpp"
#include "stablemf/finite_system.hpp"
#include "stablemf/io.hpp"
#include "stablemf/mean_field.hpp"
#include "stablemf/stable.hpp"
#include "stablemf/transport.hpp"

using namespace stablemf;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string printf_string(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string printf_string(const char* fmt, ...) {
  char buf[1024];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

// Laplace transform of the one-sided stable law, written out here so the
// target does not come from the library under test.
double laplace_target(double alpha, double lambda) { return std::exp(-std::pow(lambda, alpha)); }

Outcome worst_of(const BatteryReport& rep) {
  Outcome o{rep.passed(), ""};
  double worst = 0.0;
  std::string name;
  for (const auto& e : rep.entries) {
    const double r = e.tolerance > 0.0 ? std::abs(e.statistic) / e.tolerance : (e.passed ? 0.0 : INFINITY);
    if (r >= worst) {
      worst = r;
      name = e.name;
    }
  }
  o.detail = printf_string("%zu checks, worst |stat|/tol = %.3f (%s)", rep.entries.size(), worst, name.c_str());
  return o;
}

// 1. Sampler Laplace battery with an independent target.
Outcome criterion1() {
  const std::size_t n = 1000000;
  const double band = 3.0 / (2.0 * std::sqrt(static_cast<double>(n)));
  double worst = 0.0;
  bool ok = true;
  const double alphas[] = {0.3, 0.5, 0.7, 0.9};
  for (std::size_t a = 0; a < 4; ++a) {
    const auto ys = sample_stable_batch(alphas[a], n, 11, stream_id(StreamDomain::battery, a, 0));
    for (double lambda : {0.5, 1.0, 2.0, 4.0}) {
      long double s = 0.0L;
      for (double y : ys) s += std::exp(-lambda * y);
      const double dev = std::abs(static_cast<double>(s / n) - laplace_target(alphas[a], lambda));
      worst = std::max(worst, dev);
      ok = ok && dev <= band;
    }
  }
  return {ok, printf_string("max deviation %.5f <= %.4f over 16 (alpha, lambda)", worst, band)};
}

// 2. Random sums with Poisson(5) counts.
Outcome criterion2() {
  const std::size_t n = 1000000;
  const StableParams p(0.5, 0.25);
  RngStream rng(12, stream_id(StreamDomain::battery, 1, 0));
  std::vector<double> ys(n), counts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RandomSum r = random_sum_scaled(p, PoissonCount{5.0}, rng);
    ys[i] = r.rescaled;
    counts[i] = static_cast<double>(r.count);
  }
  const double band = 3.0 / (2.0 * std::sqrt(static_cast<double>(n)));
  double worst = 0.0;
  bool ok = true;
  for (double lambda : {0.5, 1.0, 2.0, 4.0}) {
    long double s = 0.0L;
    for (double y : ys) s += std::exp(-lambda * y);
    const double dev = std::abs(static_cast<double>(s / n) - laplace_target(0.5, lambda));
    worst = std::max(worst, dev);
    ok = ok && dev <= band;
  }
  // Correlation computed directly.
  long double mp = 0, me = 0;
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = std::exp(-ys[i]);
    mp += counts[i];
    me += e[i];
  }
  mp /= n;
  me /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (counts[i] - mp) * (e[i] - me);
    sxx += (counts[i] - mp) * (counts[i] - mp);
    syy += (e[i] - me) * (e[i] - me);
  }
  const double corr = static_cast<double>(sxy / std::sqrt(sxx * syy));
  const double corr_band = 3.0 / std::sqrt(static_cast<double>(n));
  ok = ok && std::abs(corr) <= corr_band;
  return {ok, printf_string("max Laplace deviation %.5f <= %.4f; corr(P, e^-Y) = %.5f within +-%.4f", worst, band,
                            corr, corr_band)};
}

// 3. Exact slot identity on ReferenceModel runs (N = 200, T = 1). The
// frozen counts and sums are recomputed here from the raw atoms.
std::string criterion3_slots;
Outcome criterion3(int workers) {
  const StableParams p(0.5, 0.475);
  const ReferenceModel model(p, ReferenceParams{});
  const std::size_t n = 200;
  const SlotGrid grid = delta_rule_grid(n, p.alpha(), p.q(), 1.0);
  double worst = 0.0;
  std::size_t checked = 0;
  bool ok = true;
  std::ostringstream csv;
  for (std::size_t rep = 0; rep < 20; ++rep) {
    SimulationOptions sim;
    sim.horizon = 1.0;
    sim.delta = grid.delta;
    sim.workers = workers;
    const Trajectory traj = simulate_finite(model, n, sim, 13, rep);
    const auto records = build_slot_records(traj, model, 13, rep);
    verify_interaction_identity(traj, records, model);
    write_slots_csv(csv, records);
    std::vector<std::int64_t> count(grid.slots, 0);
    std::vector<double> usum(grid.slots, 0.0);
    for (const Atom& a : traj.atoms.atoms) {
      std::size_t k = static_cast<std::size_t>(std::ceil(a.s / grid.delta)) - 1;
      k = std::min(k, grid.slots - 1);
      if (a.z <= model.rate(traj.state(k)[a.j])) {
        ++count[k];
        usum[k] += a.u;
      }
    }
    for (std::size_t k = 0; k < grid.slots; ++k) {
      const SlotRecord& r = records[k];
      ok = ok && r.P == count[k];
      if (r.P == 0) {
        ok = ok && r.A == 0.0 && r.provenance == SlotProvenance::fresh_draw;
        continue;
      }
      const double a_k = usum[k] / std::pow(static_cast<double>(n), 1.0 / p.alpha());
      ok = ok && std::abs(a_k - r.A) <= 1e-15 * a_k;
      const double lhs = r.A * std::pow(static_cast<double>(n) * grid.delta / static_cast<double>(r.P), 1.0 / p.alpha());
      const double rel = std::abs(lhs - r.dS) / r.dS;
      worst = std::max(worst, rel);
      ++checked;
    }
  }
  criterion3_slots = csv.str();
  ok = ok && checked > 0 && worst <= 0x1p-40;
  return {ok, printf_string("%zu nonempty slots, max relative residual %.3g <= 2^-40 = %.3g", checked, worst,
                            0x1p-40)};
}

// 4. Pooled constant-rate slot increments.
Outcome criterion4() {
  BatteryOptions opt;
  opt.slot_samples = 100000;
  opt.seed = 14;
  return worst_of(slot_increment_battery(opt));
}

// 5. Distance-function invariants for 50 random q.
Outcome criterion5() {
  BatteryOptions opt;
  opt.metric_q_count = 50;
  opt.metric_grid = 10000;
  opt.seed = 15;
  const BatteryReport rep = metric_battery(opt);
  // Branch continuity at x = 1 checked directly from the closed forms.
  double worst = 0.0;
  RngStream rng(15, stream_id(StreamDomain::battery, 300, 0));
  for (int i = 0; i < 50; ++i) {
    const double q = rng.uniform();
    const double c1 = q + q * std::abs(q - 1.0), c2 = 0.5 * q * std::abs(q - 1.0);
    const double left = c1 - c2, right = 1.0 + (q + 0.5 * q * std::abs(q - 1.0) - 1.0);
    const double dleft = c1 - 2.0 * c2, dright = q;
    worst = std::max({worst, std::abs(left - right), std::abs(dleft - dright)});
    const DistanceFunctionA a(q);
    worst = std::max(worst, std::abs(a(1.0) - right));
  }
  Outcome o = worst_of(rep);
  o.passed = o.passed && worst <= 4e-16;
  o.detail += printf_string("; branch mismatch %.2g", worst);
  return o;
}

// 6. Assignment solver against exhaustive permutations.
Outcome criterion6() {
  RngStream rng(16, stream_id(StreamDomain::battery, 400, 0));
  bool ok = true;
  double worst_gap = 0.0;
  std::size_t couplings = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 8.0);
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = 5.0 * rng.uniform();
    for (auto& v : y) v = 5.0 * rng.uniform();
    const double q = 0.05 + 0.9 * rng.uniform();
    const TransportCost cost = inst % 2 == 0 ? TransportCost::power(q) : TransportCost::a_distance(q);
    auto c = [&](double a, double b) {
      if (cost.kind == TransportCost::Kind::power_q) return std::pow(std::abs(a - b), q);
      const DistanceFunctionA af(q);
      return std::abs(af(a) - af(b));
    };
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double brute = INFINITY;
    do {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += c(x[i], y[perm[i]]);
      brute = std::min(brute, s / static_cast<double>(n));
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double exact = wasserstein_q_exact(EmpiricalMeasure(x), EmpiricalMeasure(y), cost);
    const double gap = std::abs(exact - brute);
    worst_gap = std::max(worst_gap, gap);
    ok = ok && gap <= 1e-12 * std::max(1.0, brute);
    // Random couplings: random permutations and random doubly stochastic mixtures.
    for (int s = 0; s < 20; ++s) {
      std::vector<std::size_t> sigma(n);
      std::iota(sigma.begin(), sigma.end(), 0);
      for (std::size_t i = n; i > 1; --i) std::swap(sigma[i - 1], sigma[static_cast<std::size_t>(rng.uniform() * i)]);
      std::vector<std::size_t> tau(n);
      std::iota(tau.begin(), tau.end(), 0);
      for (std::size_t i = n; i > 1; --i) std::swap(tau[i - 1], tau[static_cast<std::size_t>(rng.uniform() * i)]);
      const double w = rng.uniform();
      double cs = 0.0;
      for (std::size_t i = 0; i < n; ++i) cs += w * c(x[i], y[sigma[i]]) + (1.0 - w) * c(x[i], y[tau[i]]);
      cs /= static_cast<double>(n);
      ok = ok && exact <= cs + 1e-12;
      ++couplings;
    }
  }
  return {ok, printf_string("100 instances, max |exact - brute force| = %.2g, %zu sampled couplings dominate", worst_gap,
                            couplings)};
}

// 7. Degenerate coefficients: closed form and Poisson counts.
std::string criterion7_output;
Outcome criterion7(int workers) {
  const StableParams p(0.5, 0.475);
  const double lambda = 1.0;
  const ConstantModel model(p, ConstantParams{0.0, lambda, 0.0, UniformInitial{}});
  const std::size_t n = 100;
  const double horizon = 1.0;
  SimulationOptions sim;
  sim.horizon = horizon;
  sim.delta = 0.2;
  sim.workers = workers;
  sim.record_events = false;

  std::ostringstream out;
  double worst_rel = 0.0;
  for (std::size_t rep = 0; rep < 20; ++rep) {
    const CoupledRun run = run_coupled(model, n, SlotGrid::make(horizon, 0.2), 0.0, 17, rep, workers, false);
    const auto s = run.sub.cumulative();
    const double scale = std::pow(lambda, 1.0 / p.alpha());
    const auto x0 = run.mean_field.state(0);
    for (std::size_t k = 0; k <= run.mean_field.grid.slots; ++k) {
      const auto xs = run.mean_field.state(k);
      for (std::size_t i = 0; i < n; ++i) {
        const double closed = x0[i] + scale * s[k];
        worst_rel = std::max(worst_rel, std::abs(xs[i] - closed) / closed);
      }
    }
    write_trajectory_csv(out, run.mean_field);
  }

  const std::size_t runs = 1000;
  std::vector<double> counts(runs);
  for (std::size_t r = 0; r < runs; ++r) counts[r] = static_cast<double>(simulate_finite(model, n, sim, 18, r).accepted);
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / runs;
  const double expected = static_cast<double>(n) * lambda * horizon;
  const double band = 3.0 * std::sqrt(expected / runs);
  for (double c : counts) out << format_real(c) << '\n';
  criterion7_output = out.str();
  const bool ok = worst_rel <= 1e-12 && std::abs(mean - expected) <= band;
  return {ok, printf_string("closed-form relative error %.2g <= 1e-12; mean accepted %.3f vs N lambda T = %.0f +- %.3f",
                            worst_rel, mean, expected, band)};
}

ExperimentConfig default_config(int workers) {
  ExperimentConfig cfg;
  cfg.workers = workers;
  return cfg;
}

// 8. Rate trend of the coupled a-distance.
std::string criterion8_output;
Outcome criterion8(int workers) {
  const ExperimentConfig cfg = default_config(workers);
  const RateReport rep = run_rate_experiment(cfg);
  std::ostringstream out;
  write_rate_table_csv(out, rep);
  out << rate_report_json(rep);
  criterion8_output = out.str();
  const double theory = (1.0 - cfg.q / cfg.alpha) * (1.0 - cfg.q / cfg.alpha) -
                        (cfg.q / cfg.alpha) * (cfg.q / cfg.alpha) * cfg.q / (2.0 + cfg.q);
  std::string means;
  bool decreasing = true;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    means += printf_string("%s%.4f", i ? " > " : "", rep.rows[i].error.mean);
    if (i > 0 && !(rep.rows[i].error.mean < rep.rows[i - 1].error.mean)) decreasing = false;
  }
  const bool ok = decreasing && rep.fit.slope <= 0.5 * theory && std::abs(rep.exp_theory - theory) < 1e-15;
  return {ok, printf_string("means %s; slope %.4f (se %.4f) <= %.4f; exp_theory %.4f", means.c_str(), rep.fit.slope,
                            rep.fit.slope_se, 0.5 * theory, rep.exp_theory)};
}

// 9. Empirical-measure convergence toward an 8N reference.
Outcome criterion9() {
  const ConvergenceReport rep = run_convergence_experiment(default_config(0));
  std::string means;
  for (std::size_t i = 0; i < rep.rows.size(); ++i)
    means += printf_string("%s%.4f+-%.4f", i ? ", " : "", rep.rows[i].wq.mean, rep.rows[i].wq.half_width);
  std::string steps;
  for (const auto& d : rep.steps) steps += printf_string(" %+.4f+-%.4f", d.mean, d.half_width);
  return {rep.monotone_within_half_widths && rep.overall_decrease,
          "W_q upper bounds " + means + "; paired steps" + steps +
              printf_string("; first-to-last %+.4f+-%.4f", rep.overall_change.mean, rep.overall_change.half_width)};
}

// 10. Picard contraction and uniqueness.
Outcome criterion10() {
  const PicardReport rep = run_picard_experiment(default_config(0));
  std::string ratios;
  for (double r : rep.ratios) ratios += printf_string(" %.3f", r);
  return {rep.contraction && rep.initializations_agree,
          printf_string("ratios%s (max %.3f); max per-slot mean gap %.2g", ratios.c_str(), rep.max_ratio,
                        rep.max_mean_gap)};
}

// 11. Byte-identical outputs for 1 and 3 workers.
Outcome criterion11() {
  std::vector<std::string> one, three;
  for (int workers : {1, 3}) {
    auto& sink = workers == 1 ? one : three;
    criterion3(workers);
    criterion7(workers);
    criterion8(workers);
    sink = {criterion3_slots, criterion7_output, criterion8_output};
  }
  bool ok = true;
  std::string detail;
  const char* names[] = {"slots(3)", "mean-field+counts(7)", "rate table(8)"};
  for (std::size_t i = 0; i < 3; ++i) {
    const bool same = one[i] == three[i] && !one[i].empty();
    ok = ok && same;
    detail += printf_string("%s%s %s (%zu bytes)", i ? ", " : "", names[i], same ? "identical" : "DIFFER", one[i].size());
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional argument: run only the listed criterion numbers.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1},
      {2, criterion2},
      {3, [] { return criterion3(1); }},
      {4, criterion4},
      {5, criterion5},
      {6, criterion6},
      {7, [] { return criterion7(1); }},
      {8, [] { return criterion8(0); }},
      {9, criterion9},
      {10, criterion10},
      {11, criterion11},
  };
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s [%.1fs]\n", o.passed ? "PASS" : "FAIL", id, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.passed;
  }
  return failures == 0 ? 0 : 1;
}
