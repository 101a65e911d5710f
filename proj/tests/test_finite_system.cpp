#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "stablemf/finite_system.hpp"
#include "stablemf/model.hpp"
#include "stablemf/stable.hpp"

using namespace stablemf;

namespace {

const StableParams kParams(0.5, 0.475);

ConstantModel degenerate(double rate) {
  ConstantParams cp;
  cp.rate = rate;
  return ConstantModel(kParams, cp);
}

SimulationOptions options(double horizon, double delta) {
  SimulationOptions o;
  o.horizon = horizon;
  o.delta = delta;
  return o;
}

double mean_exp(const std::vector<double>& xs, double l) {
  double s = 0;
  for (double x : xs) s += std::exp(-l * x);
  return s / double(xs.size());
}

}  // namespace

TEST_CASE("slot grid convention") {
  const auto g = SlotGrid::make(1.0, 0.25);
  CHECK(g.slots == 4);
  CHECK(g.slot_of(1e-12) == 0);
  CHECK(g.slot_of(0.25) == 0);
  CHECK(g.slot_of(std::nextafter(0.25, 1.0)) == 1);
  CHECK(g.slot_of(0.75) == 2);
  CHECK(g.slot_of(1.0) == 3);
  const auto third = SlotGrid::make(1.0, 1.0 / 3);
  for (std::size_t k = 1; k <= 3; ++k) CHECK(third.slot_of(third.time(k)) == k - 1);
  CHECK_THROWS_AS(SlotGrid::make(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SlotGrid::make(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SlotGrid::make(1.0, 0.3), std::invalid_argument);
}

TEST_CASE("delta rule") {
  const double exponent = -(2.0 / 2.475) * (1 - 0.95 + 0.2375);
  CHECK(exponent == doctest::Approx(-0.23232).epsilon(1e-4));
  CHECK(delta_rule_raw(1000, 0.5, 0.475) == doctest::Approx(std::pow(1000.0, exponent)).epsilon(1e-14));
  CHECK(delta_rule_raw(1000, 0.5, 0.475) == doctest::Approx(0.2010).epsilon(1e-3));
  const std::vector<std::pair<std::size_t, std::size_t>> expected{{50, 2}, {100, 3}, {200, 3}, {400, 4}, {800, 5}};
  for (auto [n, slots] : expected) {
    const auto g = delta_rule_grid(n, 0.5, 0.475, 1.0);
    CHECK(g.slots == slots);
    CHECK(g.delta * double(g.slots) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("argument validation") {
  const ReferenceModel m(kParams, ReferenceParams{});
  CHECK_THROWS_AS(simulate_finite(m, 1, options(1.0, 0.5), 1), std::invalid_argument);
  auto bad_h = options(1.0, 0.5);
  bad_h.substep = 0.6;
  CHECK_THROWS_AS(simulate_finite(m, 10, bad_h, 1), std::invalid_argument);
  CHECK_THROWS_AS(simulate_finite(m, 10, options(1.0, 0.3), 1), std::invalid_argument);
  const auto atoms = generate_atoms(10, 1.0, 2.0, 0.5, 1, 0);
  const std::vector<double> init(9, 1.0);
  CHECK_THROWS_AS(simulate_finite(m, init, atoms, options(1.0, 0.5)), std::invalid_argument);
  std::vector<double> negative(10, 1.0);
  negative[3] = -0.1;
  CHECK_THROWS_AS(simulate_finite(m, negative, atoms, options(1.0, 0.5)), std::domain_error);
}

TEST_CASE("atoms do not depend on the particle count") {
  const auto small = generate_atoms(5, 1.0, 2.0, 0.5, 3, 7);
  const auto large = generate_atoms(50, 1.0, 2.0, 0.5, 3, 7);
  std::vector<Atom> filtered;
  for (const auto& a : large.atoms)
    if (a.j < 5) filtered.push_back(a);
  REQUIRE(filtered.size() == small.atoms.size());
  for (std::size_t i = 0; i < filtered.size(); ++i) {
    CHECK(filtered[i].s == small.atoms[i].s);
    CHECK(filtered[i].u == small.atoms[i].u);
  }
  CHECK(std::is_sorted(large.atoms.begin(), large.atoms.end(), [](auto& x, auto& y) { return x.s < y.s; }));
}

TEST_CASE("accepted count is Poisson(N lambda T) for a constant rate") {
  const auto m = degenerate(1.0);
  const std::size_t n = 10, runs = 1000;
  double sum = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const auto t = simulate_finite(m, n, options(1.0, 0.5), 17, r);
    CHECK(t.accepted == t.atoms.atoms.size());
    sum += double(t.accepted);
  }
  const double mean = 10.0;
  CHECK(std::abs(sum / runs - mean) <= 3 * std::sqrt(mean / runs));
}

TEST_CASE("candidate count per particle is Poisson(f_max T)") {
  const ReferenceModel m(kParams, ReferenceParams{});
  const std::size_t runs = 400, n = 20;
  double sum = 0;
  std::size_t accepted = 0, rejected = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const auto t = simulate_finite(m, n, options(1.0, 0.5), 5, r);
    sum += double(t.atoms.atoms.size());
    for (const auto& a : t.atoms.atoms) (a.accepted_live ? accepted : rejected)++;
    CHECK(t.accepted == std::size_t(std::count_if(t.atoms.atoms.begin(), t.atoms.atoms.end(),
                                                  [](const Atom& a) { return a.accepted_live; })));
  }
  CHECK(accepted + rejected == std::size_t(sum));
  CHECK(rejected > 0);
  const double expected = 2.0 * n * runs;
  CHECK(std::abs(sum - expected) <= 4 * std::sqrt(expected));
}

TEST_CASE("inter-acceptance times of a tagged particle are exponential") {
  const double lambda = 1.3;
  const auto m = degenerate(lambda);
  std::vector<double> gaps;
  for (std::uint64_t r = 0; gaps.size() < 100000; ++r) {
    const auto t = simulate_finite(m, 2, options(400.0, 0.5), 21, r);
    double last = 0.0;
    for (const auto& e : t.events)
      if (e.j == 0) {
        gaps.push_back(e.s - last);
        last = e.s;
      }
  }
  gaps.resize(100000);
  std::sort(gaps.begin(), gaps.end());
  double d = 0;
  const double n = double(gaps.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const double f = 1 - std::exp(-lambda * gaps[i]);
    d = std::max({d, f - double(i) / n, double(i + 1) / n - f});
  }
  CHECK(d < 1.9495 / std::sqrt(n));  // KS critical value at level 1e-3
}

TEST_CASE("degenerate system: displacement is the collateral sum") {
  const double lambda = 1.0;
  const auto m = degenerate(lambda);
  const std::size_t n = 5, runs = 20000;
  std::vector<double> moved(runs), oracle(runs);
  RngStream rng(99, 1);
  for (std::size_t r = 0; r < runs; ++r) {
    const auto t = simulate_finite(m, n, options(1.0, 0.5), 31, r);
    moved[r] = t.final_state()[0] - t.initial()[0];
    double direct = 0;
    for (const auto& a : t.atoms.atoms)
      if (a.j != 0) direct += a.u;
    CHECK(moved[r] == doctest::Approx(direct / std::pow(double(n), 2.0)).epsilon(1e-12));
    const auto p = rng.poisson(double(n - 1) * lambda);
    oracle[r] = p == 0 ? 0.0 : std::pow(double(p) / double(n), 2.0) * sample_stable(0.5, rng);
  }
  for (double l : {0.5, 1.0, 2.0, 4.0})
    CHECK(std::abs(mean_exp(moved, l) - mean_exp(oracle, l)) <= 3 * std::sqrt(0.5 / double(runs)));

  // interaction path is non-decreasing and pure jump
  const auto t = simulate_finite(m, n, options(1.0, 0.25), 31, 0);
  const auto paths = interaction_paths(t, 0.5);
  CHECK(std::is_sorted(paths.live.begin(), paths.live.end()));
}

TEST_CASE("constant rate: frozen and live interaction terms agree") {
  const auto m = degenerate(1.5);
  const auto t = simulate_finite(m, 40, options(1.0, 0.2), 2, 0);
  const auto paths = interaction_paths(t, 0.5);
  CHECK(paths.live.size() == 6);
  for (std::size_t k = 0; k < paths.live.size(); ++k) {
    CHECK(paths.residual[k] == 0.0);
    CHECK(paths.live[k] == paths.frozen[k]);
  }
}

TEST_CASE("reference model: positivity and trajectory layout") {
  const ReferenceModel m(kParams, ReferenceParams{});
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto t = simulate_finite(m, 50, options(1.0, 0.25), 8, r);
    CHECK(t.min_position >= 0.0);
    CHECK(t.slot_states.size() == 5 * 50);
    CHECK(t.slot_rates.size() == 4 * 50);
    CHECK(t.max_position.size() == 50);
    for (double x : t.slot_states) REQUIRE(x >= 0.0);
    for (const auto& e : t.events) REQUIRE(e.after == doctest::Approx(e.before + m.jump(e.before)).epsilon(1e-15));
    CHECK_THROWS_AS(t.state(5), std::out_of_range);
  }
}

TEST_CASE("particles 1 and 2 have the same law") {
  const ReferenceModel m(kParams, ReferenceParams{});
  const std::size_t runs = 3000;
  std::vector<double> x1(runs), x2(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    const auto t = simulate_finite(m, 10, options(1.0, 0.5), 44, r);
    x1[r] = t.final_state()[0];
    x2[r] = t.final_state()[1];
  }
  for (double l : {0.5, 1.0, 2.0}) CHECK(std::abs(mean_exp(x1, l) - mean_exp(x2, l)) <= 3 * std::sqrt(0.5 / runs));
}

TEST_CASE("large systems are identical for any worker count") {
  const ReferenceModel m(kParams, ReferenceParams{});
  auto o = options(0.02, 0.01);
  const auto serial = simulate_finite(m, 20000, o, 3, 0);
  o.workers = 3;
  const auto parallel = simulate_finite(m, 20000, o, 3, 0);
  CHECK(serial.slot_states == parallel.slot_states);
  CHECK(serial.accepted == parallel.accepted);
  CHECK(serial.accepted > 0);
}
