#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "stablemf/stable.hpp"

using namespace stablemf;

namespace {

// Chambers-Mallows-Stuck in the general (alpha, beta = 1) parametrization,
// rescaled so that E exp(-l X) = exp(-l^alpha). Independent of the library's
// Kanter form.
double cms_totally_skewed(double alpha, RngStream& rng) {
  const double pi = std::numbers::pi;
  const double v = pi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  const double b = pi / 2;  // atan(tan(pi alpha / 2)) / alpha for beta = 1
  const double scale = std::pow(std::cos(pi * alpha / 2), -1 / alpha);
  const double x = scale * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1 / alpha) *
                   std::pow(std::cos(v - alpha * (v + b)) / w, (1 - alpha) / alpha);
  return x * std::pow(std::cos(pi * alpha / 2), 1 / alpha);
}

double mean_exp(const std::vector<double>& xs, double lambda) {
  double s = 0;
  for (double x : xs) s += std::exp(-lambda * x);
  return s / double(xs.size());
}

double band(std::size_t n) { return 3.0 / (2.0 * std::sqrt(double(n))); }

// Composite Simpson on [x0, x1] of alpha x^{-1-alpha} / Gamma(1-alpha),
// after the substitution x = x0 / t^2 that maps the tail to (0, 1].
double tail_quadrature(double alpha, double x0) {
  const int m = 200000;
  auto g = [&](double t) {
    if (t == 0.0) return 0.0;
    const double x = x0 / (t * t);
    return alpha * std::pow(x, -1 - alpha) / std::tgamma(1 - alpha) * 2 * x0 / (t * t * t);
  };
  double s = g(0) + g(1);
  for (int i = 1; i < m; ++i) s += g(double(i) / m) * (i % 2 ? 4 : 2);
  return s / (3.0 * m);
}

}  // namespace

TEST_CASE("parameters require 0 < q < alpha < 1") {
  CHECK_NOTHROW(StableParams(0.5, 0.25));
  CHECK_THROWS_AS(StableParams(0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(StableParams(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(StableParams(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("draws are positive and finite") {
  RngStream r(1, 1);
  for (double alpha : {0.05, 0.3, 0.5, 0.9, 0.99})
    for (int i = 0; i < 20000; ++i) {
      const double y = sample_stable(alpha, r);
      REQUIRE(y > 0.0);
      REQUIRE(std::isfinite(y));
    }
}

TEST_CASE("Laplace transform at lambda = 1 for alpha = 0.5") {
  const auto xs = sample_stable_batch(0.5, 1000000, 11, 0, 2);
  CHECK(std::abs(mean_exp(xs, 1.0) - std::exp(-1.0)) <= band(xs.size()));
}

TEST_CASE("batch output does not depend on the worker count") {
  CHECK(sample_stable_batch(0.7, 50000, 3, 9, 1) == sample_stable_batch(0.7, 50000, 3, 9, 4));
}

TEST_CASE("fractional moment matches the closed form and a second sampler") {
  const double alpha = 0.5, q = 0.25;
  const double closed = std::tgamma(1 - q / alpha) / std::tgamma(1 - q);
  CHECK(closed == doctest::Approx(1.44641).epsilon(1e-5));
  CHECK(stable_fractional_moment(alpha, q) == doctest::Approx(closed).epsilon(1e-14));

  const std::size_t n = 10000000;
  const auto xs = sample_stable_batch(alpha, n, 2024, 0, 4);
  double s = 0;
  for (double x : xs) s += std::pow(x, q);
  const double ours = s / double(n);

  RngStream r(2024, 77);
  double t = 0;
  for (std::size_t i = 0; i < n; ++i) t += std::pow(cms_totally_skewed(alpha, r), q);
  const double theirs = t / double(n);

  // Y^q has finite mean but infinite variance (q = alpha / 2), so the
  // tolerance is loose compared with a CLT band.
  CHECK(std::abs(ours - closed) < 0.01);
  CHECK(std::abs(theirs - closed) < 0.01);
  CHECK(std::abs(ours - theirs) < 0.01);

  // seed stability
  const auto ys = sample_stable_batch(alpha, 1000000, 99, 0, 4);
  double u = 0;
  for (double y : ys) u += std::pow(y, q);
  CHECK(std::abs(u / 1e6 - closed) < 0.02);
}

TEST_CASE("second sampler agrees on the Laplace transform") {
  RngStream r(5, 5);
  std::vector<double> xs(400000);
  for (auto& x : xs) x = cms_totally_skewed(0.7, r);
  for (double l : {0.5, 1.0, 2.0}) CHECK(std::abs(mean_exp(xs, l) - stable_laplace(0.7, l)) <= band(xs.size()));
}

TEST_CASE("mean of Y^alpha keeps growing with the sample size") {
  // P(Y^alpha > x) ~ c / x, so the sample mean grows like c log n. Medians
  // over repeated blocks remove the heavy-tail noise of a single estimate.
  const double alpha = 0.5;
  auto median_mean = [&](double p, std::size_t block) {
    const std::size_t reps = 101;
    const auto xs = sample_stable_batch(alpha, reps * block, 31, block, 4);
    std::vector<double> means(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      double s = 0;
      for (std::size_t i = 0; i < block; ++i) s += std::pow(xs[r * block + i], p);
      means[r] = s / double(block);
    }
    std::nth_element(means.begin(), means.begin() + reps / 2, means.end());
    return means[reps / 2];
  };
  const double grow_alpha = median_mean(alpha, 10000) - median_mean(alpha, 100);
  const double grow_q = median_mean(0.2, 10000) - median_mean(0.2, 100);
  // c log(100) with c = 1 / Gamma(1 - alpha) is about 2.6
  CHECK(grow_alpha > 1.0);
  CHECK(std::abs(grow_q) < 0.1);
}

TEST_CASE("self-similarity: Y1 + ... + Yn has the law of n^{1/alpha} Y") {
  const double alpha = 0.5;
  for (int n : {2, 5}) {
    const std::size_t m = 200000;
    const auto xs = sample_stable_batch(alpha, m * n, 8, n, 2);
    const auto ys = sample_stable_batch(alpha, m, 8, 100 + n, 2);
    std::vector<double> sums(m), scaled(m);
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0;
      for (int k = 0; k < n; ++k) s += xs[i * n + k];
      sums[i] = s;
      scaled[i] = std::pow(double(n), 1 / alpha) * ys[i];
    }
    for (double l : {0.5, 1.0, 2.0, 4.0})
      CHECK(std::abs(mean_exp(sums, l) - mean_exp(scaled, l)) <= 2 * band(m));
  }
}

TEST_CASE("subordinator increments") {
  const StableParams p(0.5, 0.25);
  RngStream r(4, 4);
  const std::vector<double> empty, single{0.0};
  CHECK_THROWS_WITH(sample_subordinator(p, empty, r), "degenerate grid");
  CHECK_THROWS_WITH(sample_subordinator(p, single, r), "degenerate grid");

  const std::vector<double> grid{0.0, 0.5, 1.0};
  const std::size_t n = 400000;
  std::vector<double> s1(n);
  for (auto& s : s1) {
    const auto path = sample_subordinator(p, grid, r);
    REQUIRE(path.increments.size() == 2);
    REQUIRE(path.increments[0] > 0);
    REQUIRE(path.increments[1] > 0);
    const auto c = path.cumulative();
    REQUIRE(c.size() == 3);
    REQUIRE(c[0] == 0.0);
    REQUIRE(c[1] <= c[2]);
    s = c[2];
  }
  CHECK(std::abs(mean_exp(s1, 1.0) - std::exp(-1.0)) <= band(n));

  // tiny steps: E exp(-dS) -> 1
  const std::vector<double> fine{0.0, 1e-8};
  double acc = 0;
  for (int i = 0; i < 20000; ++i) acc += std::exp(-sample_subordinator(p, fine, r).increments[0]);
  CHECK(acc / 20000 > 0.999);
}

TEST_CASE("random sums") {
  const StableParams p(0.5, 0.25);
  RngStream r(6, 6);
  const auto zero = random_sum_scaled(p, FixedCount{0}, r);
  CHECK(zero.count == 0);
  CHECK(zero.sum == 0.0);
  CHECK(zero.fresh);
  CHECK(zero.rescaled > 0.0);

  const auto one = random_sum_scaled(p, FixedCount{1}, r);
  CHECK(one.count == 1);
  CHECK(!one.fresh);
  CHECK(one.rescaled == one.sum);

  for (int i = 0; i < 1000; ++i) {
    const auto rs = random_sum_scaled(p, PoissonCount{5.0}, r);
    if (rs.count == 0) continue;
    REQUIRE(rs.sum == doctest::Approx(std::pow(double(rs.count), 2.0) * rs.rescaled).epsilon(1e-13));
  }

  // conditional law of the rescaled sum does not depend on the count
  const std::size_t n = 300000;
  std::vector<std::vector<double>> by_count(12);
  for (std::size_t i = 0; i < n; ++i) {
    const auto rs = random_sum_scaled(p, PoissonCount{5.0}, r);
    if (rs.count >= 2 && rs.count <= 9) by_count[rs.count].push_back(rs.rescaled);
  }
  for (int k = 2; k <= 9; ++k) {
    const auto& xs = by_count[k];
    CHECK(std::abs(mean_exp(xs, 1.0) - std::exp(-1.0)) <= band(xs.size()));
  }
}

TEST_CASE("jump measure tail") {
  const StableParams p(0.5, 0.25);
  CHECK(jump_measure_tail(p, 1.0) == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(jump_measure_tail(p, 1.0) == doctest::Approx(0.564190).epsilon(1e-6));
  CHECK(jump_measure_tail(p, 1.0) == doctest::Approx(tail_quadrature(0.5, 1.0)).epsilon(1e-6));
  CHECK(jump_measure_tail(p, 4.0) / jump_measure_tail(p, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(jump_measure_tail(p, 4.0) == doctest::Approx(tail_quadrature(0.5, 4.0)).epsilon(1e-6));
  CHECK(jump_measure_tail(p, 1e300) < 1e-149);
  CHECK_THROWS_WITH_AS(jump_measure_tail(p, 0.0), "tail mass diverges at 0", std::domain_error);
  CHECK_THROWS_AS(jump_measure_tail(p, -1.0), std::domain_error);
}
