#include "stablemf/distance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "stablemf/rng.hpp"

namespace stablemf {

DistanceFunctionA::DistanceFunctionA(double q) : q_(q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("distance function requires q in (0, 1)");
  const double g = q * std::abs(q - 1.0);
  c1_ = q + g;
  c2_ = 0.5 * g;
  shift_ = q + 0.5 * g - 1.0;
}

double DistanceFunctionA::value(double x) const {
  const double ax = std::abs(x);
  const double v = ax <= 1.0 ? (c1_ - c2_ * ax) * ax : std::pow(ax, q_) + shift_;
  return x < 0.0 ? -v : v;
}

double DistanceFunctionA::derivative(double x) const {
  const double ax = std::abs(x);
  return ax <= 1.0 ? c1_ - 2.0 * c2_ * ax : q_ * std::pow(ax, q_ - 1.0);
}

double DistanceFunctionA::second_derivative(double x) const {
  const double ax = std::abs(x);
  const double v = ax <= 1.0 ? -2.0 * c2_ : q_ * (q_ - 1.0) * std::pow(ax, q_ - 2.0);
  return x < 0.0 ? -v : v;
}

double DistanceFunctionA::eval(double x, int order) const {
  switch (order) {
    case 0: return value(x);
    case 1: return derivative(x);
    case 2: return second_derivative(x);
    default: throw std::invalid_argument("order must be 0, 1 or 2");
  }
}

double DistanceFunctionA::inverse(double y) const {
  if (y < 0.0) return -inverse(-y);
  const double at_one = c1_ - c2_;
  if (y <= at_one) {
    // smaller root of c2 x^2 - c1 x + y = 0, written to avoid cancellation
    const double disc = std::sqrt(std::max(0.0, c1_ * c1_ - 4.0 * c2_ * y));
    return 2.0 * y / (c1_ + disc);
  }
  return std::pow(y - shift_, 1.0 / q_);
}

double a_eval(double q, double x, int order) { return DistanceFunctionA(q).eval(x, order); }

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const PropertyCheck& AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no check named " + name);
}

namespace {

// Relative slack for floating-point rounding in inequality checks.
constexpr double kSlack = 1e-12;

struct Accumulator {
  PropertyCheck check;
  explicit Accumulator(std::string name) { check.name = std::move(name); check.worst_violation = -INFINITY; }
  // Records lhs <= rhs.
  void leq(double lhs, double rhs) {
    const double excess = lhs - rhs;
    check.worst_violation = std::max(check.worst_violation, excess);
    if (excess > kSlack * std::max({1.0, std::abs(lhs), std::abs(rhs)})) check.passed = false;
    ++check.evaluations;
  }
};

}  // namespace

AssumptionReport check_assumption_a(double q, std::size_t grid_size, std::uint64_t seed) {
  if (grid_size < 1000) throw std::invalid_argument("grid_size must be at least 1000");
  const DistanceFunctionA a(q);
  AssumptionReport report;
  report.q = q;

  // Deterministic grid: half linear on [0, 2], half geometric on [2, 1e4].
  std::vector<double> grid;
  grid.reserve(grid_size);
  const std::size_t half = grid_size / 2;
  for (std::size_t i = 0; i < half; ++i) grid.push_back(2.0 * static_cast<double>(i) / static_cast<double>(half));
  for (std::size_t i = 0; i < grid_size - half; ++i)
    grid.push_back(2.0 * std::pow(5000.0, static_cast<double>(i) / static_cast<double>(grid_size - half - 1)));

  const double eps = 1e-9;
  Accumulator continuity("branch_continuity");
  continuity.leq(std::abs((a.c1() - a.c2()) - (1.0 + a.shift())), 0.0);
  continuity.leq(std::abs((a.c1() - 2.0 * a.c2()) - q), 0.0);
  continuity.check.statistic = std::abs((a.c1() - a.c2()) - (1.0 + a.shift()));

  Accumulator odd("odd_and_zero");
  odd.leq(std::abs(a(0.0)), 0.0);

  Accumulator concave("concavity");
  Accumulator ratio("curvature_ratio_bound");
  Accumulator lipschitz("lipschitz_bound");
  Accumulator monotone("strict_monotonicity");
  Accumulator dominance("dominance");
  double sup_ratio = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    odd.leq(std::abs(a(-x) + a(x)), 0.0);
    const double d1 = a.derivative(x);
    if (std::abs(x - 1.0) > eps) {
      const double d2 = a.second_derivative(x);
      concave.leq(d2, 0.0);
      sup_ratio = std::max(sup_ratio, std::abs(d2 / d1));
      ratio.leq(std::abs(d2 / d1), a.curvature_bound());
    }
    lipschitz.leq(d1, a.lipschitz());
    monotone.leq(-d1, 0.0);
    if (d1 <= 0.0) monotone.check.passed = false;
    if (i > 0 && grid[i] > grid[i - 1] && !(a(grid[i]) > a(grid[i - 1]))) monotone.check.passed = false;
    if (x > 0.0) dominance.leq(a(x), a.dominance_constant() * std::min(x, std::pow(x, q)));
  }
  ratio.check.statistic = sup_ratio;

  Accumulator sublinear("sublinearity");
  Accumulator two_point("two_point_bound");
  Accumulator shifted("shifted_two_point_bound");
  Accumulator contraction("shift_contraction");
  Accumulator derivative_rel("derivative_relation");
  RngStream rng(seed, stream_id(StreamDomain::validation, 0, 0));
  auto draw = [&] {
    // log-uniform magnitude over [1e-4, 1e3], occasionally exactly small
    return std::exp(std::log(1e-4) + rng.uniform() * (std::log(1e3) - std::log(1e-4)));
  };
  const std::size_t pairs = std::max<std::size_t>(grid_size, 10000);
  for (std::size_t i = 0; i < pairs; ++i) {
    const double x = draw();
    const double y_pos = draw();
    const double y = rng.uniform() < 0.25 ? -y_pos : y_pos;
    const double z = draw();
    sublinear.leq(a(x + y_pos), a(x) + a(y_pos));
    two_point.leq(std::abs(a(x) - a(y)), 2.0 * a(std::abs(x - y)));
    shifted.leq(std::abs(a(x + z) - a(y + z)), 2.0 * a(2.0 * std::abs(x - y)));
    contraction.leq(std::abs(a(x + z) - a(y_pos + z)), std::abs(a(x) - a(y_pos)));
    derivative_rel.leq(std::abs(a.derivative(x) - a.derivative(y)),
                       a.curvature_bound() * std::abs(a(x) - a(y)));
  }
  // x = y makes both sides of the two-point bound vanish.
  two_point.leq(std::abs(a(0.7) - a(0.7)), 2.0 * a(0.0));

  for (Accumulator* acc : {&continuity, &odd, &concave, &ratio, &lipschitz, &monotone, &dominance,
                           &sublinear, &two_point, &shifted, &contraction, &derivative_rel}) {
    report.checks.push_back(acc->check);
  }
  return report;
}

}  // namespace stablemf
