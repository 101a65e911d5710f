#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stablemf {

/// The concave distance function
///
///   a(x) = c1 x - c2 x^2          for 0 <= x <= 1,
///   a(x) = x^q + shift            for x >= 1,
///   a(-x) = -a(x),
///
/// with c1 = q + q|q-1|, c2 = q|q-1|/2 and shift = q + q|q-1|/2 - 1.
/// It behaves like x near the origin and like x^q at infinity; value and
/// slope match at x = 1, the second derivative jumps there.
class DistanceFunctionA {
 public:
  explicit DistanceFunctionA(double q);

  double q() const { return q_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double shift() const { return shift_; }

  double value(double x) const;
  double operator()(double x) const { return value(x); }
  double derivative(double x) const;
  /// At exactly |x| = 1 the left (quadratic) branch is returned.
  double second_derivative(double x) const;
  /// order in {0, 1, 2}.
  double eval(double x, int order) const;

  /// Inverse on [0, inf).
  double inverse(double y) const;

  /// Global Lipschitz constant, a'(0) = c1.
  double lipschitz() const { return c1_; }
  /// C in a(x) <= C min(x, x^q) on R+.
  double dominance_constant() const { return c1_ > 1.0 ? c1_ : 1.0; }
  /// sup |a''/a'| = 1 - q, attained at x = 1.
  double curvature_bound() const { return 1.0 - q_; }

 private:
  double q_, c1_, c2_, shift_;
};

/// Free-function form of DistanceFunctionA::eval.
double a_eval(double q, double x, int order);

struct PropertyCheck {
  std::string name;
  bool passed = true;
  /// max(lhs - rhs) over all tested points; <= tolerance when passed.
  double worst_violation = 0.0;
  /// Property-specific measured statistic (e.g. the observed sup of a ratio).
  double statistic = 0.0;
  std::size_t evaluations = 0;
};

struct AssumptionReport {
  double q = 0.0;
  std::vector<PropertyCheck> checks;
  bool all_passed() const;
  const PropertyCheck& find(const std::string& name) const;
};

/// Evaluates the structural properties of a on a deterministic grid of
/// grid_size points plus max(grid_size, 10^4) random pairs/triples:
/// branch continuity, oddness, concavity, the a''/a' bound, Lipschitz bound,
/// strict monotonicity, sublinearity, both two-point inequalities
/// |a(x)-a(y)| <= 2a(|x-y|) and |a(x+z)-a(y+z)| <= 2a(2|x-y|), the shift
/// contraction |a(x+u)-a(y+u)| <= |a(x)-a(y)|, the a' relation and dominance.
/// Throws std::invalid_argument if grid_size < 1000.
AssumptionReport check_assumption_a(double q, std::size_t grid_size, std::uint64_t seed = 1);

}  // namespace stablemf
