#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stablemf/distance.hpp"

namespace stablemf {

/// Uniformly weighted atoms on the real line.
struct EmpiricalMeasure {
  std::vector<double> atoms;

  EmpiricalMeasure() = default;
  explicit EmpiricalMeasure(std::vector<double> a) : atoms(std::move(a)) {}

  std::size_t size() const { return atoms.size(); }
  double weight() const { return 1.0 / static_cast<double>(atoms.size()); }
  /// Deterministic-order mean of g over the atoms.
  template <class F>
  double integrate(F&& g) const;
};

/// Ground cost between two atoms.
struct TransportCost {
  enum class Kind { power_q, a_distance };
  Kind kind = Kind::power_q;
  double q = 0.5;

  static TransportCost power(double q) { return {Kind::power_q, q}; }
  static TransportCost a_distance(double q) { return {Kind::a_distance, q}; }

  double operator()(double x, double y) const;
};

/// Upper size limit for the exact assignment solver.
inline constexpr std::size_t kExactTransportLimit = 256;

/// (1/n) sum |a(x_i) - a(y_i)|: the cost of the identity coupling.
/// Throws std::invalid_argument on length mismatch or empty input.
double coupled_a_distance(std::span<const double> xs, std::span<const double> ys, double q);

/// Exact optimal transport cost between two uniform empirical measures with
/// the same number of atoms (optimal plans are permutations), solved as a
/// minimum-cost assignment. No outer root is taken. Throws
/// std::length_error("oracle regime exceeded; use coupled_a_distance") when
/// n > kExactTransportLimit, std::invalid_argument on size mismatch.
double wasserstein_q_exact(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, TransportCost cost);

/// Optimal permutation from the same solver: atom i of mu is sent to
/// atom perm[i] of nu.
std::vector<std::size_t> optimal_assignment(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                            TransportCost cost);

/// Cost of the monotone (quantile) coupling between measures of arbitrary
/// sizes. Exact for the a-distance cost (a is increasing, so the problem is
/// W1 in a-coordinates) and for |x-y|^p with p >= 1; an upper bound for the
/// concave cost |x-y|^q.
double quantile_coupling_cost(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, TransportCost cost);

/// Exact W_p^p for p >= 1 via sorted matching (1-D convex cost).
double sorted_matching_cost(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

template <class F>
double EmpiricalMeasure::integrate(F&& g) const {
  double s = 0.0;
  for (double x : atoms) s += g(x);
  return s / static_cast<double>(atoms.size());
}

}  // namespace stablemf
