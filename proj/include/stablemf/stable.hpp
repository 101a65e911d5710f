#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "stablemf/rng.hpp"

namespace stablemf {

/// Index alpha of the one-sided stable law and the moment order q used by
/// the distance function. Construction enforces 0 < q < alpha < 1.
class StableParams {
 public:
  StableParams(double alpha, double q);

  double alpha() const { return alpha_; }
  double q() const { return q_; }
  double inv_alpha() const { return 1.0 / alpha_; }

 private:
  double alpha_;
  double q_;
};

/// One draw from the one-sided strictly stable law with E exp(-l Y) = exp(-l^alpha).
///
/// Kanter's representation: with U uniform on (0, pi) and W unit exponential,
///   Y = sin(alpha U) / sin(U)^(1/alpha) * (sin((1 - alpha) U) / W)^((1 - alpha)/alpha).
/// Evaluated in log space with U clamped to pi * [2^-40, 1 - 2^-40].
double sample_stable(double alpha, RngStream& rng);
inline double sample_stable(const StableParams& p, RngStream& rng) {
  return sample_stable(p.alpha(), rng);
}

/// n independent draws. Draws are produced in fixed chunks, each from its own
/// substream of (seed, base_stream), so the output does not depend on the
/// number of workers.
std::vector<double> sample_stable_batch(double alpha, std::size_t n, std::uint64_t seed,
                                        std::uint64_t base_stream, int workers = 1);

/// Subordinator sampled on a grid: increments[k] covers (grid[k], grid[k+1]].
struct IncrementPath {
  std::vector<double> grid;
  std::vector<double> increments;

  /// S at every grid point, starting from S(0) = 0.
  std::vector<double> cumulative() const;
};

/// Independent increments h^(1/alpha) * Y over a strictly increasing grid
/// starting at 0. Throws std::invalid_argument("degenerate grid") when the
/// grid has fewer than two points.
IncrementPath sample_subordinator(const StableParams& p, std::span<const double> grid,
                                  RngStream& rng);

struct FixedCount {
  std::int64_t n;
};
struct PoissonCount {
  double mean;
};
using CountLaw = std::variant<FixedCount, PoissonCount>;

struct RandomSum {
  std::int64_t count = 0;  // P
  double sum = 0.0;        // Z_P = Y_1 + ... + Y_P
  double rescaled = 0.0;   // P^(-1/alpha) Z_P, or a fresh draw when P = 0
  bool fresh = false;      // true when the P = 0 branch was taken
};

/// Random sum of i.i.d. stable draws and its self-similar rescaling. The
/// rescaled value has the stable law and is independent of the count.
RandomSum random_sum_scaled(const StableParams& p, const CountLaw& law, RngStream& rng);

/// m([x0, inf)) for the Levy measure m(dx) = alpha dx / (Gamma(1 - alpha) x^(1 + alpha)).
/// Throws std::domain_error("tail mass diverges at 0") for x0 <= 0.
double jump_measure_tail(const StableParams& p, double x0);

/// exp(-lambda^alpha).
double stable_laplace(double alpha, double lambda);

/// E[Y^q] = Gamma(1 - q/alpha) / Gamma(1 - q) for 0 < q < alpha.
double stable_fractional_moment(double alpha, double q);

}  // namespace stablemf
