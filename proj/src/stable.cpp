#include "stablemf/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "stablemf/parallel.hpp"

namespace stablemf {

namespace {

constexpr double kClamp = 0x1.0p-40;
constexpr std::size_t kBatchChunk = 1u << 16;

}  // namespace

StableParams::StableParams(double alpha, double q) : alpha_(alpha), q_(q) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  if (!(q > 0.0 && q < alpha)) {
    throw std::invalid_argument("requires q < alpha (and q > 0), got q=" + std::to_string(q) +
                                " alpha=" + std::to_string(alpha));
  }
}

double sample_stable(double alpha, RngStream& rng) {
  const double u = std::clamp(rng.uniform(), kClamp, 1.0 - kClamp);
  const double w = rng.exponential();
  const double angle = std::numbers::pi * u;
  const double log_y = std::log(std::sin(alpha * angle)) - std::log(std::sin(angle)) / alpha +
                       (1.0 - alpha) / alpha * (std::log(std::sin((1.0 - alpha) * angle)) - std::log(w));
  return std::exp(log_y);
}

std::vector<double> sample_stable_batch(double alpha, std::size_t n, std::uint64_t seed,
                                        std::uint64_t base_stream, int workers) {
  std::vector<double> out(n);
  const std::size_t chunks = (n + kBatchChunk - 1) / kBatchChunk;
  parallel_for(chunks, workers, [&](std::size_t c) {
    RngStream rng(seed, base_stream + c);
    const std::size_t end = std::min(n, (c + 1) * kBatchChunk);
    for (std::size_t i = c * kBatchChunk; i < end; ++i) out[i] = sample_stable(alpha, rng);
  });
  return out;
}

std::vector<double> IncrementPath::cumulative() const {
  std::vector<double> s(increments.size() + 1, 0.0);
  for (std::size_t k = 0; k < increments.size(); ++k) s[k + 1] = s[k] + increments[k];
  return s;
}

IncrementPath sample_subordinator(const StableParams& p, std::span<const double> grid,
                                  RngStream& rng) {
  if (grid.size() < 2) throw std::invalid_argument("degenerate grid");
  if (grid.front() != 0.0) throw std::invalid_argument("grid must start at 0");
  IncrementPath path;
  path.grid.assign(grid.begin(), grid.end());
  path.increments.reserve(grid.size() - 1);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double h = grid[k + 1] - grid[k];
    if (!(h > 0.0)) throw std::invalid_argument("grid must be strictly increasing");
    path.increments.push_back(std::pow(h, p.inv_alpha()) * sample_stable(p, rng));
  }
  return path;
}

RandomSum random_sum_scaled(const StableParams& p, const CountLaw& law, RngStream& rng) {
  RandomSum r;
  r.count = std::visit(
      [&](const auto& l) -> std::int64_t {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, FixedCount>) {
          if (l.n < 0) throw std::invalid_argument("fixed count must be nonnegative");
          return l.n;
        } else {
          return rng.poisson(l.mean);
        }
      },
      law);
  for (std::int64_t k = 0; k < r.count; ++k) r.sum += sample_stable(p, rng);
  if (r.count == 0) {
    r.rescaled = sample_stable(p, rng);
    r.fresh = true;
  } else if (r.count == 1) {
    r.rescaled = r.sum;
  } else {
    r.rescaled = std::pow(static_cast<double>(r.count), -p.inv_alpha()) * r.sum;
  }
  return r;
}

double jump_measure_tail(const StableParams& p, double x0) {
  if (!(x0 > 0.0)) throw std::domain_error("tail mass diverges at 0");
  return std::pow(x0, -p.alpha()) / std::tgamma(1.0 - p.alpha());
}

double stable_laplace(double alpha, double lambda) { return std::exp(-std::pow(lambda, alpha)); }

double stable_fractional_moment(double alpha, double q) {
  if (!(q > 0.0 && q < alpha)) throw std::invalid_argument("requires q < alpha");
  return std::tgamma(1.0 - q / alpha) / std::tgamma(1.0 - q);
}

}  // namespace stablemf
