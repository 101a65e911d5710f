#pragma once

// Internal: explicit Euler integration of the coupled drift ODE, shared by
// the finite and the mean-field simulators.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "stablemf/finite_system.hpp"
#include "stablemf/model.hpp"
#include "stablemf/parallel.hpp"

namespace stablemf::internal {

class DriftIntegrator {
 public:
  DriftIntegrator(const Model& model, double substep, int workers, std::size_t particles)
      : model_(model),
        substep_(substep),
        workers_(workers),
        zero_drift_(model.bounds().drift_sup == 0.0),
        drift_(particles),
        max_position_(particles, 0.0) {}

  /// Advances xs from t0 to t1. An empty measure means "use xs itself".
  void advance(std::vector<double>& xs, double t0, double t1, std::span<const double> measure = {}) {
    if (zero_drift_) return;
    while (t0 < t1) {
      const double next = (t1 - t0 <= substep_) ? t1 : t0 + substep_;
      step(xs, next - t0, measure.empty() ? std::span<const double>(xs) : measure);
      t0 = next;
    }
  }

  void observe(std::span<const double> xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!std::isfinite(xs[i])) throw NumericalAbort("non-finite state for particle " + std::to_string(i));
      if (xs[i] > max_position_[i]) max_position_[i] = xs[i];
      if (xs[i] < min_position_) min_position_ = xs[i];
    }
  }

  void observe_one(std::size_t i, double x) {
    if (!std::isfinite(x)) throw NumericalAbort("non-finite state for particle " + std::to_string(i));
    if (x > max_position_[i]) max_position_[i] = x;
    if (x < min_position_) min_position_ = x;
  }

  std::size_t particle_steps() const { return particle_steps_; }
  std::size_t clamps() const { return clamps_; }
  double min_position() const { return min_position_; }
  const std::vector<double>& max_position() const { return max_position_; }

 private:
  // Blocks of particles updated independently; no reductions happen here,
  // so the block split cannot change results.
  static constexpr std::size_t kParallelThreshold = 1u << 14;
  static constexpr std::size_t kBlock = 4096;

  void step(std::vector<double>& xs, double dt, std::span<const double> measure) {
    model_.drift_field(xs, measure, drift_);
    const std::size_t n = xs.size();
    auto update = [&](std::size_t begin, std::size_t end, std::size_t& clamps) {
      for (std::size_t i = begin; i < end; ++i) {
        double x = xs[i] + dt * drift_[i];
        if (x < 0.0) {
          x = 0.0;
          ++clamps;
        }
        xs[i] = x;
      }
    };
    if (workers_ > 1 && n >= kParallelThreshold) {
      const std::size_t blocks = (n + kBlock - 1) / kBlock;
      std::vector<std::size_t> block_clamps(blocks, 0);
      parallel_for(blocks, workers_, [&](std::size_t b) {
        update(b * kBlock, std::min(n, (b + 1) * kBlock), block_clamps[b]);
      });
      for (auto c : block_clamps) clamps_ += c;
    } else {
      update(0, n, clamps_);
    }
    particle_steps_ += n;
    observe(xs);
  }

  const Model& model_;
  double substep_;
  int workers_;
  bool zero_drift_;
  std::vector<double> drift_;
  std::vector<double> max_position_;
  double min_position_ = INFINITY;
  std::size_t particle_steps_ = 0;
  std::size_t clamps_ = 0;
};

}  // namespace stablemf::internal
