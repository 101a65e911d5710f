#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stablemf {

/// One named statistical check: |statistic| <= tolerance.
struct BatteryEntry {
  std::string name;
  double statistic = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct BatteryReport {
  std::vector<BatteryEntry> entries;
  bool passed() const;
  void add(std::string name, double statistic, double tolerance);
  /// Entry whose verdict comes from elsewhere.
  void add(std::string name, double statistic, double tolerance, bool passed);
  void append(const BatteryReport& other);
};

/// 3 / (2 sqrt(n)): three standard deviations of a mean of n values in [0, 1].
double laplace_band(std::size_t n);

/// Deviation of the empirical mean of exp(-lambda x) from exp(-lambda^alpha)
/// at each lambda in `lambdas`, with the band laplace_band(xs.size()).
/// `target_shift` moves the index of the target law; a nonzero value is the
/// negative control.
BatteryReport laplace_check(const std::string& label, const std::vector<double>& xs, double alpha,
                            const std::vector<double>& lambdas, double target_shift = 0.0);

/// Pearson correlation; 0 when either sample is constant.
double correlation(const std::vector<double>& x, const std::vector<double>& y);

struct BatteryOptions {
  std::vector<double> alphas{0.3, 0.5, 0.7, 0.9};
  std::vector<double> lambdas{0.5, 1.0, 2.0, 4.0};
  std::size_t samples = 1000000;
  std::size_t random_sum_samples = 1000000;
  double random_sum_mean = 5.0;
  double random_sum_alpha = 0.5;
  /// Constant-rate slots pooled for the slot-increment test.
  std::size_t slot_samples = 100000;
  std::size_t slot_particles = 200;
  double slot_delta = 0.05;
  double slot_rate = 1.0;
  /// Random q values for the distance-function battery.
  std::size_t metric_q_count = 50;
  std::size_t metric_grid = 10000;
  double target_shift = 0.0;
  std::uint64_t seed = 1;
  int workers = 1;
};

/// Stable sampler: Laplace transform at every (alpha, lambda).
BatteryReport stable_laplace_battery(const BatteryOptions& opt);
/// Random sums with Poisson count: Laplace battery of the rescaled sum and
/// its correlation with the count.
BatteryReport random_sum_battery(const BatteryOptions& opt);
/// Constant-rate finite runs cut into slots: Laplace battery of
/// dS_k / delta^{1/alpha} and correlation of Y_k with P_k.
BatteryReport slot_increment_battery(const BatteryOptions& opt);
/// Distance-function invariants for metric_q_count random q in (0, 1).
BatteryReport metric_battery(const BatteryOptions& opt);

/// All four batteries.
BatteryReport run_distribution_suite(const BatteryOptions& opt);

}  // namespace stablemf
