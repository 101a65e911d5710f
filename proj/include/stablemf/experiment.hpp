#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stablemf/coupling.hpp"
#include "stablemf/finite_system.hpp"
#include "stablemf/mean_field.hpp"
#include "stablemf/model.hpp"

namespace stablemf {

inline constexpr int kConfigSchemaVersion = 1;

/// Rejected configuration (usage error at the CLI).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ModelConfig {
  enum class Kind { reference, constant };
  Kind kind = Kind::reference;
  ReferenceParams reference;
  ConstantParams constant;
};

struct PicardConfig {
  double horizon = 0.25;
  double delta = 0.05;
  std::size_t particles = 400;
  std::size_t iterations = 6;
  std::size_t replications = 16;
};

struct ExperimentConfig {
  double alpha = 0.5;
  double q = 0.475;
  ModelConfig model;
  std::vector<std::size_t> n_grid{50, 100, 200, 400, 800};
  double horizon = 1.0;
  std::size_t replications = 64;
  /// Empty: delta(N) rule. Otherwise the fixed slot length.
  std::optional<double> delta;
  /// Euler substep; 0 means delta / 10.
  double substep = 0.0;
  std::uint64_t seed = 20240917;
  /// 0 means default_workers().
  int workers = 0;
  std::string output_dir = "results";
  /// Reference size factor for the empirical-measure experiment.
  std::size_t reference_factor = 8;
  /// Replications of the empirical-measure experiment.
  std::size_t convergence_replications = 32;
  PicardConfig picard;

  /// Throws ConfigError on any violated invariant (q < alpha, increasing N
  /// grid, R >= 1, T a multiple of a fixed delta, ...).
  void validate() const;
  StableParams params() const;
  std::unique_ptr<Model> make_model() const;
  SlotGrid grid_for(std::size_t particles) const;
  int resolved_workers() const;
};

/// Parses a JSON config; missing fields keep their defaults. Throws
/// ConfigError on malformed input, unknown keys or an unsupported schema.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);
/// STABLEMF_SEED and STABLEMF_OUT override seed and output directory.
void apply_env_overrides(ExperimentConfig& cfg);

/// (1 - q/alpha)^2 - (q/alpha)^2 q/(2+q).
double rate_exponent_theory(double alpha, double q);
/// -q 1{q < 1/2} - 1/2 1{q > 1/2}.
double rate_exponent_secondary(double q);

struct Interval {
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 standard errors
};
/// Mean and CLT half-width over replications.
Interval mean_interval(const std::vector<double>& xs);
/// Sample median (mean of the two middle values for even sizes).
double median(std::vector<double> xs);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  bool defined = false;
};
LogLogFit fit_loglog(const std::vector<double>& ns, const std::vector<double>& values);

/// One replication of the coupled pair (X, X~) at size N.
struct ReplicationResult {
  double error = 0.0;  // (1/N) sum |a(X^i_T) - a(X~^i_T)|
  double tagged_error = 0.0;  // |a(X^1_T) - a(X~^1_T)|
  double r_total_q = 0.0;
  double r_live_q = 0.0;
  double r_frozen_q = 0.0;
  double max_identity_residual = 0.0;
  double closure_residual = 0.0;
  std::size_t clamps = 0;
  std::size_t particle_steps = 0;
  std::size_t fresh_slots = 0;
};

struct CoupledRun {
  Trajectory finite;
  std::vector<SlotRecord> records;
  IdentityReport identity;
  CoupledSubordinator sub;
  Trajectory mean_field;
};

/// Finite system, coupling and paired mean-field system for one replication.
CoupledRun run_coupled(const Model& model, std::size_t particles, const SlotGrid& grid, double substep,
                       std::uint64_t seed, std::uint64_t replication, int workers = 1, bool record_events = true);

ReplicationResult summarize(const CoupledRun& run, double q);

struct RateRow {
  std::size_t n = 0;
  double delta = 0.0;
  Interval error;
  /// Robust companion of the mean; the error is heavy tailed for q near alpha.
  double median_error = 0.0;
  Interval tagged_error;
  Interval r_total_q;
  Interval r_live_q;
  Interval r_frozen_q;
  std::size_t replications = 0;
  double max_identity_residual = 0.0;
  double clamp_fraction = 0.0;
  std::size_t fresh_slots = 0;
};

struct RateReport {
  double alpha = 0.0;
  double q = 0.0;
  std::vector<RateRow> rows;
  LogLogFit fit;
  double exp_theory = 0.0;
  double exp_secondary = 0.0;
  bool insufficient_grid = false;
  bool strictly_decreasing = false;
  bool slope_within_band = false;  // slope <= exp_theory / 2
};

/// Replication index space: (grid position, replication) packed into the
/// 24-bit replication field of stream ids.
std::uint64_t replication_key(std::size_t grid_index, std::size_t replication);

RateReport run_rate_experiment(const ExperimentConfig& cfg);

struct ConvergenceRow {
  std::size_t n = 0;
  std::size_t reference_n = 0;
  double delta = 0.0;
  Interval wq;  // quantile-coupling upper bound on W_q
  Interval wa;  // a-distance transport cost (exact for this cost)
  std::size_t replications = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  /// Paired change of the W_q bound between consecutive N, per replication.
  std::vector<Interval> steps;
  /// Paired change from the first to the last N.
  Interval overall_change;
  /// No consecutive paired increase beyond its half-width.
  bool monotone_within_half_widths = false;
  /// The first-to-last paired change is negative.
  bool overall_decrease = false;
  /// ... and by more than its half-width. Reported only: W_q inherits the
  /// infinite variance of S^q when q/alpha is close to 1.
  bool overall_significant = false;
};

/// N-particle mean-field system against an (reference_factor N)-particle one
/// with independent atoms and initial positions, both driven by the same
/// directly sampled subordinator on the delta(N) grid. Within a replication
/// every N shares one subordinator path (sampled on the union of the
/// grids) and the same particle streams.
ConvergenceReport run_convergence_experiment(const ExperimentConfig& cfg);

struct PicardReport {
  double horizon = 0.0;
  double delta = 0.0;
  std::size_t particles = 0;
  std::size_t replications = 0;
  /// Mean over replications of sup_t coupled a-distance between iterates
  /// n and n+1, starting from the f_max guess.
  std::vector<double> distances;
  std::vector<double> ratios;
  double max_ratio = 0.0;
  /// Final per-slot means from the f_max and f_min starts.
  std::vector<Interval> mean_from_max;
  std::vector<Interval> mean_from_min;
  /// max_k |difference of the two| and the matching half-width.
  double max_mean_gap = 0.0;
  bool contraction = false;
  bool initializations_agree = false;
};

PicardReport run_picard_experiment(const ExperimentConfig& cfg);

}  // namespace stablemf
