#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stablemf/distance.hpp"
#include "stablemf/rng.hpp"
#include "stablemf/stable.hpp"
#include "stablemf/transport.hpp"

namespace stablemf {

/// Declared constants of a model. Lipschitz constants are with respect to
/// the distance |a(x) - a(y)| (and its transport version for the measure
/// argument of the drift).
struct ModelBounds {
  double drift_sup = 0.0;
  double rate_min = 0.0;
  double rate_max = 0.0;
  double jump_max = 0.0;
  double lip_drift_x = 0.0;
  double lip_drift_mu = 0.0;
  double lip_rate = 0.0;
  double lip_jump = 0.0;
  double initial_moment_order = 1.0;
  double initial_moment = 0.0;
};

struct UniformInitial {
  double lo = 0.5;
  double hi = 1.5;
};
struct LogNormalInitial {
  double mu = 0.0;
  double sigma = 0.5;
};
using InitialLaw = std::variant<UniformInitial, LogNormalInitial>;

double sample_initial(const InitialLaw& law, RngStream& rng);
/// E X^p under the initial law.
double initial_moment(const InitialLaw& law, double p);

/// Coefficients (b, f, psi, nu_0) of the particle system.
///
/// The measure argument of the drift is passed as a span of atoms of a
/// uniform empirical measure. Implementations must be immutable and
/// safe to call concurrently.
class Model {
 public:
  explicit Model(StableParams params) : params_(params), a_(params.q()) {}
  virtual ~Model() = default;

  const StableParams& params() const { return params_; }
  const DistanceFunctionA& distance() const { return a_; }

  virtual std::string name() const = 0;
  virtual double drift(double x, std::span<const double> measure) const = 0;
  /// out[i] = drift(xs[i], measure). The default is the pointwise loop.
  virtual void drift_field(std::span<const double> xs, std::span<const double> measure,
                           std::span<double> out) const;
  virtual double rate(double x) const = 0;
  virtual double jump(double x) const = 0;
  virtual double sample_initial(RngStream& rng) const = 0;
  virtual ModelBounds bounds() const = 0;

  /// True when b(x, mu) = integral of kernel(x, y) mu(dy).
  virtual bool is_linear() const { return false; }
  virtual double kernel(double x, double y) const;

 private:
  StableParams params_;
  DistanceFunctionA a_;
};

struct ReferenceParams {
  double kappa = 1.0;
  double cap = 1.0;
  double rate_min = 0.5;
  double rate_max = 2.0;
  double jump0 = 1.0;
  InitialLaw initial = UniformInitial{};
};

/// Built-in model whose coefficients are Lipschitz functions of a(x):
///   b(x, mu) = kappa (mu(ac) - ac(x)),  ac = min(a, cap)
///   f(x)     = f_min + (f_max - f_min)(1 - exp(-a(x)))
///   psi(x)   = psi0 / (1 + a(x))
class ReferenceModel final : public Model {
 public:
  ReferenceModel(StableParams params, ReferenceParams rp);

  std::string name() const override { return "reference"; }
  double capped_a(double x) const { return x >= cap_threshold_ ? rp_.cap : distance()(x); }
  double drift(double x, std::span<const double> measure) const override;
  void drift_field(std::span<const double> xs, std::span<const double> measure,
                   std::span<double> out) const override;
  double rate(double x) const override;
  double jump(double x) const override;
  double sample_initial(RngStream& rng) const override;
  ModelBounds bounds() const override;
  bool is_linear() const override { return true; }
  double kernel(double x, double y) const override;

  const ReferenceParams& reference_params() const { return rp_; }

 private:
  ReferenceParams rp_;
  double cap_threshold_;
};

struct ConstantParams {
  double drift = 0.0;
  double rate = 1.0;
  double jump = 0.0;
  InitialLaw initial = UniformInitial{};
};

/// Degenerate family: b, f and psi constant. A zero rate is accepted so the
/// all-rejected branch of the coupling can be exercised.
class ConstantModel final : public Model {
 public:
  ConstantModel(StableParams params, ConstantParams cp);

  std::string name() const override { return "constant"; }
  double drift(double, std::span<const double>) const override { return cp_.drift; }
  void drift_field(std::span<const double> xs, std::span<const double> measure,
                   std::span<double> out) const override;
  double rate(double) const override { return cp_.rate; }
  double jump(double) const override { return cp_.jump; }
  double sample_initial(RngStream& rng) const override;
  ModelBounds bounds() const override;
  bool is_linear() const override { return true; }
  double kernel(double, double) const override { return cp_.drift; }

  const ConstantParams& constant_params() const { return cp_; }

 private:
  ConstantParams cp_;
};

struct Coefficients {
  double drift;
  double rate;
  double jump;
};

/// (b(x, mu), f(x), psi(x)). Throws std::domain_error("state invariant
/// violated upstream") for x < 0 and std::invalid_argument for empty mu.
Coefficients evaluate_coefficients(const Model& model, double x, const EmpiricalMeasure& mu);

struct ConditionCheck {
  std::string name;
  double declared = 0.0;
  double worst_observed = 0.0;
  bool passed = true;
  double witness_x = 0.0;
  double witness_y = 0.0;
  std::size_t evaluations = 0;
};

struct ValidationReport {
  std::vector<ConditionCheck> checks;
  bool passed() const;
  /// Throws ModelValidationError naming the first failed check and its witness pair.
  void require_valid() const;
};

class ModelValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tolerance on declared constants.
inline constexpr double kValidationTolerance = 1e-9;

/// Empirical check of bounds, sign conditions and a-Lipschitz constants on
/// random positions and random empirical measures. The measure-Lipschitz
/// check uses the monotone coupling, which is optimal for the a-distance.
/// Throws std::invalid_argument if samples < 10^4.
ValidationReport validate_model(const Model& model, std::size_t samples, RngStream& rng);

}  // namespace stablemf
