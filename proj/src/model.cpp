#include "stablemf/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stablemf/parallel.hpp"

namespace stablemf {

double sample_initial(const InitialLaw& law, RngStream& rng) {
  return std::visit(
      [&](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, UniformInitial>) {
          return rng.uniform(l.lo, l.hi);
        } else {
          // Box-Muller, one branch
          const double r = std::sqrt(-2.0 * std::log(rng.uniform()));
          const double z = r * std::cos(2.0 * M_PI * rng.uniform());
          return std::exp(l.mu + l.sigma * z);
        }
      },
      law);
}

double initial_moment(const InitialLaw& law, double p) {
  return std::visit(
      [&](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, UniformInitial>) {
          return (std::pow(l.hi, p + 1.0) - std::pow(l.lo, p + 1.0)) / ((p + 1.0) * (l.hi - l.lo));
        } else {
          return std::exp(p * l.mu + 0.5 * p * p * l.sigma * l.sigma);
        }
      },
      law);
}

namespace {

void check_initial_law(const InitialLaw& law) {
  std::visit(
      [](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, UniformInitial>) {
          if (!(l.lo > 0.0 && l.hi > l.lo)) throw std::invalid_argument("uniform initial law needs 0 < lo < hi");
        } else {
          if (!(l.sigma > 0.0)) throw std::invalid_argument("log-normal initial law needs sigma > 0");
        }
      },
      law);
}

}  // namespace

void Model::drift_field(std::span<const double> xs, std::span<const double> measure,
                        std::span<double> out) const {
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = drift(xs[i], measure);
}

double Model::kernel(double, double) const {
  throw std::logic_error(name() + " model has no linear kernel");
}

ReferenceModel::ReferenceModel(StableParams params, ReferenceParams rp) : Model(params), rp_(rp) {
  if (!(rp.kappa > 0.0)) throw std::invalid_argument("reference model needs kappa > 0");
  if (!(rp.cap > 0.0)) throw std::invalid_argument("reference model needs cap > 0");
  if (!(rp.rate_min > 0.0 && rp.rate_max >= rp.rate_min))
    throw std::invalid_argument("reference model needs 0 < rate_min <= rate_max");
  if (!(rp.jump0 >= 0.0)) throw std::invalid_argument("reference model needs jump0 >= 0");
  check_initial_law(rp.initial);
  cap_threshold_ = distance().inverse(rp.cap);
}

double ReferenceModel::drift(double x, std::span<const double> measure) const {
  double s = 0.0;
  for (double y : measure) s += capped_a(y);
  return rp_.kappa * (s / static_cast<double>(measure.size()) - capped_a(x));
}

void ReferenceModel::drift_field(std::span<const double> xs, std::span<const double> measure,
                                 std::span<double> out) const {
  std::vector<double> ac(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ac[i] = capped_a(xs[i]);
  double mean;
  if (xs.data() == measure.data() && xs.size() == measure.size()) {
    mean = tree_mean(ac);
  } else {
    std::vector<double> am(measure.size());
    for (std::size_t i = 0; i < measure.size(); ++i) am[i] = capped_a(measure[i]);
    mean = tree_mean(am);
  }
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = rp_.kappa * (mean - ac[i]);
}

double ReferenceModel::rate(double x) const {
  return rp_.rate_min + (rp_.rate_max - rp_.rate_min) * -std::expm1(-distance()(x));
}

double ReferenceModel::jump(double x) const { return rp_.jump0 / (1.0 + distance()(x)); }

double ReferenceModel::sample_initial(RngStream& rng) const { return stablemf::sample_initial(rp_.initial, rng); }

ModelBounds ReferenceModel::bounds() const {
  ModelBounds b;
  b.drift_sup = rp_.kappa * rp_.cap;
  b.rate_min = rp_.rate_min;
  b.rate_max = rp_.rate_max;
  b.jump_max = rp_.jump0;
  b.lip_drift_x = rp_.kappa;
  b.lip_drift_mu = rp_.kappa;
  b.lip_rate = rp_.rate_max - rp_.rate_min;
  b.lip_jump = rp_.jump0;
  b.initial_moment_order = std::max(2.0 * params().alpha(), 1.0);
  b.initial_moment = initial_moment(rp_.initial, b.initial_moment_order);
  return b;
}

double ReferenceModel::kernel(double x, double y) const { return rp_.kappa * (capped_a(y) - capped_a(x)); }

ConstantModel::ConstantModel(StableParams params, ConstantParams cp) : Model(params), cp_(cp) {
  if (!(cp.drift >= 0.0)) throw std::invalid_argument("constant model needs drift >= 0");
  if (!(cp.rate >= 0.0)) throw std::invalid_argument("constant model needs rate >= 0");
  if (!(cp.jump >= 0.0)) throw std::invalid_argument("constant model needs jump >= 0");
  check_initial_law(cp.initial);
}

void ConstantModel::drift_field(std::span<const double> xs, std::span<const double>,
                                std::span<double> out) const {
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(xs.size()), cp_.drift);
}

double ConstantModel::sample_initial(RngStream& rng) const { return stablemf::sample_initial(cp_.initial, rng); }

ModelBounds ConstantModel::bounds() const {
  ModelBounds b;
  b.drift_sup = cp_.drift;
  b.rate_min = cp_.rate;
  b.rate_max = cp_.rate;
  b.jump_max = cp_.jump;
  b.initial_moment_order = std::max(2.0 * params().alpha(), 1.0);
  b.initial_moment = initial_moment(cp_.initial, b.initial_moment_order);
  return b;
}

Coefficients evaluate_coefficients(const Model& model, double x, const EmpiricalMeasure& mu) {
  if (x < 0.0) throw std::domain_error("state invariant violated upstream");
  if (mu.size() == 0) throw std::invalid_argument("empirical measure must be nonempty");
  return {model.drift(x, mu.atoms), model.rate(x), model.jump(x)};
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

void ValidationReport::require_valid() const {
  for (const auto& c : checks) {
    if (c.passed) continue;
    std::ostringstream msg;
    msg << "model validation failed: " << c.name << " declared " << c.declared << " observed "
        << c.worst_observed << " witness (" << c.witness_x << ", " << c.witness_y << ")";
    throw ModelValidationError(msg.str());
  }
}

namespace {

// Tracks the worst value of a statistic that must stay <= declared.
struct Tracker {
  ConditionCheck c;
  Tracker(std::string name, double declared) {
    c.name = std::move(name);
    c.declared = declared;
    c.worst_observed = -INFINITY;
  }
  void observe(double value, double x, double y) {
    ++c.evaluations;
    if (value > c.worst_observed) {
      c.worst_observed = value;
      c.witness_x = x;
      c.witness_y = y;
    }
    if (value > c.declared + kValidationTolerance) c.passed = false;
  }
};

double draw_position(RngStream& rng) {
  if (rng.uniform() < 0.5) return 3.0 * rng.uniform();
  return std::exp(std::log(1e-3) + rng.uniform() * (std::log(1e4) - std::log(1e-3)));
}

std::vector<double> draw_measure(RngStream& rng, std::size_t n) {
  std::vector<double> atoms(n);
  for (auto& x : atoms) x = draw_position(rng);
  return atoms;
}

}  // namespace

ValidationReport validate_model(const Model& model, std::size_t samples, RngStream& rng) {
  if (samples < 10000) throw std::invalid_argument("validate_model needs at least 10^4 samples");
  const ModelBounds b = model.bounds();
  const auto& a = model.distance();

  Tracker rate_positive("rate_min_positive", 0.0);
  rate_positive.observe(-b.rate_min, b.rate_min, 0.0);
  if (!(b.rate_min > 0.0)) rate_positive.c.passed = false;
  Tracker rate_lower("rate_lower_bound", 0.0);  // f_min - f(x) <= 0
  Tracker rate_upper("rate_upper_bound", b.rate_max);
  Tracker jump_lower("jump_nonnegative", 0.0);  // -psi(x) <= 0
  Tracker jump_upper("jump_upper_bound", b.jump_max);
  Tracker drift_sup("drift_bound", b.drift_sup);
  Tracker drift_zero("drift_nonnegative_at_zero", 0.0);  // -b(0, mu) <= 0
  Tracker lip_rate("rate_a_lipschitz", b.lip_rate);
  Tracker lip_jump("jump_a_lipschitz", b.lip_jump);
  Tracker lip_bx("drift_x_a_lipschitz", b.lip_drift_x);
  Tracker lip_bmu("drift_mu_a_lipschitz", b.lip_drift_mu);
  Tracker linear("linear_kernel_consistency", 0.0);
  Tracker init_support("initial_law_positive", 0.0);  // -X0 < 0
  Tracker init_moment("initial_moment_declared", b.initial_moment);

  double moment_sum = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double x = draw_position(rng);
    const double y = draw_position(rng);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 16.0);
    const auto mu = draw_measure(rng, n);
    auto nu = draw_measure(rng, n);

    const double fx = model.rate(x), fy = model.rate(y);
    const double px = model.jump(x), py = model.jump(y);
    rate_lower.observe(b.rate_min - fx, x, y);
    rate_upper.observe(fx, x, y);
    jump_lower.observe(-px, x, y);
    jump_upper.observe(px, x, y);

    const double bx = model.drift(x, mu);
    const double by = model.drift(y, mu);
    drift_sup.observe(std::abs(bx), x, y);
    drift_zero.observe(-model.drift(0.0, mu), 0.0, mu.front());

    const double da = std::abs(a(x) - a(y));
    if (da > 0.0) {
      lip_rate.observe(std::abs(fx - fy) / da, x, y);
      lip_jump.observe(std::abs(px - py) / da, x, y);
      lip_bx.observe(std::abs(bx - by) / da, x, y);
    }
    const double wa = quantile_coupling_cost(EmpiricalMeasure(mu), EmpiricalMeasure(nu),
                                             TransportCost::a_distance(a.q()));
    if (wa > 0.0) lip_bmu.observe(std::abs(bx - model.drift(x, nu)) / wa, x, y);

    if (model.is_linear()) {
      double k = 0.0;
      for (double atom : mu) k += model.kernel(x, atom);
      k /= static_cast<double>(mu.size());
      linear.observe(std::abs(k - bx), x, mu.front());
    }

    const double x0 = model.sample_initial(rng);
    init_support.observe(x0 > 0.0 ? -1.0 : 1.0, x0, 0.0);
    moment_sum += std::pow(x0, b.initial_moment_order);
  }
  // The empirical moment is reported; finiteness is what the declaration asserts.
  init_moment.c.worst_observed = moment_sum / static_cast<double>(samples);
  init_moment.c.passed = std::isfinite(b.initial_moment) && std::isfinite(init_moment.c.worst_observed);
  init_moment.c.evaluations = samples;

  ValidationReport report;
  for (Tracker* t : {&rate_positive, &rate_lower, &rate_upper, &jump_lower, &jump_upper, &drift_sup,
                     &drift_zero, &lip_rate, &lip_jump, &lip_bx, &lip_bmu, &linear, &init_support,
                     &init_moment}) {
    if (t == &linear && !model.is_linear()) continue;
    if (t->c.evaluations == 0) t->c.worst_observed = 0.0;
    report.checks.push_back(t->c);
  }
  return report;
}

}  // namespace stablemf
