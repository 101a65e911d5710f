#include "stablemf/mean_field.hpp"

#include <cmath>
#include <sstream>

#include "euler.hpp"
#include "stablemf/parallel.hpp"

namespace stablemf {

namespace {

void check_inputs(const CoupledSubordinator& sub, const AtomLog& atoms, std::span<const double> initial,
                  const Model& model) {
  if (initial.empty()) throw std::invalid_argument("mean-field system needs N >= 1");
  if (atoms.particles != initial.size()) throw std::invalid_argument("atom log built for a different N");
  if (sub.slots() == 0) throw std::invalid_argument("subordinator has no slots");
  if (!(sub.delta > 0.0 && sub.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (atoms.horizon + 1e-12 < sub.horizon()) throw std::invalid_argument("atom log shorter than horizon");
  if (atoms.rate_max + 1e-15 < model.bounds().rate_max)
    throw std::invalid_argument("atom log dominating rate below f_max");
  for (double x : initial)
    if (!(x >= 0.0)) throw std::domain_error("initial positions must be nonnegative");
}

// Shared slot loop. measure_of(k) gives the drift measure for slot k (empty
// span means the current positions), integrand_of(k, rates) the factor
// multiplying dS_k.
template <class MeasureOf, class IntegrandOf>
Trajectory run_slots(const Model& model, const CoupledSubordinator& sub, const AtomLog& atoms,
                     std::span<const double> initial, const MeanFieldOptions& options, MeasureOf measure_of,
                     IntegrandOf integrand_of) {
  const std::size_t n = initial.size();
  const SlotGrid grid{sub.delta, sub.slots()};
  const double h = options.substep > 0.0 ? options.substep : grid.delta / 10.0;
  if (!(h <= grid.delta * (1.0 + 1e-12))) throw std::invalid_argument("substep must not exceed delta");

  Trajectory traj;
  traj.particles = n;
  traj.grid = grid;
  traj.substep = h;
  traj.atoms = atoms;
  traj.slot_states.reserve((grid.slots + 1) * n);
  traj.slot_rates.reserve(grid.slots * n);

  std::vector<double> xs(initial.begin(), initial.end());
  internal::DriftIntegrator integrator(model, h, options.workers, n);
  integrator.observe(xs);
  traj.slot_states.insert(traj.slot_states.end(), xs.begin(), xs.end());

  double t = 0.0;
  std::size_t next_atom = 0;
  auto& log = traj.atoms.atoms;
  std::vector<double> rates(n);
  for (std::size_t k = 0; k < grid.slots; ++k) {
    for (std::size_t i = 0; i < n; ++i) rates[i] = model.rate(xs[i]);
    traj.slot_rates.insert(traj.slot_rates.end(), rates.begin(), rates.end());
    const double factor = integrand_of(k, std::span<const double>(rates));
    const std::span<const double> measure = measure_of(k);
    const double slot_end = grid.time(k + 1);
    for (; next_atom < log.size() && log[next_atom].s <= slot_end; ++next_atom) {
      Atom& atom = log[next_atom];
      integrator.advance(xs, t, atom.s, measure);
      t = atom.s;
      const double before = xs[atom.j];
      atom.accepted_live = atom.z <= model.rate(before);
      if (!atom.accepted_live) continue;
      xs[atom.j] = before + model.jump(before);
      integrator.observe_one(atom.j, xs[atom.j]);
      ++traj.accepted;
      if (options.record_events) traj.events.push_back({atom.s, atom.j, before, xs[atom.j]});
    }
    integrator.advance(xs, t, slot_end, measure);
    t = slot_end;
    const double kick = factor * sub.increments[k];
    for (double& x : xs) x += kick;
    integrator.observe(xs);
    traj.slot_states.insert(traj.slot_states.end(), xs.begin(), xs.end());
  }
  log.resize(next_atom);

  traj.min_position = integrator.min_position();
  traj.max_position = integrator.max_position();
  traj.clamp_count = integrator.clamps();
  traj.particle_steps = integrator.particle_steps();
  traj.clamp_warning = traj.particle_steps > 0 &&
                       static_cast<double>(traj.clamp_count) >
                           kClampWarningFraction * static_cast<double>(traj.particle_steps);
  return traj;
}

}  // namespace

Trajectory simulate_mean_field(const Model& model, const CoupledSubordinator& sub, const AtomLog& atoms,
                               std::span<const double> initial, const MeanFieldOptions& options) {
  check_inputs(sub, atoms, initial, model);
  const double inv_alpha = model.params().inv_alpha();
  return run_slots(
      model, sub, atoms, initial, options, [](std::size_t) { return std::span<const double>(); },
      [&](std::size_t, std::span<const double> rates) { return std::pow(tree_mean(rates), inv_alpha); });
}

std::vector<double> slot_mean_rates(const Trajectory& traj) {
  std::vector<double> means(traj.grid.slots);
  for (std::size_t k = 0; k < traj.grid.slots; ++k) means[k] = tree_mean(traj.rates(k));
  return means;
}

PicardGuess picard_constant_guess(double mean, std::size_t slots) { return {std::vector<double>(slots, mean), {}}; }

PicardStep picard_iterate(const Model& model, const CoupledSubordinator& sub, const PicardGuess& prev,
                          const AtomLog& atoms, std::span<const double> initial, const MeanFieldOptions& options) {
  check_inputs(sub, atoms, initial, model);
  const std::size_t n = initial.size();
  const std::size_t slots = sub.slots();
  if (prev.mean.size() != slots) throw std::invalid_argument("previous mean needs one value per slot");
  if (!prev.measure.empty() && prev.measure.size() != slots * n)
    throw std::invalid_argument("previous drift measure has the wrong shape");
  const ModelBounds b = model.bounds();
  for (std::size_t k = 0; k < slots; ++k) {
    const double m = prev.mean[k];
    if (!(m >= b.rate_min - kValidationTolerance && m <= b.rate_max + kValidationTolerance)) {
      std::ostringstream msg;
      msg << "previous mean " << m << " in slot " << k << " lies outside [f_min, f_max]";
      throw std::invalid_argument(msg.str());
    }
  }
  const double inv_alpha = model.params().inv_alpha();
  PicardStep step;
  step.traj = run_slots(
      model, sub, atoms, initial, options,
      [&](std::size_t k) {
        if (prev.measure.empty()) return initial;
        return std::span<const double>(prev.measure.data() + k * n, n);
      },
      [&](std::size_t k, std::span<const double>) { return std::pow(prev.mean[k], inv_alpha); });
  step.next.mean = slot_mean_rates(step.traj);
  step.next.measure.assign(step.traj.slot_states.begin(),
                           step.traj.slot_states.begin() + static_cast<std::ptrdiff_t>(slots * n));
  return step;
}

double sup_coupled_a_distance(const Trajectory& x, const Trajectory& y, double q) {
  if (x.particles != y.particles || x.grid.slots != y.grid.slots)
    throw std::invalid_argument("trajectories live on different grids");
  double worst = 0.0;
  for (std::size_t k = 0; k <= x.grid.slots; ++k)
    worst = std::max(worst, coupled_a_distance(x.state(k), y.state(k), q));
  return worst;
}

EmpiricalMeasure empirical_conditional_law(const Trajectory& traj, double t) {
  const double ratio = t / traj.grid.delta;
  const double k = std::round(ratio);
  if (!(k >= 0.0 && k <= static_cast<double>(traj.grid.slots)) || std::abs(ratio - k) > 1e-9) {
    std::ostringstream msg;
    msg << "time " << t << " is not on the slot grid";
    throw std::invalid_argument(msg.str());
  }
  const auto xs = traj.state(static_cast<std::size_t>(k));
  return EmpiricalMeasure(std::vector<double>(xs.begin(), xs.end()));
}

}  // namespace stablemf
