#include "stablemf/finite_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "euler.hpp"

namespace stablemf {

AtomLog generate_atoms(std::size_t particles, double horizon, double rate_max, double alpha,
                       std::uint64_t seed, std::uint64_t replication, StreamDomain domain) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(rate_max >= 0.0)) throw std::invalid_argument("rate_max must be nonnegative");
  AtomLog log;
  log.particles = particles;
  log.horizon = horizon;
  log.rate_max = rate_max;
  if (rate_max == 0.0) return log;
  for (std::size_t j = 0; j < particles; ++j) {
    RngStream rng(seed, stream_id(domain, replication, j));
    double s = 0.0;
    while (true) {
      s += rng.exponential() / rate_max;
      if (s > horizon) break;
      Atom atom;
      atom.s = s;
      atom.j = static_cast<std::uint32_t>(j);
      atom.z = rate_max * rng.uniform();
      atom.u = sample_stable(alpha, rng);
      log.atoms.push_back(atom);
    }
  }
  std::sort(log.atoms.begin(), log.atoms.end(),
            [](const Atom& x, const Atom& y) { return x.s < y.s || (x.s == y.s && x.j < y.j); });
  return log;
}

std::vector<double> draw_initial_positions(const Model& model, std::size_t particles, std::uint64_t seed,
                                           std::uint64_t replication, StreamDomain domain) {
  std::vector<double> xs(particles);
  for (std::size_t i = 0; i < particles; ++i) {
    RngStream rng(seed, stream_id(domain, replication, i));
    xs[i] = model.sample_initial(rng);
  }
  return xs;
}

SlotGrid SlotGrid::make(double horizon, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  const double ratio = horizon / delta;
  const double k = std::round(ratio);
  if (k < 1.0 || std::abs(k - ratio) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("horizon must be a multiple of delta");
  return SlotGrid{delta, static_cast<std::size_t>(k)};
}

std::size_t SlotGrid::slot_of(double s) const {
  if (slots == 0) throw std::logic_error("empty slot grid");
  std::size_t k = s <= 0.0 ? 0 : static_cast<std::size_t>(std::max(0.0, std::ceil(s / delta) - 1.0));
  k = std::min(k, slots - 1);
  while (k > 0 && s <= time(k)) --k;
  while (k + 1 < slots && s > time(k + 1)) ++k;
  return k;
}

double delta_rule_raw(std::size_t particles, double alpha, double q) {
  const double exponent = -(2.0 / (2.0 + q)) * (1.0 - q / alpha + q / 2.0);
  return std::pow(static_cast<double>(particles), exponent);
}

SlotGrid delta_rule_grid(std::size_t particles, double alpha, double q, double horizon) {
  const double raw = delta_rule_raw(particles, alpha, q);
  auto k = static_cast<std::size_t>(std::max(1.0, std::round(horizon / raw)));
  while (horizon / static_cast<double>(k) >= 1.0) ++k;
  return SlotGrid{horizon / static_cast<double>(k), k};
}

std::span<const double> Trajectory::state(std::size_t k) const {
  if ((k + 1) * particles > slot_states.size()) throw std::out_of_range("missing slot-start state");
  return {slot_states.data() + k * particles, particles};
}

std::span<const double> Trajectory::rates(std::size_t k) const {
  if ((k + 1) * particles > slot_rates.size()) throw std::out_of_range("missing slot rates");
  return {slot_rates.data() + k * particles, particles};
}

Trajectory simulate_finite(const Model& model, std::span<const double> initial, const AtomLog& atoms,
                           const SimulationOptions& options) {
  const std::size_t n = initial.size();
  if (n < 2) throw std::invalid_argument("finite system needs N >= 2");
  if (atoms.particles != n) throw std::invalid_argument("atom log built for a different N");
  const SlotGrid grid = SlotGrid::make(options.horizon, options.delta);
  const double h = options.substep > 0.0 ? options.substep : grid.delta / 10.0;
  if (!(h <= grid.delta * (1.0 + 1e-12))) throw std::invalid_argument("substep must not exceed delta");
  if (atoms.horizon + 1e-12 < grid.horizon()) throw std::invalid_argument("atom log shorter than horizon");
  if (atoms.rate_max + 1e-15 < model.bounds().rate_max)
    throw std::invalid_argument("atom log dominating rate below f_max");
  for (double x : initial)
    if (!(x >= 0.0)) throw std::domain_error("initial positions must be nonnegative");

  Trajectory traj;
  traj.particles = n;
  traj.grid = grid;
  traj.substep = h;
  traj.atoms = atoms;
  traj.slot_states.reserve((grid.slots + 1) * n);
  traj.slot_rates.reserve(grid.slots * n);

  const double collateral_scale = std::pow(static_cast<double>(n), -model.params().inv_alpha());
  std::vector<double> xs(initial.begin(), initial.end());
  internal::DriftIntegrator integrator(model, h, options.workers, n);
  integrator.observe(xs);
  traj.slot_states.insert(traj.slot_states.end(), xs.begin(), xs.end());

  double t = 0.0;
  std::size_t next_atom = 0;
  auto& log = traj.atoms.atoms;
  for (std::size_t k = 0; k < grid.slots; ++k) {
    for (double x : xs) traj.slot_rates.push_back(model.rate(x));
    const double slot_end = grid.time(k + 1);
    for (; next_atom < log.size() && log[next_atom].s <= slot_end; ++next_atom) {
      Atom& atom = log[next_atom];
      integrator.advance(xs, t, atom.s);
      t = atom.s;
      const double before = xs[atom.j];
      atom.accepted_live = atom.z <= model.rate(before);
      if (!atom.accepted_live) continue;
      const double kick = atom.u * collateral_scale;
      for (std::size_t i = 0; i < n; ++i) xs[i] += kick;
      xs[atom.j] = before + model.jump(before);
      integrator.observe(xs);
      ++traj.accepted;
      if (options.record_events) traj.events.push_back({atom.s, atom.j, before, xs[atom.j]});
    }
    integrator.advance(xs, t, slot_end);
    t = slot_end;
    traj.slot_states.insert(traj.slot_states.end(), xs.begin(), xs.end());
  }
  // Atoms past the horizon (possible when the log is longer) are dropped.
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

Trajectory simulate_finite(const Model& model, std::size_t particles, const SimulationOptions& options,
                           std::uint64_t seed, std::uint64_t replication) {
  const auto initial = draw_initial_positions(model, particles, seed, replication);
  const auto atoms = generate_atoms(particles, options.horizon, model.bounds().rate_max,
                                    model.params().alpha(), seed, replication);
  return simulate_finite(model, initial, atoms, options);
}

InteractionPaths interaction_paths(const Trajectory& traj, double alpha) {
  const std::size_t slots = traj.grid.slots;
  const double scale = std::pow(static_cast<double>(traj.particles), -1.0 / alpha);
  std::vector<double> live_sum(slots, 0.0), frozen_sum(slots, 0.0);
  for (const Atom& atom : traj.atoms.atoms) {
    const std::size_t k = traj.grid.slot_of(atom.s);
    if (atom.accepted_live) live_sum[k] += atom.u;
    if (atom.z <= traj.rates(k)[atom.j]) frozen_sum[k] += atom.u;
  }
  InteractionPaths paths;
  paths.live.assign(slots + 1, 0.0);
  paths.frozen.assign(slots + 1, 0.0);
  paths.residual.assign(slots + 1, 0.0);
  for (std::size_t k = 0; k < slots; ++k) {
    paths.live[k + 1] = paths.live[k] + scale * live_sum[k];
    paths.frozen[k + 1] = paths.frozen[k] + scale * frozen_sum[k];
    paths.residual[k + 1] = paths.live[k + 1] - paths.frozen[k + 1];
  }
  return paths;
}

}  // namespace stablemf
