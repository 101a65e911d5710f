#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "stablemf/model.hpp"
#include "stablemf/rng.hpp"

namespace stablemf {

/// One atom (s, z, u) of the Poisson measure of particle j. Atoms are
/// proposed at the dominating rate f_max; z is uniform on [0, f_max] and u
/// is a stable draw, stored whether or not the atom is accepted.
struct Atom {
  double s = 0.0;
  std::uint32_t j = 0;  // 0-based particle index
  double z = 0.0;
  double u = 0.0;
  bool accepted_live = false;  // z <= f(X^j_{s-}) in the run that produced the log
};

/// All atoms on (0, T], sorted by time.
struct AtomLog {
  std::size_t particles = 0;
  double horizon = 0.0;
  double rate_max = 0.0;
  std::vector<Atom> atoms;
};

/// Per-particle Poisson processes of rate rate_max on (0, horizon]. Particle
/// j's atoms come from stream (domain, replication, j) and do not depend on
/// the number of particles.
AtomLog generate_atoms(std::size_t particles, double horizon, double rate_max, double alpha,
                       std::uint64_t seed, std::uint64_t replication,
                       StreamDomain domain = StreamDomain::particle_atoms);

/// Initial positions drawn from the model's initial law, one substream per particle.
std::vector<double> draw_initial_positions(const Model& model, std::size_t particles, std::uint64_t seed,
                                           std::uint64_t replication,
                                           StreamDomain domain = StreamDomain::initial_positions);

/// Slot grid tau_s = k delta for s in (k delta, (k+1) delta].
struct SlotGrid {
  double delta = 0.0;
  std::size_t slots = 0;

  /// Validates 0 < delta < 1 and that horizon is a multiple of delta.
  static SlotGrid make(double horizon, double delta);
  double horizon() const { return delta * static_cast<double>(slots); }
  double time(std::size_t k) const { return delta * static_cast<double>(k); }
  /// Slot containing s > 0, using the left-open convention.
  std::size_t slot_of(double s) const;
};

/// delta(N) = N^{-(2/(2+q))(1 - q/alpha + q/2)}, adjusted so horizon/delta is an integer.
double delta_rule_raw(std::size_t particles, double alpha, double q);
SlotGrid delta_rule_grid(std::size_t particles, double alpha, double q, double horizon);

struct SimulationOptions {
  double horizon = 1.0;
  double delta = 0.2;
  /// Euler substep; 0 means delta / 10.
  double substep = 0.0;
  int workers = 1;
  bool record_events = true;
};

/// Accepted main jump of particle j at time s.
struct EventRecord {
  double s = 0.0;
  std::uint32_t j = 0;
  double before = 0.0;
  double after = 0.0;
};

struct Trajectory {
  std::size_t particles = 0;
  SlotGrid grid;
  double substep = 0.0;
  /// (slots + 1) x particles, row k = positions at time k delta.
  std::vector<double> slot_states;
  /// slots x particles, row k = f(X^j_{k delta}).
  std::vector<double> slot_rates;
  AtomLog atoms;
  std::vector<EventRecord> events;

  double min_position = 0.0;
  /// Running maximum of each particle's position over [0, T].
  std::vector<double> max_position;
  std::size_t accepted = 0;
  std::size_t clamp_count = 0;
  std::size_t particle_steps = 0;
  bool clamp_warning = false;

  std::span<const double> state(std::size_t k) const;
  std::span<const double> rates(std::size_t k) const;
  std::span<const double> initial() const { return state(0); }
  std::span<const double> final_state() const { return state(grid.slots); }
};

class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Clamp-rate threshold above which a trajectory carries a warning.
inline constexpr double kClampWarningFraction = 1e-3;

/// Exact-event simulation of the N-particle system by thinning.
///
/// Between candidate times the coupled drift ODE is integrated with explicit
/// Euler substeps of at most h, ending exactly at each candidate time. At a
/// candidate (s, j, z, u) the atom is accepted iff z <= f(X^j_{s-}); then
/// X^j += psi(X^j_{s-}) and every other particle moves by u / N^{1/alpha}.
/// Negative Euler undershoots are clamped to 0 and counted.
/// Throws NumericalAbort on a non-finite state and std::invalid_argument on
/// bad sizes or options.
Trajectory simulate_finite(const Model& model, std::span<const double> initial, const AtomLog& atoms,
                           const SimulationOptions& options);

/// Convenience form drawing initial positions and atoms from (seed, replication).
Trajectory simulate_finite(const Model& model, std::size_t particles, const SimulationOptions& options,
                           std::uint64_t seed, std::uint64_t replication = 0);

/// Interaction term A^N (live indicators), its frozen-rate version A^{N,delta}
/// and their difference R^{N,1}, at every slot boundary.
struct InteractionPaths {
  std::vector<double> live;
  std::vector<double> frozen;
  std::vector<double> residual;
};

InteractionPaths interaction_paths(const Trajectory& traj, double alpha);

}  // namespace stablemf
