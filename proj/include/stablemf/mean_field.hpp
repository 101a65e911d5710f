#pragma once

#include <span>
#include <vector>

#include "stablemf/coupling.hpp"
#include "stablemf/finite_system.hpp"
#include "stablemf/model.hpp"
#include "stablemf/transport.hpp"

namespace stablemf {

struct MeanFieldOptions {
  /// Euler substep; 0 means delta / 10.
  double substep = 0.0;
  int workers = 1;
  bool record_events = true;
};

/// N-particle mean-field system driven by a shared subordinator.
///
/// Inside slot k the drift uses the particles' own empirical measure and
/// particle i fires a main jump at its atom (s, z, u) iff z <= f(X_{s-});
/// u is ignored. At the slot end every particle moves by
/// (mu_{k delta}(f))^{1/alpha} dS_k with mu_{k delta}(f) the slot-start
/// empirical mean of f. The returned trajectory's slot_rates hold the
/// slot-start f values, so slot_mean_rates() gives the per-slot means.
/// Throws std::invalid_argument when N, delta or T disagree between inputs.
Trajectory simulate_mean_field(const Model& model, const CoupledSubordinator& sub, const AtomLog& atoms,
                               std::span<const double> initial, const MeanFieldOptions& options = {});

/// Per-slot empirical means of f at slot starts.
std::vector<double> slot_mean_rates(const Trajectory& traj);

/// Frozen inputs of one Picard step: per-slot means of f and per-slot
/// drift measures (slot-start positions of the previous iterate).
struct PicardGuess {
  std::vector<double> mean;
  /// slots x N; empty means "the initial positions in every slot".
  std::vector<double> measure;
};

/// Constant mean guess with the initial positions as drift measure.
PicardGuess picard_constant_guess(double mean, std::size_t slots);

struct PicardStep {
  Trajectory traj;
  PicardGuess next;
};

/// One Picard step: the drift's measure and the subordinator integrand come
/// from `prev`; positions, jump indicators and jump sizes use the current
/// iterate. Throws std::invalid_argument if a mean lies outside
/// [f_min, f_max] or sizes disagree.
PicardStep picard_iterate(const Model& model, const CoupledSubordinator& sub, const PicardGuess& prev,
                          const AtomLog& atoms, std::span<const double> initial,
                          const MeanFieldOptions& options = {});

/// max over grid times of the coupled a-distance between two trajectories
/// on the same grid.
double sup_coupled_a_distance(const Trajectory& x, const Trajectory& y, double q);

/// Empirical measure of the particles at grid time t.
/// Throws std::invalid_argument for t off the slot grid.
EmpiricalMeasure empirical_conditional_law(const Trajectory& traj, double t);

}  // namespace stablemf
