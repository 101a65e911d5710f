#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stablemf/finite_system.hpp"
#include "stablemf/model.hpp"

namespace stablemf {

enum class SlotProvenance : std::uint8_t { from_atoms, fresh_draw };

/// Per-slot summary of the frozen-rate atoms in (k delta, (k+1) delta].
struct SlotRecord {
  std::size_t k = 0;
  std::int64_t P = 0;  // frozen-accepted atoms
  double A = 0.0;      // N^{-1/alpha} * sum of their u
  double Y = 0.0;      // (N/P)^{1/alpha} A, or a fresh stable draw when P = 0
  double dS = 0.0;     // delta^{1/alpha} Y
  SlotProvenance provenance = SlotProvenance::from_atoms;
};

/// Relative tolerance of the identity A (N delta / P)^{1/alpha} = dS.
inline constexpr double kIdentityTolerance = 0x1p-40;

/// Re-filters the trajectory's atoms with the frozen indicator
/// z <= f(X^j_{k delta}) and builds one record per slot. Empty slots draw Y
/// from stream (fresh_slot_draws, replication, k), which no simulation
/// stream shares. Throws std::out_of_range if a slot-start state is missing.
std::vector<SlotRecord> build_slot_records(const Trajectory& traj, const Model& model, std::uint64_t seed,
                                           std::uint64_t replication);

/// Stable subordinator restricted to the slot grid.
struct CoupledSubordinator {
  double delta = 0.0;
  std::vector<double> increments;
  std::vector<SlotProvenance> provenance;

  std::size_t slots() const { return increments.size(); }
  double horizon() const { return delta * static_cast<double>(increments.size()); }
  /// S at k delta for k = 0..slots.
  std::vector<double> cumulative() const;
};

/// Pastes per-slot increments into a grid path. Records must be ordered
/// k = 0, 1, 2, ...; a gap throws std::invalid_argument.
CoupledSubordinator paste_subordinator(const std::vector<SlotRecord>& records, double delta);

/// Wraps a directly sampled increment path on a uniform grid.
CoupledSubordinator subordinator_from_path(const IncrementPath& path);

class CouplingIdentityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct IdentityReport {
  std::size_t slots_checked = 0;  // slots with P != 0
  double max_relative_residual = 0.0;

  /// E_k = (P_k/(N delta))^{1/alpha} - (mu_{k delta}(f))^{1/alpha}, per slot.
  std::vector<double> slot_error;
  std::vector<double> mu_f;
  double slot_error_mean = 0.0;
  double slot_error_sd = 0.0;
  double slot_error_abs_mean = 0.0;

  /// Paths at grid times k delta, k = 0..slots. R = R1 + R2 with
  /// R = A^N - int (mu(f))^{1/alpha} dS, R1 = A^N - A^{N,delta}.
  std::vector<double> r_total;
  std::vector<double> r_live;
  std::vector<double> r_frozen;
  /// max_k |R_k - R1_k - R2_k|, relative to max(1, |A^N_k|, integral_k).
  double closure_residual = 0.0;

  /// |R_T|^q, |R1_T|^q, |R2_T|^q.
  double r_total_q = 0.0;
  double r_live_q = 0.0;
  double r_frozen_q = 0.0;
};

/// Checks A_k (N delta / P_k)^{1/alpha} = dS_k on every nonempty slot and
/// computes the decomposition of the interaction term. At grid times the
/// boundary corrections of the slot decomposition vanish, so R2 is the sum
/// of E_k dS_k over completed slots. Throws CouplingIdentityError if the
/// identity fails beyond kIdentityTolerance.
IdentityReport verify_interaction_identity(const Trajectory& traj, const std::vector<SlotRecord>& records,
                                           const Model& model);

}  // namespace stablemf
