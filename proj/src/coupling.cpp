#include "stablemf/coupling.hpp"

#include <cmath>
#include <sstream>

#include "stablemf/parallel.hpp"

namespace stablemf {

std::vector<SlotRecord> build_slot_records(const Trajectory& traj, const Model& model, std::uint64_t seed,
                                           std::uint64_t replication) {
  const std::size_t n = traj.particles;
  const std::size_t slots = traj.grid.slots;
  const double inv_alpha = model.params().inv_alpha();
  const double delta = traj.grid.delta;
  // Every slot start, including the last, must be present before any work.
  traj.state(slots);

  std::vector<std::vector<double>> frozen(slots);
  for (std::size_t k = 0; k < slots; ++k) {
    const auto xs = traj.state(k);
    frozen[k].resize(n);
    for (std::size_t j = 0; j < n; ++j) frozen[k][j] = model.rate(xs[j]);
  }

  std::vector<SlotRecord> records(slots);
  std::vector<double> usum(slots, 0.0);
  for (std::size_t k = 0; k < slots; ++k) records[k].k = k;
  for (const Atom& atom : traj.atoms.atoms) {
    const std::size_t k = traj.grid.slot_of(atom.s);
    if (atom.z <= frozen[k][atom.j]) {
      ++records[k].P;
      usum[k] += atom.u;
    }
  }

  const double n_scale = std::pow(static_cast<double>(n), -inv_alpha);
  const double delta_scale = std::pow(delta, inv_alpha);
  for (std::size_t k = 0; k < slots; ++k) {
    SlotRecord& r = records[k];
    if (r.P != 0) {
      r.A = n_scale * usum[k];
      r.Y = std::pow(static_cast<double>(n) / static_cast<double>(r.P), inv_alpha) * r.A;
      r.provenance = SlotProvenance::from_atoms;
    } else {
      RngStream rng(seed, stream_id(StreamDomain::fresh_slot_draws, replication, k));
      r.A = 0.0;
      r.Y = sample_stable(model.params(), rng);
      r.provenance = SlotProvenance::fresh_draw;
    }
    r.dS = delta_scale * r.Y;
  }
  return records;
}

std::vector<double> CoupledSubordinator::cumulative() const {
  std::vector<double> s(increments.size() + 1, 0.0);
  for (std::size_t k = 0; k < increments.size(); ++k) s[k + 1] = s[k] + increments[k];
  return s;
}

CoupledSubordinator paste_subordinator(const std::vector<SlotRecord>& records, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  CoupledSubordinator sub;
  sub.delta = delta;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].k != i) {
      std::ostringstream msg;
      msg << "gap in slot indices: expected " << i << ", found " << records[i].k;
      throw std::invalid_argument(msg.str());
    }
    sub.increments.push_back(records[i].dS);
    sub.provenance.push_back(records[i].provenance);
  }
  return sub;
}

CoupledSubordinator subordinator_from_path(const IncrementPath& path) {
  if (path.grid.size() < 2) throw std::invalid_argument("degenerate grid");
  const std::size_t slots = path.increments.size();
  const double delta = path.grid.back() / static_cast<double>(slots);
  for (std::size_t k = 0; k <= slots; ++k) {
    if (std::abs(path.grid[k] - delta * static_cast<double>(k)) > 1e-12 * std::max(1.0, path.grid.back()))
      throw std::invalid_argument("subordinator grid is not uniform");
  }
  CoupledSubordinator sub;
  sub.delta = delta;
  sub.increments = path.increments;
  sub.provenance.assign(slots, SlotProvenance::fresh_draw);
  return sub;
}

IdentityReport verify_interaction_identity(const Trajectory& traj, const std::vector<SlotRecord>& records,
                                           const Model& model) {
  const std::size_t slots = traj.grid.slots;
  if (records.size() != slots) throw std::invalid_argument("slot records do not match the trajectory grid");
  const double alpha = model.params().alpha();
  const double inv_alpha = 1.0 / alpha;
  const double q = model.params().q();
  const double n = static_cast<double>(traj.particles);
  const double delta = traj.grid.delta;

  IdentityReport rep;
  rep.slot_error.resize(slots);
  rep.mu_f.resize(slots);
  std::vector<double> frozen_rates(traj.particles);
  for (std::size_t k = 0; k < slots; ++k) {
    const SlotRecord& r = records[k];
    if (r.k != k) throw std::invalid_argument("slot records out of order");
    if (r.P != 0) {
      const double lhs = r.A * std::pow(n * delta / static_cast<double>(r.P), inv_alpha);
      const double rel = std::abs(lhs - r.dS) / r.dS;
      ++rep.slots_checked;
      rep.max_relative_residual = std::max(rep.max_relative_residual, rel);
      if (!(rel <= kIdentityTolerance)) {
        std::ostringstream msg;
        msg << "coupling identity violated in slot " << k << ": relative residual " << rel;
        throw CouplingIdentityError(msg.str());
      }
    } else if (r.A != 0.0) {
      throw CouplingIdentityError("empty slot with nonzero collateral sum");
    }
    const auto xs = traj.state(k);
    for (std::size_t j = 0; j < traj.particles; ++j) frozen_rates[j] = model.rate(xs[j]);
    rep.mu_f[k] = tree_mean(frozen_rates);
    rep.slot_error[k] =
        std::pow(static_cast<double>(r.P) / (n * delta), inv_alpha) - std::pow(rep.mu_f[k], inv_alpha);
  }
  if (slots > 0) {
    rep.slot_error_mean = tree_mean(rep.slot_error);
    std::vector<double> dev(slots), absv(slots);
    for (std::size_t k = 0; k < slots; ++k) {
      dev[k] = (rep.slot_error[k] - rep.slot_error_mean) * (rep.slot_error[k] - rep.slot_error_mean);
      absv[k] = std::abs(rep.slot_error[k]);
    }
    rep.slot_error_sd = slots > 1 ? std::sqrt(tree_sum(dev) / static_cast<double>(slots - 1)) : 0.0;
    rep.slot_error_abs_mean = tree_mean(absv);
  }

  const InteractionPaths paths = interaction_paths(traj, alpha);
  rep.r_total.assign(slots + 1, 0.0);
  rep.r_live.assign(slots + 1, 0.0);
  rep.r_frozen.assign(slots + 1, 0.0);
  double integral = 0.0, r2 = 0.0;
  for (std::size_t k = 0; k < slots; ++k) {
    integral += std::pow(rep.mu_f[k], inv_alpha) * records[k].dS;
    r2 += rep.slot_error[k] * records[k].dS;
    rep.r_total[k + 1] = paths.live[k + 1] - integral;
    rep.r_live[k + 1] = paths.residual[k + 1];
    rep.r_frozen[k + 1] = r2;
    const double scale = std::max({1.0, std::abs(paths.live[k + 1]), integral});
    rep.closure_residual =
        std::max(rep.closure_residual, std::abs(rep.r_total[k + 1] - rep.r_live[k + 1] - r2) / scale);
  }
  rep.r_total_q = std::pow(std::abs(rep.r_total.back()), q);
  rep.r_live_q = std::pow(std::abs(rep.r_live.back()), q);
  rep.r_frozen_q = std::pow(std::abs(rep.r_frozen.back()), q);
  return rep;
}

}  // namespace stablemf
