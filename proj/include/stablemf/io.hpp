#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "stablemf/battery.hpp"
#include "stablemf/coupling.hpp"
#include "stablemf/experiment.hpp"
#include "stablemf/finite_system.hpp"

namespace stablemf {

// CSV writers. Every file starts with a header row; reals are written with
// 17 significant digits so files round-trip and compare byte for byte.

/// s,j,z,u,accepted_live (j is 1-based).
void write_atoms_csv(std::ostream& out, const AtomLog& atoms);
/// k,P_k,A_k,Y_k,dS_k,provenance
void write_slots_csv(std::ostream& out, const std::vector<SlotRecord>& records);
/// time,particle,position: every particle at every slot boundary, plus the
/// post-jump position of each recorded main jump, in time order.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// k,mu_f
void write_mu_f_csv(std::ostream& out, const std::vector<double>& mu_f);
/// N,delta,mean_error,half_width,R
void write_rate_table_csv(std::ostream& out, const RateReport& report);
/// N,N_ref,delta,mean_wq,half_width_wq,mean_wa,half_width_wa,R
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

std::string rate_report_json(const RateReport& report);
std::string convergence_report_json(const ConvergenceReport& report);
std::string picard_report_json(const PicardReport& report);
std::string battery_report_json(const BatteryReport& report);
std::string identity_report_json(const IdentityReport& report);

/// Writes text to dir/name, creating dir if needed. Throws std::runtime_error.
void write_file(const std::string& dir, const std::string& name, const std::string& text);

/// Formats a real with 17 significant digits.
std::string format_real(double x);

}  // namespace stablemf
