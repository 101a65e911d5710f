#include "stablemf/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace stablemf {

using nlohmann::ordered_json;

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_atoms_csv(std::ostream& out, const AtomLog& atoms) {
  out << "s,j,z,u,accepted_live\n";
  for (const Atom& a : atoms.atoms)
    out << format_real(a.s) << ',' << a.j + 1 << ',' << format_real(a.z) << ',' << format_real(a.u) << ','
        << (a.accepted_live ? 1 : 0) << '\n';
}

void write_slots_csv(std::ostream& out, const std::vector<SlotRecord>& records) {
  out << "k,P_k,A_k,Y_k,dS_k,provenance\n";
  for (const SlotRecord& r : records)
    out << r.k << ',' << r.P << ',' << format_real(r.A) << ',' << format_real(r.Y) << ',' << format_real(r.dS)
        << ',' << (r.provenance == SlotProvenance::fresh_draw ? "fresh" : "atoms") << '\n';
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "time,particle,position\n";
  std::size_t e = 0;
  for (std::size_t k = 0; k <= traj.grid.slots; ++k) {
    const double t = traj.grid.time(k);
    for (; e < traj.events.size() && traj.events[e].s < t; ++e)
      out << format_real(traj.events[e].s) << ',' << traj.events[e].j + 1 << ','
          << format_real(traj.events[e].after) << '\n';
    const auto xs = traj.state(k);
    for (std::size_t i = 0; i < xs.size(); ++i) out << format_real(t) << ',' << i + 1 << ',' << format_real(xs[i]) << '\n';
  }
}

void write_mu_f_csv(std::ostream& out, const std::vector<double>& mu_f) {
  out << "k,mu_f\n";
  for (std::size_t k = 0; k < mu_f.size(); ++k) out << k << ',' << format_real(mu_f[k]) << '\n';
}

void write_rate_table_csv(std::ostream& out, const RateReport& report) {
  out << "N,delta,mean_error,half_width,R\n";
  for (const auto& row : report.rows)
    out << row.n << ',' << format_real(row.delta) << ',' << format_real(row.error.mean) << ','
        << format_real(row.error.half_width) << ',' << row.replications << '\n';
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "N,N_ref,delta,mean_wq,half_width_wq,mean_wa,half_width_wa,R\n";
  for (const auto& row : report.rows)
    out << row.n << ',' << row.reference_n << ',' << format_real(row.delta) << ',' << format_real(row.wq.mean) << ','
        << format_real(row.wq.half_width) << ',' << format_real(row.wa.mean) << ','
        << format_real(row.wa.half_width) << ',' << row.replications << '\n';
}

namespace {

ordered_json interval(const Interval& iv) { return {{"mean", iv.mean}, {"half_width", iv.half_width}}; }

}  // namespace

std::string rate_report_json(const RateReport& report) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows)
    rows.push_back({{"N", row.n},
                    {"delta", row.delta},
                    {"replications", row.replications},
                    {"error", interval(row.error)},
                    {"median_error", row.median_error},
                    {"tagged_error", interval(row.tagged_error)},
                    {"r_total_q", interval(row.r_total_q)},
                    {"r_live_q", interval(row.r_live_q)},
                    {"r_frozen_q", interval(row.r_frozen_q)},
                    {"max_identity_residual", row.max_identity_residual},
                    {"clamp_fraction", row.clamp_fraction},
                    {"fresh_slots", row.fresh_slots}});
  ordered_json j = {{"schema_version", kConfigSchemaVersion},
                    {"kind", "rate_report"},
                    {"alpha", report.alpha},
                    {"q", report.q},
                    {"exp_theory", report.exp_theory},
                    {"exp_secondary", report.exp_secondary},
                    {"insufficient_grid", report.insufficient_grid},
                    {"rows", rows}};
  if (!report.insufficient_grid) {
    j["slope"] = report.fit.slope;
    j["slope_se"] = report.fit.slope_se;
    j["strictly_decreasing"] = report.strictly_decreasing;
    j["slope_within_band"] = report.slope_within_band;
  }
  return j.dump(2) + "\n";
}

std::string convergence_report_json(const ConvergenceReport& report) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows)
    rows.push_back({{"N", row.n},
                    {"N_ref", row.reference_n},
                    {"delta", row.delta},
                    {"replications", row.replications},
                    {"wq_upper", interval(row.wq)},
                    {"wa", interval(row.wa)}});
  ordered_json steps = ordered_json::array();
  for (const auto& d : report.steps) steps.push_back(interval(d));
  ordered_json j = {{"schema_version", kConfigSchemaVersion},
                    {"kind", "convergence_report"},
                    {"monotone_within_half_widths", report.monotone_within_half_widths},
                    {"overall_decrease", report.overall_decrease},
                    {"overall_significant", report.overall_significant},
                    {"overall_change", interval(report.overall_change)},
                    {"steps", steps},
                    {"rows", rows}};
  return j.dump(2) + "\n";
}

std::string picard_report_json(const PicardReport& report) {
  ordered_json from_max = ordered_json::array(), from_min = ordered_json::array();
  for (const auto& iv : report.mean_from_max) from_max.push_back(interval(iv));
  for (const auto& iv : report.mean_from_min) from_min.push_back(interval(iv));
  ordered_json j = {{"schema_version", kConfigSchemaVersion},
                    {"kind", "picard_report"},
                    {"horizon", report.horizon},
                    {"delta", report.delta},
                    {"particles", report.particles},
                    {"replications", report.replications},
                    {"distances", report.distances},
                    {"ratios", report.ratios},
                    {"max_ratio", report.max_ratio},
                    {"contraction", report.contraction},
                    {"mean_from_max", from_max},
                    {"mean_from_min", from_min},
                    {"max_mean_gap", report.max_mean_gap},
                    {"initializations_agree", report.initializations_agree}};
  return j.dump(2) + "\n";
}

std::string battery_report_json(const BatteryReport& report) {
  ordered_json entries = ordered_json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"name", e.name}, {"statistic", e.statistic}, {"tolerance", e.tolerance}, {"passed", e.passed}});
  ordered_json j = {{"schema_version", kConfigSchemaVersion},
                    {"kind", "battery_report"},
                    {"passed", report.passed()},
                    {"entries", entries}};
  return j.dump(2) + "\n";
}

std::string identity_report_json(const IdentityReport& report) {
  ordered_json j = {{"schema_version", kConfigSchemaVersion},
                    {"kind", "identity_report"},
                    {"slots_checked", report.slots_checked},
                    {"max_relative_residual", report.max_relative_residual},
                    {"tolerance", kIdentityTolerance},
                    {"closure_residual", report.closure_residual},
                    {"slot_error_mean", report.slot_error_mean},
                    {"slot_error_sd", report.slot_error_sd},
                    {"slot_error_abs_mean", report.slot_error_abs_mean},
                    {"r_total_T", report.r_total.back()},
                    {"r_live_T", report.r_live.back()},
                    {"r_frozen_T", report.r_frozen.back()},
                    {"r_total_q", report.r_total_q},
                    {"r_live_q", report.r_live_q},
                    {"r_frozen_q", report.r_frozen_q}};
  return j.dump(2) + "\n";
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace stablemf
