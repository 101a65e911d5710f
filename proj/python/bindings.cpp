#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stablemf/battery.hpp"
#include "stablemf/coupling.hpp"
#include "stablemf/distance.hpp"
#include "stablemf/experiment.hpp"
#include "stablemf/io.hpp"
#include "stablemf/mean_field.hpp"
#include "stablemf/stable.hpp"
#include "stablemf/transport.hpp"

namespace py = pybind11;
using namespace stablemf;

namespace {

TransportCost make_cost(const std::string& kind, double q) {
  if (kind == "power") return TransportCost::power(q);
  if (kind == "a") return TransportCost::a_distance(q);
  throw py::value_error("cost must be 'power' or 'a'");
}

std::vector<std::vector<double>> rows(const Trajectory& t) {
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k <= t.grid.slots; ++k) {
    const auto s = t.state(k);
    out.emplace_back(s.begin(), s.end());
  }
  return out;
}

py::dict coupled_run(const std::string& config_json, std::size_t particles, std::uint64_t replication) {
  const ExperimentConfig cfg = parse_config(config_json);
  const auto model = cfg.make_model();
  CoupledRun run;
  {
    py::gil_scoped_release release;
    run = run_coupled(*model, particles, cfg.grid_for(particles), cfg.substep, cfg.seed, replication,
                      cfg.resolved_workers(), true);
  }
  py::list slots;
  for (const auto& r : run.records) {
    py::dict d;
    d["k"] = r.k;
    d["P"] = r.P;
    d["A"] = r.A;
    d["Y"] = r.Y;
    d["dS"] = r.dS;
    d["fresh"] = r.provenance == SlotProvenance::fresh_draw;
    slots.append(d);
  }
  py::dict out;
  out["delta"] = run.finite.grid.delta;
  out["finite"] = rows(run.finite);
  out["mean_field"] = rows(run.mean_field);
  out["slots"] = slots;
  out["identity_residual"] = run.identity.max_relative_residual;
  out["closure_residual"] = run.identity.closure_residual;
  out["error"] = coupled_a_distance(run.finite.final_state(), run.mean_field.final_state(), cfg.q);
  return out;
}

template <class F>
std::string released(F&& f) {
  py::gil_scoped_release release;
  return f();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stable-driven mean-field particle systems";

  m.def("stable_laplace", &stable_laplace, py::arg("alpha"), py::arg("lam"));
  m.def("stable_fractional_moment", &stable_fractional_moment, py::arg("alpha"), py::arg("q"));
  m.def(
      "jump_measure_tail",
      [](double alpha, double q, double x0) { return jump_measure_tail(StableParams(alpha, q), x0); },
      py::arg("alpha"), py::arg("q"), py::arg("x0"));
  m.def(
      "sample_stable",
      [](double alpha, std::size_t n, std::uint64_t seed, int workers) {
        py::gil_scoped_release release;
        return sample_stable_batch(alpha, n, seed, 0, workers);
      },
      py::arg("alpha"), py::arg("n"), py::arg("seed") = 1, py::arg("workers") = 1);

  m.def("a_eval", &a_eval, py::arg("q"), py::arg("x"), py::arg("order") = 0);
  m.def(
      "coupled_a_distance",
      [](const std::vector<double>& xs, const std::vector<double>& ys, double q) {
        return coupled_a_distance(xs, ys, q);
      },
      py::arg("xs"), py::arg("ys"), py::arg("q"));
  m.def(
      "wasserstein_exact",
      [](std::vector<double> mu, std::vector<double> nu, double q, const std::string& cost) {
        return wasserstein_q_exact(EmpiricalMeasure(std::move(mu)), EmpiricalMeasure(std::move(nu)),
                                   make_cost(cost, q));
      },
      py::arg("mu"), py::arg("nu"), py::arg("q"), py::arg("cost") = "power");
  m.def(
      "check_assumption_a",
      [](double q, std::size_t grid_size) {
        const auto report = check_assumption_a(q, grid_size);
        py::dict out;
        for (const auto& c : report.checks) out[py::str(c.name)] = c.passed;
        return out;
      },
      py::arg("q"), py::arg("grid_size") = 1000);

  m.def("rate_exponent_theory", &rate_exponent_theory, py::arg("alpha"), py::arg("q"));
  m.def("delta_rule", &delta_rule_raw, py::arg("particles"), py::arg("alpha"), py::arg("q"));

  m.def("coupled_run", &coupled_run, py::arg("config_json"), py::arg("particles"), py::arg("replication") = 0);
  m.def(
      "rate_experiment_json",
      [](const std::string& config_json) {
        const auto cfg = parse_config(config_json);
        return released([&] { return rate_report_json(run_rate_experiment(cfg)); });
      },
      py::arg("config_json"));
  m.def(
      "picard_experiment_json",
      [](const std::string& config_json) {
        const auto cfg = parse_config(config_json);
        return released([&] { return picard_report_json(run_picard_experiment(cfg)); });
      },
      py::arg("config_json"));
  m.def(
      "distribution_suite_json",
      [](std::size_t samples, std::uint64_t seed) {
        BatteryOptions opt;
        opt.samples = samples;
        opt.random_sum_samples = samples;
        opt.slot_samples = samples;
        opt.seed = seed;
        return released([&] { return battery_report_json(run_distribution_suite(opt)); });
      },
      py::arg("samples") = 100000, py::arg("seed") = 1);

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
