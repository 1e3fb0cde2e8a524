#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "hvc/error.hpp"
#include "hvc/opf.hpp"
#include "hvc/report.hpp"
#include "hvc/scenario.hpp"

namespace py = pybind11;
using namespace hvc;

namespace {

Setpoints setpoints_at(const Network& net, const ScenarioProfile* prof, double hour) {
  Setpoints sp = Setpoints::nominal(net);
  if (prof) apply_profile(net, *prof, hour, sp);
  return sp;
}

py::dict pf_dict(const PowerFlowSolution& s) {
  py::dict d;
  d["converged"] = s.converged;
  d["iterations"] = s.iterations;
  d["max_mismatch_pu"] = s.max_mismatch_pu;
  d["v_pu"] = s.v_pu;
  d["theta_rad"] = s.theta_rad;
  d["gen_p_mw"] = s.gen_p_mw;
  d["gen_q_mvar"] = s.gen_q_mvar;
  d["losses_mw"] = s.losses_mw;
  return d;
}

py::dict opf_dict(const OpfSolution& s) {
  py::dict d;
  d["status"] = std::string(to_string(s.status));
  d["iterations"] = s.iterations;
  d["objective_mw"] = s.objective_mw;
  d["start_losses_mw"] = s.start_losses_mw;
  d["v_pu"] = s.v_pu;
  d["pilot_refs"] = s.pilot_refs;
  d["gen_v_pu"] = s.gen_v_pu;
  d["gen_p_mw"] = s.gen_p_mw;
  d["gen_q_mvar"] = s.gen_q_mvar;
  d["shunt_q_mvar"] = s.shunt_q_mvar;
  d["delta_f_hz"] = s.delta_f_hz;
  d["kkt_max"] = s.kkt.max();
  return d;
}

py::dict trace_dict(const SimulationTrace& t) {
  std::vector<double> time, losses;
  for (const auto& s : t.samples) {
    time.push_back(s.time_s);
    losses.push_back(s.losses_mw);
  }
  py::list events;
  for (const auto& e : t.events)
    events.append(py::make_tuple(e.time_s, std::string(to_string(e.kind)), e.payload));
  py::dict d;
  d["mode"] = std::string(to_string(t.mode));
  d["time_s"] = time;
  d["losses_mw"] = losses;
  d["events"] = events;
  d["tvr_updates"] = t.count(EventKind::tvr_update);
  return d;
}

ControlConfig config_from(const std::optional<std::string>& json_text,
                          const std::optional<std::string>& mode) {
  ControlConfig cfg = json_text ? parse_config(*json_text) : ControlConfig{};
  if (mode) cfg.mode = parse_mode(*mode);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "hierarchical voltage control simulator";
  m.attr("__version__") = kVersion;

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<PowerFlowError>(m, "PowerFlowError", PyExc_RuntimeError);
  py::register_exception<OpfError>(m, "OpfError", PyExc_RuntimeError);

  py::class_<Network>(m, "Network")
      .def_property_readonly("bus_names",
                             [](const Network& n) {
                               std::vector<std::string> out;
                               for (const auto& b : n.buses) out.push_back(b.name);
                               return out;
                             })
      .def_property_readonly("num_generators", [](const Network& n) { return n.generators.size(); })
      .def_property_readonly("num_shunts", [](const Network& n) { return n.shunts.size(); })
      .def_property_readonly("pilot_buses",
                             [](const Network& n) {
                               std::vector<int> out;
                               for (const auto& a : n.areas) out.push_back(a.pilot_bus);
                               return out;
                             })
      .def_readonly("s_base_mva", &Network::s_base_mva)
      .def("hash", [](const Network& n) { return case_hash(n); })
      .def("to_json", [](const Network& n) { return serialize_case(n); });

  py::class_<ScenarioProfile>(m, "Profile")
      .def("keys", &ScenarioProfile::keys)
      .def("value", &ScenarioProfile::value, py::arg("key"), py::arg("time_h"));

  m.def("load_case", &load_case_file, py::arg("path"));
  m.def("parse_case", [](const std::string& text) { return parse_case(text); }, py::arg("text"));
  m.def("load_profile", &load_profile_file, py::arg("path"));
  m.def(
      "constant_profile", [](const Network& n, double v) { return ScenarioProfile::constant(n, v); },
      py::arg("net"), py::arg("value") = 1.0);

  m.def(
      "power_flow",
      [](const Network& net, const ScenarioProfile* prof, double hour) {
        return pf_dict(solve_power_flow(net, setpoints_at(net, prof, hour)));
      },
      py::arg("net"), py::arg("profile") = nullptr, py::arg("hour") = 0.0);

  m.def(
      "opf",
      [](const Network& net, const ScenarioProfile* prof, double hour,
         const std::optional<std::string>& config) {
        const auto cfg = config_from(config, std::nullopt);
        const auto op = solve_power_flow(net, setpoints_at(net, prof, hour));
        return opf_dict(solve_opf(build_opf(net, op, cfg.opf), cfg.opf));
      },
      py::arg("net"), py::arg("profile") = nullptr, py::arg("hour") = 0.0,
      py::arg("config") = std::nullopt);

  m.def(
      "run",
      [](const Network& net, const ScenarioProfile& prof, const std::optional<std::string>& config,
         const std::optional<std::string>& mode) {
        const auto cfg = config_from(config, mode);
        py::gil_scoped_release nogil;
        auto tr = run_scenario(net, prof, cfg);
        py::gil_scoped_acquire gil;
        return trace_dict(tr);
      },
      py::arg("net"), py::arg("profile"), py::arg("config") = std::nullopt,
      py::arg("mode") = std::nullopt);

  m.def(
      "compare",
      [](const Network& net, const ScenarioProfile& prof, const std::optional<std::string>& config,
         const std::optional<std::string>& mode) {
        auto cfg = config_from(config, mode);
        auto base_cfg = cfg;
        base_cfg.mode = ControlMode::baseline;
        SimulationTrace base, ctrl;
        {
          py::gil_scoped_release nogil;
          base = run_scenario(net, prof, base_cfg);
          ctrl = run_scenario(net, prof, cfg);
        }
        const auto cmp = compare_scenarios(base, ctrl);
        const auto cost = cost_savings(cmp, cfg.price_eur_per_mwh);
        py::dict d;
        d["time_s"] = cmp.time_s;
        d["baseline_mw"] = cmp.baseline_mw;
        d["controlled_mw"] = cmp.controlled_mw;
        d["delta_mw"] = cmp.delta_mw;
        d["avg_baseline_mw"] = cmp.avg_baseline_mw;
        d["avg_reduction_mw"] = cmp.avg_reduction_mw;
        d["avg_reduction_pct"] = cmp.avg_reduction_pct;
        d["peak_reduction_mw"] = cmp.peak_reduction_mw;
        d["peak_reduction_pct"] = cmp.peak_reduction_pct;
        d["peak_time_s"] = cmp.peak_time_s;
        d["tvr_updates"] = ctrl.count(EventKind::tvr_update);
        d["eur_per_year"] = cost.eur_per_year;
        return d;
      },
      py::arg("net"), py::arg("profile"), py::arg("config") = std::nullopt,
      py::arg("mode") = std::nullopt);

  m.def(
      "cost_savings",
      [](double avg_mw, double price) {
        const auto c = cost_savings(avg_mw, price);
        return py::make_tuple(c.eur_per_hour, c.eur_per_day, c.eur_per_year);
      },
      py::arg("avg_reduction_mw"), py::arg("price_eur_per_mwh"));
}
