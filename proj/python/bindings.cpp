#include <map>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "legfunnel/body_allocation.hpp"
#include "legfunnel/errors.hpp"
#include "legfunnel/funnel_control.hpp"
#include "legfunnel/leg_plant.hpp"
#include "legfunnel/scenario_config.hpp"
#include "legfunnel/simulation.hpp"
#include "legfunnel/trajectory_io.hpp"

namespace py = pybind11;
using namespace legfunnel;

namespace {

py::dict metrics_dict(const Metrics& m)
{
    // the JSON form already maps non-finite values to None
    return py::module_::import("json").attr("loads")(metrics_to_json(m).dump());
}

py::dict trajectory_columns(const SimTrajectory& traj)
{
    std::vector<double> t, f_ref, y, e, psi, psi_pre, u, roll, pitch;
    std::vector<int> leg, event;
    for (const auto& rec : traj.steps) {
        for (std::size_t i = 0; i < rec.legs.size(); ++i) {
            const LegSample& s = rec.legs[i];
            t.push_back(rec.t);
            leg.push_back(static_cast<int>(i) + 1);
            f_ref.push_back(s.f_ref);
            y.push_back(s.y);
            e.push_back(s.e);
            psi.push_back(s.psi);
            psi_pre.push_back(s.psi_pre);
            u.push_back(s.u);
            event.push_back(s.event ? 1 : 0);
            roll.push_back(rec.roll_deg);
            pitch.push_back(rec.pitch_deg);
        }
    }
    py::dict d;
    d["t"] = t;
    d["leg"] = leg;
    d["f_ref"] = f_ref;
    d["y"] = y;
    d["e"] = e;
    d["psi"] = psi;
    d["psi_pre"] = psi_pre;
    d["u"] = u;
    d["event"] = event;
    d["roll_deg"] = roll;
    d["pitch_deg"] = pitch;
    return d;
}

py::dict run_dict(const ScenarioConfig& cfg, bool require_hypotheses)
{
    RunOptions opts;
    opts.require_hypotheses = require_hypotheses;
    const SimTrajectory traj = run_scenario(cfg, opts);
    py::dict d;
    d["name"] = traj.name;
    d["aborted"] = traj.aborted;
    d["abort_reason"] = traj.abort_reason;
    d["metrics"] = metrics_dict(extract_metrics(traj));
    d["trajectory"] = trajectory_columns(traj);
    return d;
}

}  // namespace

PYBIND11_MODULE(_legfunnel, m)
{
    m.doc() = "Event-triggered funnel force control for a six-wheel-legged robot";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<ParameterError>(m, "ParameterError");
    py::register_exception<DomainError>(m, "DomainError");
    py::register_exception<FunnelViolation>(m, "FunnelViolation");
    py::register_exception<SimulationAbort>(m, "SimulationAbort");

    py::class_<FunnelParams>(m, "FunnelParams")
        .def(py::init([](double a, double b, double xi) { return FunnelParams{a, b, xi}; }), py::arg("a") = 750.0,
             py::arg("b") = 7.20, py::arg("xi") = 250.0)
        .def_readwrite("a", &FunnelParams::a)
        .def_readwrite("b", &FunnelParams::b)
        .def_readwrite("xi", &FunnelParams::xi)
        .def("psi0", &FunnelParams::psi0);

    py::class_<TriggerParams>(m, "TriggerParams")
        .def(py::init([](double rho5, double varrho, double u_hat) { return TriggerParams{rho5, varrho, u_hat}; }),
             py::arg("rho5") = 0.6, py::arg("varrho") = 0.5, py::arg("u_hat") = 1.9)
        .def_readwrite("rho5", &TriggerParams::rho5)
        .def_readwrite("varrho", &TriggerParams::varrho)
        .def_readwrite("u_hat", &TriggerParams::u_hat);

    py::class_<TriggerState>(m, "TriggerState")
        .def(py::init<>())
        .def_readwrite("t_k", &TriggerState::t_k)
        .def_readonly("event_times", &TriggerState::event_times);

    py::class_<LegPlantParams>(m, "LegPlantParams")
        .def(py::init([](double b_damp, double k_stiff, double k_p) { return LegPlantParams{b_damp, k_stiff, k_p}; }),
             py::arg("b_damp") = 1000.0, py::arg("k_stiff") = 50000.0, py::arg("k_p") = 50000.0)
        .def_readwrite("b_damp", &LegPlantParams::b_damp)
        .def_readwrite("k_stiff", &LegPlantParams::k_stiff)
        .def_readwrite("k_p", &LegPlantParams::k_p)
        .def("rho1", &LegPlantParams::rho1)
        .def("rho2", &LegPlantParams::rho2);

    py::class_<LegPlantState>(m, "LegPlantState")
        .def(py::init([](double x1, double x2, double z) { return LegPlantState{x1, x2, z}; }), py::arg("x1") = 0.0,
             py::arg("x2") = 0.0, py::arg("z") = 0.0)
        .def_readwrite("x1", &LegPlantState::x1)
        .def_readwrite("x2", &LegPlantState::x2)
        .def_readwrite("z", &LegPlantState::z);

    py::class_<OmegaBound>(m, "OmegaBound")
        .def_readonly("omega", &OmegaBound::omega)
        .def_readonly("omega_force_rate", &OmegaBound::omega_force_rate)
        .def_readonly("l_psi", &OmegaBound::l_psi);

    py::class_<ConditionCheck>(m, "ConditionCheck")
        .def_readonly("name", &ConditionCheck::name)
        .def_readonly("passed", &ConditionCheck::passed)
        .def_readonly("slack", &ConditionCheck::slack);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("conditions", &ValidationReport::conditions)
        .def_readonly("varpi", &ValidationReport::varpi)
        .def_readonly("delta", &ValidationReport::delta)
        .def_readonly("omega", &ValidationReport::omega)
        .def("all_passed", &ValidationReport::all_passed);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def_readonly("name", &ScenarioConfig::name)
        .def_readonly("dt", &ScenarioConfig::dt)
        .def_readonly("duration", &ScenarioConfig::duration)
        .def_readonly("funnel", &ScenarioConfig::funnel)
        .def_readonly("trigger", &ScenarioConfig::trigger)
        .def_readonly("plant", &ScenarioConfig::plant);

    m.def("funnel_value", &funnel_value, py::arg("params"), py::arg("elapsed"));
    m.def("saturate", &saturate, py::arg("v"), py::arg("u_hat"));
    m.def("gain_current", &gain_current, py::arg("e"), py::arg("params"), py::arg("elapsed_since_event"));
    m.def("gain_reset", &gain_reset, py::arg("e"), py::arg("params"));
    m.def("u_bar", &u_bar, py::arg("u_k"), py::arg("trig"));
    m.def("trigger_evaluate", &trigger_evaluate, py::arg("e"), py::arg("t"), py::arg("params"), py::arg("trig"),
          py::arg("state"));
    m.def("control_law", &control_law, py::arg("e"), py::arg("t"), py::arg("params"), py::arg("trig"),
          py::arg("state"));
    m.def("omega_bound", &omega_bound, py::arg("f_ref_rate_sup"), py::arg("plant"), py::arg("params"),
          py::arg("ref_sup"), py::arg("x0_norm"));
    m.def("validate_parameters", &validate_parameters, py::arg("params"), py::arg("trig"), py::arg("omega"),
          py::arg("e0"));
    m.def("min_inter_event_time", &min_inter_event_time, py::arg("params"), py::arg("trig"), py::arg("varpi"));

    m.def("leg_plant_step", &step, py::arg("params"), py::arg("state"), py::arg("u"), py::arg("dt"));
    m.def("iss_envelope", &iss_envelope, py::arg("z0"), py::arg("t"), py::arg("x_sup"));

    m.def(
        "static_allocation",
        [](double edge, double leg_length, double mass, double gravity) {
            BodyInertia inertia;
            inertia.mass = mass;
            inertia.gravity = gravity;
            const Mat6 j = jacobian(RobotGeometry::regular_hexagon(edge, leg_length));
            return Vec6(allocate_leg_forces(j, gravity_vector(inertia)).forces);
        },
        py::arg("edge") = 0.7, py::arg("leg_length") = 0.6, py::arg("mass") = 436.0, py::arg("gravity") = 9.81);

    m.def(
        "load_config",
        [](const std::string& path, const std::map<std::string, std::string>& overrides) {
            return ScenarioConfig::load(path, ScenarioConfig::Overrides(overrides.begin(), overrides.end()));
        },
        py::arg("path"), py::arg("overrides") = std::map<std::string, std::string>{});
    m.def(
        "validate_config",
        [](const ScenarioConfig& cfg) {
            const ScenarioValidation v = validate_scenario(cfg);
            py::dict d;
            d["report"] = v.report;
            d["resolution_ok"] = v.resolution_ok;
            d["resolution_limit"] = v.resolution_limit;
            d["passed"] = v.all_passed();
            return d;
        },
        py::arg("config"));
    m.def("run_scenario", &run_dict, py::arg("config"), py::arg("require_hypotheses") = true);
    m.def(
        "force_tracking_test", [](const ScenarioConfig& cfg) { return metrics_dict(force_tracking_test(cfg)); },
        py::arg("config"));
}
