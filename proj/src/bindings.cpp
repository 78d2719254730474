#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stsmc/analysis.hpp"
#include "stsmc/integrator.hpp"
#include "stsmc/perturbation.hpp"
#include "stsmc/scenario.hpp"
#include "stsmc/tuning.hpp"
#include "stsmc/vector_field.hpp"

namespace py = pybind11;
using namespace stsmc;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Super-twisting closed-loop simulation, limit-cycle analysis and gain tuning";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_RuntimeError);
    py::register_exception<BoundInapplicableError>(m, "BoundInapplicableError", PyExc_ValueError);

    py::class_<HarmonicTerm>(m, "HarmonicTerm")
        .def(py::init<>())
        .def(py::init([](double amp, double omega, double phase) {
                 return HarmonicTerm{amp, omega, phase};
             }),
             py::arg("amp"), py::arg("omega"), py::arg("phase") = 0.0)
        .def_readwrite("amp", &HarmonicTerm::amp)
        .def_readwrite("omega", &HarmonicTerm::omega)
        .def_readwrite("phase", &HarmonicTerm::phase);

    py::class_<PerturbationSpec>(m, "PerturbationSpec")
        .def(py::init<>())
        .def_readwrite("terms", &PerturbationSpec::terms)
        .def_readwrite("period", &PerturbationSpec::period)
        .def_readwrite("rate_bound", &PerturbationSpec::rate_bound)
        .def_readwrite("constant_rate", &PerturbationSpec::constant_rate)
        .def("is_periodic", &PerturbationSpec::is_periodic);

    py::class_<RateBoundCheck>(m, "RateBoundCheck")
        .def_readonly("max_abs_q", &RateBoundCheck::max_abs_q)
        .def_readonly("ok", &RateBoundCheck::ok);

    m.def("validate_spec", &validate_spec);
    m.def("eval_d", &eval_d);
    m.def("eval_q", &eval_q);
    m.def("mean_rate", &mean_rate);
    m.def("verify_rate_bound", &verify_rate_bound, py::arg("spec"), py::arg("n_samples") = 10000);
    m.def("spec_from_json", &spec_from_json);
    m.def("spec_to_json", &spec_to_json);

    py::class_<Gains>(m, "Gains")
        .def(py::init([](double k1, double k2) { return Gains{k1, k2}; }), py::arg("k1"),
             py::arg("k2"))
        .def_readwrite("k1", &Gains::k1)
        .def_readwrite("k2", &Gains::k2);

    py::class_<State>(m, "State")
        .def(py::init([](double x1, double x2) { return State{x1, x2}; }), py::arg("x1") = 0.0,
             py::arg("x2") = 0.0)
        .def_readwrite("x1", &State::x1)
        .def_readwrite("x2", &State::x2);

    py::enum_<FieldKind>(m, "FieldKind")
        .value("DISCONTINUOUS", FieldKind::Discontinuous)
        .value("REGULARIZED", FieldKind::Regularized)
        .value("AVERAGED", FieldKind::Averaged);

    m.def("signum", &signum);
    m.def("phi_delta", &phi_delta);
    m.def("rho", &rho);
    m.def("eval_discontinuous",
          [](const State& s, const Gains& g, double q) {
              const State d = eval_discontinuous(s, g, q);
              return std::make_pair(d.x1, d.x2);
          });
    m.def("eval_regularized",
          [](const State& s, const Gains& g, double q, double delta) {
              const State d = eval_regularized(s, g, q, delta);
              return std::make_pair(d.x1, d.x2);
          });
    m.def("to_w", [](const State& s, const Gains& g, double delta) {
        const WState w = to_w(s, g, delta);
        return std::make_pair(w.w1, w.w2);
    });

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("delta", &SimConfig::delta)
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("t_end", &SimConfig::t_end)
        .def_readwrite("x0", &SimConfig::x0)
        .def_readwrite("field_kind", &SimConfig::field_kind)
        .def_readwrite("record_stride", &SimConfig::record_stride);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("t0", &Trajectory::t0)
        .def_readonly("dt_sample", &Trajectory::dt_sample)
        .def_property_readonly("n_samples",
                               [](const Trajectory& t) { return t.samples.size(); })
        .def_property_readonly("diverged",
                               [](const Trajectory& t) { return t.divergence.has_value(); })
        .def_property_readonly("divergence_time",
                               [](const Trajectory& t) -> py::object {
                                   if (!t.divergence) return py::none();
                                   return py::float_(t.divergence->t);
                               })
        .def("sample", [](const Trajectory& t, std::size_t i) {
            const State& s = t.samples.at(i);
            return std::make_tuple(t.t_at(i), s.x1, s.x2);
        });

    m.def("stability_cap", &stability_cap, py::arg("gains"), py::arg("delta"),
          py::arg("rate_bound"), py::arg("period") = std::optional<double>());
    m.def("default_delta", &default_delta);
    m.def("integrate", &integrate);
    m.def("trajectory_to_csv", &trajectory_to_csv, py::arg("traj"), py::arg("gains"),
          py::arg("delta"), py::arg("header_comment") = std::vector<std::string>{});

    py::class_<LimitCycleReport>(m, "LimitCycleReport")
        .def_readonly("converged", &LimitCycleReport::converged)
        .def_readonly("return_map_residual", &LimitCycleReport::return_map_residual)
        .def_readonly("period", &LimitCycleReport::period)
        .def_readonly("w1_max", &LimitCycleReport::w1_max)
        .def_readonly("w1_min", &LimitCycleReport::w1_min)
        .def_readonly("w2_max_abs", &LimitCycleReport::w2_max_abs)
        .def_readonly("n_transient_periods", &LimitCycleReport::n_transient_periods);

    m.def("check_finite_time_gains", &check_finite_time_gains);
    m.def("check_limit_cycle_gains", &check_limit_cycle_gains);
    m.def("check_w1_bound_gain", &check_w1_bound_gain);
    m.def("prop3_bound", &prop3_bound);
    m.def("w1_tuning_bound", &w1_tuning_bound, py::arg("gains"), py::arg("L"), py::arg("T"),
          py::arg("n") = 0.5);
    m.def("chatter_bound", &chatter_bound);
    m.def("detect_limit_cycle", &detect_limit_cycle, py::arg("traj"), py::arg("gains"),
          py::arg("delta"), py::arg("T"), py::arg("tol") = 1e-3);

    py::class_<MotorParams>(m, "MotorParams")
        .def(py::init<>())
        .def_readwrite("J", &MotorParams::J)
        .def_readwrite("omega_r", &MotorParams::omega_r)
        .def_readwrite("T_C", &MotorParams::T_C)
        .def_readwrite("alpha", &MotorParams::alpha)
        .def_readwrite("beta", &MotorParams::beta)
        .def_readwrite("T_L", &MotorParams::T_L);

    m.def("friction_torque", &friction_torque);
    m.def("ripple_perturbation", &ripple_perturbation);
    m.def("normalized_ripple", &normalized_ripple);
    m.def("finite_time_reference_gains", &finite_time_reference_gains);
    m.def("simulate_ripple_cycle", &simulate_ripple_cycle, py::arg("L"), py::arg("T"),
          py::arg("gains"), py::arg("delta"), py::arg("periods") = 20.0, py::arg("tol") = 1e-3);

    py::class_<TuningProblem>(m, "TuningProblem")
        .def(py::init<>())
        .def_readwrite("L", &TuningProblem::L)
        .def_readwrite("T", &TuningProblem::T)
        .def_readwrite("eta", &TuningProblem::eta)
        .def_readwrite("eps", &TuningProblem::eps)
        .def_readwrite("n_fraction", &TuningProblem::n_fraction)
        .def_readwrite("k1_max", &TuningProblem::k1_max)
        .def_readwrite("k2_max_fraction", &TuningProblem::k2_max_fraction);

    py::class_<ConstraintReport>(m, "ConstraintReport")
        .def_readonly("eq18_mean_rate", &ConstraintReport::eq18_mean_rate)
        .def_readonly("eq19_k1", &ConstraintReport::eq19_k1)
        .def_readonly("eq27_w1_applicable", &ConstraintReport::eq27_w1_applicable)
        .def_readonly("assumption1_under_tuned", &ConstraintReport::assumption1_under_tuned)
        .def_readonly("k1_saturation", &ConstraintReport::k1_saturation)
        .def_readonly("k2_saturation", &ConstraintReport::k2_saturation)
        .def("all", &ConstraintReport::all);

    py::class_<TuningResult>(m, "TuningResult")
        .def_readonly("gains", &TuningResult::gains)
        .def_readonly("W1", &TuningResult::W1)
        .def_readonly("constraints", &TuningResult::constraints)
        .def_readonly("feasible", &TuningResult::feasible)
        .def_readonly("target_unmet", &TuningResult::target_unmet)
        .def_readonly("note", &TuningResult::note);

    py::class_<ValidationOutcome>(m, "ValidationOutcome")
        .def_readonly("simulated_w1_max", &ValidationOutcome::simulated_w1_max)
        .def_readonly("within_W1", &ValidationOutcome::within_W1)
        .def_readonly("report", &ValidationOutcome::report);

    m.def("tune_gains", &tune_gains);
    m.def("validate_tuning", &validate_tuning);
    m.def("tuning_result_to_json", &tuning_result_to_json);

    py::class_<Table1Row>(m, "Table1Row")
        .def_readonly("T", &Table1Row::T)
        .def_readonly("L", &Table1Row::L)
        .def_readonly("kbar1", &Table1Row::kbar1)
        .def_readonly("kbar2", &Table1Row::kbar2)
        .def_readonly("k1", &Table1Row::k1)
        .def_readonly("k2", &Table1Row::k2)
        .def_readonly("sim_abs_x1", &Table1Row::sim_abs_x1)
        .def_readonly("W1", &Table1Row::W1)
        .def_readonly("target_unmet", &Table1Row::target_unmet);

    m.def("reproduce_table1", &reproduce_table1, py::arg("n_fraction") = 0.5);
}
