// Python bindings for the native core: plant/delay models, fuzzy bases,
// controller operations, the co-simulation loop, constraint reports, and the
// gain feasibility search.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <span>
#include <vector>

#include "backstep/controller.hpp"
#include "backstep/errors.hpp"
#include "backstep/feasibility.hpp"
#include "backstep/fls.hpp"
#include "backstep/plant.hpp"
#include "backstep/reference.hpp"
#include "backstep/scenario.hpp"
#include "backstep/sim.hpp"

namespace py = pybind11;
using namespace backstep;

namespace {

std::span<const double> as_span(const std::vector<double>& v) {
  return {v.data(), v.size()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simulation and verification toolkit for adaptive constrained backstepping "
            "with input delay";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<BarrierViolation>(m, "BarrierViolationError");
  py::register_exception<SimulationDiverged>(m, "SimulationDivergedError");
  py::register_exception<EmptyFeasibleSet>(m, "EmptyFeasibleSetError");

  // --- fuzzy basis ---------------------------------------------------------
  py::class_<FuzzyBasis>(m, "FuzzyBasis")
      .def(py::init<>())
      .def_readwrite("dim", &FuzzyBasis::dim)
      .def_readwrite("centers", &FuzzyBasis::centers)
      .def_readwrite("denom", &FuzzyBasis::denom)
      .def("rule_count", &FuzzyBasis::rule_count)
      .def("validate", &FuzzyBasis::validate);

  m.def("make_grid_basis", &make_grid_basis, py::arg("ranges"), py::arg("counts"));
  m.def(
      "basis",
      [](const FuzzyBasis& b, const std::vector<double>& Z) {
        std::vector<double> xi(static_cast<std::size_t>(b.rule_count()));
        basis(b, as_span(Z), xi);
        return xi;
      },
      py::arg("basis"), py::arg("Z"), "Normalized activation vector xi(Z)");
  m.def(
      "regressor_norm",
      [](const FuzzyBasis& b, const std::vector<double>& Z) {
        return regressor_norm(b, as_span(Z));
      },
      py::arg("basis"), py::arg("Z"), "|xi(Z)|^2 in [1/N, 1]");

  // --- plant and delay -----------------------------------------------------
  py::class_<PlantModel>(m, "PlantModel")
      .def_readonly("n", &PlantModel::n)
      .def_readonly("k_c", &PlantModel::k_c)
      .def_readonly("d_bound", &PlantModel::d_bound)
      .def("validate", &PlantModel::validate);

  m.def("example_plant", &example_plant, "Two-state benchmark plant");
  m.def("plant_from_expressions", &plant_from_expressions, py::arg("n"), py::arg("f_exprs"),
        py::arg("d_exprs"), py::arg("k_c"), py::arg("d_bound"), py::arg("horizon"));
  m.def(
      "eval_dynamics",
      [](const PlantModel& model, const std::vector<double>& x, double u_eff, double t) {
        return eval_dynamics(model, as_span(x), u_eff, t);
      },
      py::arg("model"), py::arg("x"), py::arg("u_eff"), py::arg("t"));
  m.def("attach_disturbances", &attach_disturbances, py::arg("model"), py::arg("d_exprs"),
        py::arg("d_bound"), py::arg("horizon"));

  py::class_<DelayLine>(m, "DelayLine")
      .def(py::init<int, double>(), py::arg("depth"), py::arg("fill"))
      .def("push", &DelayLine::push)
      .def("read", &DelayLine::read)
      .def("depth", &DelayLine::depth)
      .def_static("steps_for", &DelayLine::steps_for, py::arg("tau"), py::arg("h"));

  // --- reference -----------------------------------------------------------
  py::class_<ReferenceSignal>(m, "ReferenceSignal")
      .def_readonly("horizon", &ReferenceSignal::horizon)
      .def_readonly("A0", &ReferenceSignal::A0)
      .def_readonly("dy_sup", &ReferenceSignal::dy_sup)
      .def_readonly("C0", &ReferenceSignal::C0)
      .def("y", [](const ReferenceSignal& r, double t) { return r.y(t); }, py::arg("t"))
      .def("dy", [](const ReferenceSignal& r, double t) { return r.dy(t); }, py::arg("t"))
      .def("ddy", [](const ReferenceSignal& r, double t) { return r.ddy(t); }, py::arg("t"))
      .def_static("from_expression", &ReferenceSignal::from_expression, py::arg("text"),
                  py::arg("horizon"));

  m.def("sup_abs_scan", &sup_abs_scan, py::arg("f"), py::arg("t0"), py::arg("t1"),
        py::arg("coarse_samples") = 20000);

  // --- controller ----------------------------------------------------------
  py::class_<ControllerGains>(m, "ControllerGains")
      .def(py::init<>())
      .def_readwrite("K", &ControllerGains::K)
      .def_readwrite("k_b", &ControllerGains::k_b)
      .def_readwrite("sigma", &ControllerGains::sigma)
      .def_readwrite("gamma", &ControllerGains::gamma)
      .def_readwrite("beta", &ControllerGains::beta)
      .def_readwrite("upsilon", &ControllerGains::upsilon)
      .def_readwrite("filter_tau", &ControllerGains::filter_tau)
      .def_readwrite("kappa", &ControllerGains::kappa)
      .def_readwrite("lambda_", &ControllerGains::lambda)
      .def("validate", &ControllerGains::validate, py::arg("n"));

  py::class_<AdaptiveState>(m, "AdaptiveState")
      .def(py::init<>())
      .def_readwrite("delta_hat", &AdaptiveState::delta_hat)
      .def_readwrite("theta_hat", &AdaptiveState::theta_hat);

  py::class_<ControlOutput>(m, "ControlOutput")
      .def_readonly("z", &ControlOutput::z)
      .def_readonly("margin", &ControlOutput::margin)
      .def_readonly("e", &ControlOutput::e)
      .def_readonly("alpha", &ControlOutput::alpha)
      .def_readonly("wdot", &ControlOutput::wdot)
      .def_readonly("xi_sq", &ControlOutput::xi_sq)
      .def_readonly("delta_dot", &ControlOutput::delta_dot)
      .def_readonly("theta_dot", &ControlOutput::theta_dot)
      .def_readonly("v", &ControlOutput::v);

  m.def("checked_margin", &checked_margin, py::arg("z"), py::arg("k_b"), py::arg("index"));
  m.def("robust_tanh_term", &robust_tanh_term, py::arg("p"), py::arg("upsilon"));
  m.def("virtual_control_first", &virtual_control_first, py::arg("z1"), py::arg("k_b1"),
        py::arg("K1"), py::arg("theta_hat"), py::arg("xi_sq"), py::arg("delta_hat"),
        py::arg("upsilon"));
  m.def("virtual_control_mid", &virtual_control_mid, py::arg("z_i"), py::arg("z_prev"),
        py::arg("k_bi"), py::arg("k_b_prev"), py::arg("K_i"), py::arg("theta_hat"),
        py::arg("xi_sq"), py::arg("delta_hat"), py::arg("upsilon"), py::arg("index"));
  m.def("virtual_control_last", &virtual_control_last, py::arg("z_n"), py::arg("z_prev"),
        py::arg("k_bn"), py::arg("k_b_prev"), py::arg("K_n"), py::arg("theta_hat"),
        py::arg("xi_sq"), py::arg("delta_hat"), py::arg("upsilon"), py::arg("index"));
  m.def("control_v", &control_v, py::arg("z_last"), py::arg("K_last"), py::arg("lambda_"),
        py::arg("chi"), py::arg("kappa"), py::arg("u"), py::arg("e_last"), py::arg("tau_last"));
  m.def("delta_hat_rate", &delta_hat_rate, py::arg("z"), py::arg("k_b"), py::arg("gamma"),
        py::arg("sigma"), py::arg("upsilon"), py::arg("delta_hat"), py::arg("index"));
  m.def("theta_hat_rate", &theta_hat_rate, py::arg("z"), py::arg("k_b"), py::arg("beta"),
        py::arg("sigma"), py::arg("xi_sq"), py::arg("theta_hat"), py::arg("index"));
  m.def("dsc_filter_deriv", &dsc_filter_deriv, py::arg("w"), py::arg("alpha_prev"),
        py::arg("tau"));
  m.def("pade_state_deriv", &pade_state_deriv, py::arg("chi"), py::arg("u"), py::arg("lambda_"));
  m.def("input_filter_deriv", &input_filter_deriv, py::arg("u"), py::arg("v"), py::arg("kappa"));

  py::class_<BacksteppingController>(m, "BacksteppingController")
      .def(py::init<int, ControllerGains, std::vector<FuzzyBasis>>(), py::arg("n"),
           py::arg("gains"), py::arg("bases"))
      .def_property_readonly("n", &BacksteppingController::n)
      .def(
          "evaluate",
          [](const BacksteppingController& c, const std::vector<double>& x, double chi, double u,
             const std::vector<double>& w, const AdaptiveState& a, double y_d, double y_d_dot) {
            return c.evaluate(as_span(x), chi, u, as_span(w), a, y_d, y_d_dot);
          },
          py::arg("x"), py::arg("chi"), py::arg("u"), py::arg("w"), py::arg("adapt"),
          py::arg("y_d"), py::arg("y_d_dot"))
      .def(
          "initial_filter_states",
          [](const BacksteppingController& c, const std::vector<double>& x0,
             const AdaptiveState& a0, double y_d0, double y_d_dot0) {
            return c.initial_filter_states(as_span(x0), a0, y_d0, y_d_dot0);
          },
          py::arg("x0"), py::arg("adapt0"), py::arg("y_d0"), py::arg("y_d_dot0"))
      .def(
          "states_for_initial_offsets",
          [](const BacksteppingController& c, const std::vector<double>& z0,
             const AdaptiveState& a0, double y_d0, double y_d_dot0) {
            return c.states_for_initial_offsets(as_span(z0), a0, y_d0, y_d_dot0);
          },
          py::arg("z0"), py::arg("adapt0"), py::arg("y_d0"), py::arg("y_d_dot0"));

  // --- simulation ----------------------------------------------------------
  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("plant", &SimConfig::plant)
      .def_readwrite("gains", &SimConfig::gains)
      .def_readwrite("bases", &SimConfig::bases)
      .def_readwrite("ref", &SimConfig::ref)
      .def_readwrite("tau", &SimConfig::tau)
      .def_readwrite("h", &SimConfig::h)
      .def_readwrite("T", &SimConfig::T)
      .def_readwrite("x0", &SimConfig::x0)
      .def_readwrite("adapt0", &SimConfig::adapt0)
      .def_readwrite("u0", &SimConfig::u0)
      .def_readwrite("chi0", &SimConfig::chi0)
      .def_readwrite("chi0_is_default", &SimConfig::chi0_is_default)
      .def("chi_initial", &SimConfig::chi_initial)
      .def("validate", &SimConfig::validate);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("n", &Trajectory::n)
      .def_readonly("h", &Trajectory::h)
      .def_readonly("k_b", &Trajectory::k_b)
      .def_readonly("k_c", &Trajectory::k_c)
      .def_readonly("t", &Trajectory::t)
      .def_readonly("x", &Trajectory::x)
      .def_readonly("z", &Trajectory::z)
      .def_readonly("e", &Trajectory::e)
      .def_readonly("w", &Trajectory::w)
      .def_readonly("alpha", &Trajectory::alpha)
      .def_readonly("margin", &Trajectory::margin)
      .def_readonly("delta_hat", &Trajectory::delta_hat)
      .def_readonly("theta_hat", &Trajectory::theta_hat)
      .def_readonly("u", &Trajectory::u)
      .def_readonly("u_delayed", &Trajectory::u_delayed)
      .def_readonly("chi", &Trajectory::chi)
      .def_readonly("v", &Trajectory::v)
      .def_readonly("Vs", &Trajectory::Vs)
      .def_readonly("y_d", &Trajectory::y_d)
      .def("samples", &Trajectory::samples);

  m.def(
      "rk4_step",
      [](const std::function<std::vector<double>(double, std::vector<double>)>& f, double t,
         const std::vector<double>& state, double h) {
        auto wrapped = [&f](double tt, std::span<const double> s, std::span<double> ds) {
          std::vector<double> out = f(tt, std::vector<double>(s.begin(), s.end()));
          if (out.size() != ds.size())
            throw ConfigError("rk4_step: derivative length does not match the state");
          std::copy(out.begin(), out.end(), ds.begin());
        };
        return rk4_step(wrapped, t, state, h);
      },
      py::arg("f"), py::arg("t"), py::arg("state"), py::arg("h"),
      "One classical fourth-order step; f(t, state) returns the derivative");

  m.def("simulate", &simulate, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("lyapunov_surrogate", &lyapunov_surrogate, py::arg("trajectory"));
  m.def(
      "lyapunov_surrogate_sample",
      [](const std::vector<double>& z, const std::vector<double>& e,
         const std::vector<double>& k_b) {
        return lyapunov_surrogate_sample(as_span(z), as_span(e), as_span(k_b));
      },
      py::arg("z"), py::arg("e"), py::arg("k_b"));

  py::class_<ConstraintEntry>(m, "ConstraintEntry")
      .def_readonly("name", &ConstraintEntry::name)
      .def_readonly("value", &ConstraintEntry::value)
      .def_readonly("bound", &ConstraintEntry::bound)
      .def_readonly("passed", &ConstraintEntry::pass);

  py::class_<ConstraintReport>(m, "ConstraintReport")
      .def_readonly("x_sup", &ConstraintReport::x_sup)
      .def_readonly("z_sup", &ConstraintReport::z_sup)
      .def_readonly("margin_min", &ConstraintReport::margin_min)
      .def_readonly("rho", &ConstraintReport::rho)
      .def_readonly("entries", &ConstraintReport::entries)
      .def_readonly("passed", &ConstraintReport::pass);

  m.def("check_constraints", &check_constraints, py::arg("trajectory"), py::arg("A0"));

  py::class_<PrereqReport>(m, "PrereqReport")
      .def_readonly("A0", &PrereqReport::A0)
      .def_readonly("entries", &PrereqReport::entries)
      .def_readonly("passed", &PrereqReport::pass);

  m.def("verify_prerequisites", &verify_prerequisites, py::arg("config"));

  // --- scenarios and feasibility -------------------------------------------
  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("plant_kind", &Scenario::plant_kind)
      .def_readwrite("n", &Scenario::n)
      .def_readwrite("f_exprs", &Scenario::f_exprs)
      .def_readwrite("d_exprs", &Scenario::d_exprs)
      .def_readwrite("d_bound", &Scenario::d_bound)
      .def_readwrite("k_c", &Scenario::k_c)
      .def_readwrite("ref_expr", &Scenario::ref_expr)
      .def_readwrite("K", &Scenario::K)
      .def_readwrite("k_b", &Scenario::k_b)
      .def_readwrite("sigma", &Scenario::sigma)
      .def_readwrite("gamma", &Scenario::gamma)
      .def_readwrite("beta", &Scenario::beta)
      .def_readwrite("upsilon", &Scenario::upsilon)
      .def_readwrite("filter_tau", &Scenario::filter_tau)
      .def_readwrite("kappa", &Scenario::kappa)
      .def_readwrite("lambda_", &Scenario::lambda)
      .def_readwrite("tau", &Scenario::tau)
      .def_readwrite("h", &Scenario::h)
      .def_readwrite("T", &Scenario::T)
      .def_readwrite("x0", &Scenario::x0)
      .def_readwrite("delta0", &Scenario::delta0)
      .def_readwrite("theta0", &Scenario::theta0)
      .def_readwrite("u0", &Scenario::u0)
      .def_readwrite("chi0", &Scenario::chi0)
      .def_readwrite("chi0_given", &Scenario::chi0_given)
      .def_readwrite("fls_counts", &Scenario::fls_counts)
      .def_readwrite("fls_w_range", &Scenario::fls_w_range)
      .def_readwrite("stride", &Scenario::stride);

  m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("source_name"));
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("build_sim_config", &build_sim_config, py::arg("scenario"));

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("K_grid", &GridSpec::K_grid)
      .def_readwrite("kb_grid", &GridSpec::kb_grid)
      .def_readwrite("init_fraction", &GridSpec::init_fraction)
      .def_readwrite("threads", &GridSpec::threads);

  m.def("parse_grid", &parse_grid, py::arg("text"), py::arg("source_name"), py::arg("n"));
  m.def("load_grid", &load_grid, py::arg("path"), py::arg("n"));

  py::class_<FeasibilityProblem>(m, "FeasibilityProblem")
      .def(py::init<>())
      .def_readwrite("base", &FeasibilityProblem::base)
      .def_readwrite("K_grid", &FeasibilityProblem::K_grid)
      .def_readwrite("kb_grid", &FeasibilityProblem::kb_grid)
      .def_readwrite("init_samples", &FeasibilityProblem::init_samples)
      .def_readwrite("init_fraction", &FeasibilityProblem::init_fraction)
      .def_readwrite("threads", &FeasibilityProblem::threads);

  py::class_<CandidateResult>(m, "CandidateResult")
      .def_readonly("sigma", &CandidateResult::sigma)
      .def_readonly("feasible", &CandidateResult::feasible)
      .def_readonly("N", &CandidateResult::N)
      .def_readonly("rho", &CandidateResult::rho)
      .def_readonly("violated", &CandidateResult::violated)
      .def_readonly("violation", &CandidateResult::violation);

  py::class_<FeasibilityResult>(m, "FeasibilityResult")
      .def_readonly("best", &FeasibilityResult::best)
      .def_readonly("evaluated", &FeasibilityResult::evaluated);

  m.def("build_feasibility_problem", &build_feasibility_problem, py::arg("scenario"),
        py::arg("grid"));
  m.def("feasibility_search", &feasibility_search, py::arg("problem"),
        py::call_guard<py::gil_scoped_release>());
  m.def("estimate_rho", &estimate_rho, py::arg("config"), py::arg("init_samples"));
}
