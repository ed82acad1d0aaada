#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "ggames/cli.hpp"
#include "ggames/cut_norm.hpp"
#include "ggames/errors.hpp"
#include "ggames/experiments.hpp"
#include "ggames/intervention.hpp"
#include "ggames/nash.hpp"
#include "ggames/sampling.hpp"

namespace py = pybind11;
using namespace ggames;

namespace {

// Python-side handle on the shared immutable space.
struct PySpace {
  SpacePtr ptr;
};

PySpace wrap(SpacePtr p) { return PySpace{std::move(p)}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Network and graphon games: equilibria, targeted interventions and convergence experiments";

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);
  py::register_exception<CapabilityError>(m, "CapabilityError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  // ---- spaces and profiles
  py::class_<PySpace>(m, "Space")
      .def(py::init([](double horizon, int steps, int scenarios) { return wrap(make_space(horizon, steps, scenarios)); }),
           py::arg("horizon") = 1.0, py::arg("steps") = 1, py::arg("scenarios") = 1)
      .def_static(
          "with_probabilities",
          [](double horizon, int steps, std::vector<double> probabilities) {
            return wrap(make_space(TimeGrid::uniform(horizon, steps), ScenarioSet(std::move(probabilities))));
          },
          py::arg("horizon"), py::arg("steps"), py::arg("probabilities"))
      .def_property_readonly("slices", [](const PySpace& s) { return s.ptr->slices(); })
      .def_property_readonly("steps", [](const PySpace& s) { return s.ptr->grid().steps(); })
      .def_property_readonly("scenarios", [](const PySpace& s) { return s.ptr->scenarios().size(); })
      .def_property_readonly("slice_weights", [](const PySpace& s) { return s.ptr->slice_weights(); });

  py::enum_<Normalization>(m, "Normalization")
      .value("normalized", Normalization::normalized)
      .value("unnormalized", Normalization::unnormalized);

  py::class_<Profile>(m, "Profile")
      .def(py::init([](const PySpace& s, Eigen::MatrixXd data) { return Profile(s.ptr, std::move(data)); }),
           py::arg("space"), py::arg("data"))
      .def_property_readonly("data", &Profile::data)
      .def_property_readonly("players", &Profile::players)
      .def_property_readonly("space", [](const Profile& p) { return wrap(p.space()); })
      .def("norm", [](const Profile& p, Normalization n) { return profile_norm(p, n); },
           py::arg("mode") = Normalization::normalized)
      .def("__add__", [](const Profile& a, const Profile& b) { return a + b; })
      .def("__sub__", [](const Profile& a, const Profile& b) { return a - b; });
  m.def("profile_distance", &profile_distance);
  m.def("step_embed", &step_embed, py::arg("profile"), py::arg("m"));

  // ---- structures
  py::class_<InteractionMatrix>(m, "InteractionMatrix")
      .def(py::init<Eigen::MatrixXd, double>(), py::arg("entries"), py::arg("scale") = 1.0)
      .def_property_readonly("entries", &InteractionMatrix::entries)
      .def_property_readonly("scale", &InteractionMatrix::scale)
      .def_property_readonly("size", &InteractionMatrix::size);

  py::class_<Graphon>(m, "Graphon")
      .def_static("constant", &Graphon::constant, py::arg("p"))
      .def_static("product", &Graphon::product)
      .def_static("minimum", &Graphon::minimum)
      .def_static("step", py::overload_cast<Eigen::MatrixXd>(&Graphon::step), py::arg("values"))
      .def_static("stochastic_block", &Graphon::stochastic_block, py::arg("proportions"), py::arg("probabilities"))
      .def("__call__", &Graphon::operator(), py::arg("x"), py::arg("y"))
      .def("discretize", &Graphon::discretize, py::arg("m"))
      .def("__repr__", &Graphon::describe);
  m.def("discretize", py::overload_cast<const Graphon&, int>(&discretize), py::arg("graphon"), py::arg("m"));
  m.def("step_graphon", &step_graphon);
  m.def("graphon_lambda1", &graphon_lambda1, py::arg("graphon"), py::arg("m") = 256);
  m.def("normalized_lambda1", &normalized_lambda1);
  m.def("eigenvalues", py::overload_cast<const InteractionMatrix&>(&eigenvalues));
  m.def(
      "cut_norm",
      [](const Graphon& w, const std::string& mode, int m) {
        const auto r = cut_norm(w, parse_cut_norm_mode(mode), m);
        return py::make_tuple(r.value, r.lower_bound);
      },
      py::arg("graphon"), py::arg("mode") = "automatic", py::arg("m") = 256,
      "Cut norm and whether it is only a lower bound.");

  py::class_<SampledGraph>(m, "SampledGraph")
      .def_readonly("matrix", &SampledGraph::matrix)
      .def_readonly("latent", &SampledGraph::latent);
  m.def("sample_weighted", &sample_weighted, py::arg("graphon"), py::arg("n"), py::arg("seed"));
  m.def("sample_simple", &sample_simple, py::arg("graphon"), py::arg("n"), py::arg("kappa"), py::arg("seed"));

  // ---- utilities
  py::class_<UtilityModel, std::shared_ptr<UtilityModel>>(m, "UtilityModel").def_property_readonly("name", &UtilityModel::name);
  py::class_<LQUtility, UtilityModel, std::shared_ptr<LQUtility>>(m, "LQUtility")
      .def_static(
          "network",
          [](double beta, double w_tilde, int players, double radius) {
            return std::make_shared<LQUtility>(LQUtility::network(
                beta, w_tilde, players, radius > 0 ? ActionSet::ball(radius) : ActionSet::unbounded()));
          },
          py::arg("beta"), py::arg("w_tilde"), py::arg("players"), py::arg("action_radius") = 0.0)
      .def_static(
          "graphon",
          [](double beta, double w_tilde, double radius) {
            return std::make_shared<LQUtility>(
                LQUtility::graphon(beta, w_tilde, radius > 0 ? ActionSet::ball(radius) : ActionSet::unbounded()));
          },
          py::arg("beta"), py::arg("w_tilde"), py::arg("action_radius") = 0.0)
      .def_property_readonly("beta", &LQUtility::beta)
      .def_property_readonly("welfare_weight", &LQUtility::welfare_weight);
  py::class_<LogCoshUtility, UtilityModel, std::shared_ptr<LogCoshUtility>>(m, "LogCoshUtility")
      .def(py::init([](double s, double beta, double eps, double c, double radius) {
             return std::make_shared<LogCoshUtility>(s, beta, eps, c,
                                                     radius > 0 ? ActionSet::ball(radius) : ActionSet::unbounded());
           }),
           py::arg("sensitivity"), py::arg("beta"), py::arg("damping"), py::arg("heterogeneity_cost") = 0.0,
           py::arg("action_radius") = 0.0);

  // ---- equilibria
  py::class_<NashOptions>(m, "NashOptions")
      .def(py::init<>())
      .def_readwrite("tol", &NashOptions::tol)
      .def_readwrite("max_iters", &NashOptions::max_iters);
  py::class_<NashSolution>(m, "NashSolution")
      .def_readonly("actions", &NashSolution::actions)
      .def_readonly("aggregate", &NashSolution::aggregate)
      .def_readonly("iterations", &NashSolution::iterations)
      .def_readonly("residual", &NashSolution::residual)
      .def_readonly("contraction_factor", &NashSolution::contraction_factor)
      .def_readonly("error_bound", &NashSolution::error_bound);
  m.def("solve_nash_lq", py::overload_cast<const InteractionMatrix&, double, const Profile&>(&solve_nash_lq),
        py::arg("g"), py::arg("beta"), py::arg("theta"));
  m.def("solve_nash_lq", py::overload_cast<const Graphon&, double, const Profile&>(&solve_nash_lq), py::arg("w"),
        py::arg("beta"), py::arg("theta"));
  m.def("solve_nash_fixed_point",
        py::overload_cast<const UtilityModel&, const InteractionMatrix&, const Profile&, const NashOptions&>(
            &solve_nash_fixed_point),
        py::arg("utility"), py::arg("g"), py::arg("theta"), py::arg("options") = NashOptions{});
  m.def("solve_nash_fixed_point",
        py::overload_cast<const UtilityModel&, const Graphon&, const Profile&, const NashOptions&>(
            &solve_nash_fixed_point),
        py::arg("utility"), py::arg("w"), py::arg("theta"), py::arg("options") = NashOptions{});
  m.def("solve_nash", &solve_nash, py::arg("utility"), py::arg("g"), py::arg("theta"),
        py::arg("options") = NashOptions{});
  m.def("average_welfare",
        py::overload_cast<const UtilityModel&, const InteractionMatrix&, const Profile&, const Profile&>(
            &average_welfare),
        py::arg("utility"), py::arg("g"), py::arg("actions"), py::arg("theta"));

  // ---- interventions
  py::class_<SpectralInterventionSolution>(m, "SpectralInterventionSolution")
      .def_readonly("mu", &SpectralInterventionSolution::mu)
      .def_readonly("welfare_weight", &SpectralInterventionSolution::welfare_weight)
      .def_readonly("eigenvalues", &SpectralInterventionSolution::eigenvalues)
      .def_readonly("alpha", &SpectralInterventionSolution::alpha)
      .def_readonly("factors", &SpectralInterventionSolution::factors)
      .def_readonly("theta_bar", &SpectralInterventionSolution::theta_bar)
      .def_readonly("equilibrium", &SpectralInterventionSolution::equilibrium)
      .def_readonly("welfare", &SpectralInterventionSolution::welfare)
      .def_readonly("status_quo_welfare", &SpectralInterventionSolution::status_quo_welfare)
      .def_readonly("budget_used", &SpectralInterventionSolution::budget_used)
      .def_readonly("similarities", &SpectralInterventionSolution::similarities)
      .def_readonly("ratios", &SpectralInterventionSolution::ratios)
      .def_readonly("warnings", &SpectralInterventionSolution::warnings);
  m.def(
      "solve_spectral_lq",
      [](std::shared_ptr<UtilityModel> u, const InteractionMatrix& g, const Profile& theta, double budget) {
        return solve_spectral_lq(InterventionProblem{std::move(u), g, theta, budget});
      },
      py::arg("utility"), py::arg("g"), py::arg("theta"), py::arg("budget"));
  m.def("solve_mu", &solve_mu, py::arg("alpha"), py::arg("w"), py::arg("norms_squared"), py::arg("budget"),
        py::arg("n"));
  m.def("amplification_factors", &amplification_factors, py::arg("eigenvalues"), py::arg("beta"), py::arg("n"));

  py::class_<GeneralInterventionSolution>(m, "GeneralInterventionSolution")
      .def_readonly("theta_hat", &GeneralInterventionSolution::theta_hat)
      .def_readonly("equilibrium", &GeneralInterventionSolution::equilibrium)
      .def_readonly("welfare", &GeneralInterventionSolution::welfare)
      .def_readonly("iterations", &GeneralInterventionSolution::iterations)
      .def_readonly("converged", &GeneralInterventionSolution::converged)
      .def_readonly("condition", &GeneralInterventionSolution::condition)
      .def_readonly("damped", &GeneralInterventionSolution::damped)
      .def_readonly("warnings", &GeneralInterventionSolution::warnings);
  m.def(
      "solve_general_intervention",
      [](std::shared_ptr<UtilityModel> u, const InteractionMatrix& g, const Profile& theta, double budget,
         double tol) {
        GeneralInterventionOptions opt;
        opt.tol = tol;
        return solve_general_intervention(InterventionProblem{std::move(u), g, theta, budget}, opt);
      },
      py::arg("utility"), py::arg("g"), py::arg("theta"), py::arg("budget"), py::arg("tol") = 1e-9);

  // ---- experiments
  py::class_<RateEstimate>(m, "RateEstimate")
      .def_readonly("valid", &RateEstimate::valid)
      .def_readonly("flag", &RateEstimate::flag)
      .def_readonly("slope", &RateEstimate::slope)
      .def_readonly("intercept", &RateEstimate::intercept)
      .def_readonly("r_squared", &RateEstimate::r_squared);
  m.def("estimate_rate", py::overload_cast<const std::vector<int>&, const std::vector<double>&>(&estimate_rate),
        py::arg("ladder"), py::arg("values"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a ggames subcommand in-process; returns (exit_code, stdout, stderr).");
}
