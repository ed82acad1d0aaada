#include <cmath>
#include <sstream>

#include "ggames/errors.hpp"
#include "ggames/intervention.hpp"

namespace ggames {

namespace {

constexpr double kConditionTol = 1e-12;

// Radial projection onto {(1/N) ||x||^2 <= C_B}.
Profile project_budget(const Profile& x, double budget) {
  const double nrm = profile_norm(x, Normalization::normalized);
  const double radius = std::sqrt(budget);
  if (nrm <= radius) return x;
  if (radius == 0.0) return Profile::zeros(x.space(), x.players());
  return (radius / nrm) * x;
}

// Planner best response to fixed actions: maximize (1/N) sum_i U(a^i, z^i, theta^i + x^i)
// over the budget ball by projected gradient ascent. In the normalized inner
// product the gradient in x^i is grad_theta U at player i.
Profile planner_response(const UtilityModel& u, const Profile& a, const Profile& z, const Profile& theta,
                         const Profile& start, double budget, double tol, int max_iters) {
  const auto pc = u.planner_constants();
  const double step = 1.0 / (pc.beta_U + pc.smoothness);
  const int n = theta.players();
  Profile x = project_budget(start, budget);
  double gm = INFINITY;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::MatrixXd grad(n, theta.slices());
    for (int i = 0; i < n; ++i) {
      const Process gi = u.grad_heterogeneity(a.process(i), z.process(i), theta.process(i) + x.process(i));
      grad.row(i) = gi.flat().transpose();
    }
    Profile next = project_budget(x + step * Profile(theta.space(), std::move(grad)), budget);
    gm = profile_distance(next, x) / step;
    x = std::move(next);
    if (gm <= tol) return x;
  }
  throw NumericError("planner projected gradient ascent did not converge", gm);
}

}  // namespace

double planner_condition(const UtilityModel& u, double lambda1) {
  const auto k = u.constants();
  const auto pc = u.planner_constants();
  const double denom = k.alpha - k.ell_U * lambda1;
  if (!(denom > 0.0)) {
    std::ostringstream os;
    os << "contraction condition ell_U * lambda_1 < alpha_U fails: lambda_1 = " << lambda1 << ", ell_U = " << k.ell_U
       << ", alpha_U = " << k.alpha;
    throw PreconditionError(os.str());
  }
  return std::max((pc.ell_a + pc.ell_z * lambda1) / pc.beta_U, k.ell_theta / denom);
}

GeneralInterventionSolution solve_general_intervention(const InterventionProblem& problem,
                                                       const GeneralInterventionOptions& opt) {
  problem.validate();
  const UtilityModel& u = *problem.utility;
  if (!u.has_planner())
    throw CapabilityError(u.name() + " utility is not strongly concave in theta; the general solver needs it");
  if (opt.tol <= 0.0 || opt.max_iters < 1) throw ArgumentError("general intervention needs tol > 0, max_iters >= 1");

  const double lambda1 = normalized_lambda1(problem.structure);
  const double cond = planner_condition(u, lambda1);
  GeneralInterventionSolution sol{.theta_hat = Profile::zeros(problem.theta.space(), problem.theta.players()),
                                  .equilibrium = solve_nash(u, problem.structure, problem.theta, opt.nash)};
  sol.condition = cond;
  if (cond > 1.0 + kConditionTol) {
    std::ostringstream os;
    os << "planner contraction condition fails: max((ell_a + ell_z lambda_1)/beta_U, "
          "ell_theta/(alpha_U - ell_U lambda_1)) = "
       << cond << " > 1 (lambda_1 = " << lambda1 << ")";
    throw PreconditionError(os.str());
  }
  if (cond >= 1.0 - kConditionTol) {
    sol.damped = true;
    sol.warnings.push_back(
        "planner contraction condition holds with equality: iterating with damping 1/2, the solution may not be "
        "unique");
  }

  NashOptions nash = opt.nash;
  nash.tol = std::min(nash.tol, opt.tol / 10.0);
  const double planner_tol = opt.planner_tol > 0 ? opt.planner_tol : opt.tol / 10.0;
  const auto& theta = problem.theta;

  Profile theta_hat = sol.theta_hat;
  Profile a = Profile::zeros(theta.space(), theta.players());
  double d = INFINITY;
  int it = 0;
  while (it < opt.max_iters) {
    ++it;
    const Profile z = local_aggregate(problem.structure, a);
    Profile th_next = planner_response(u, a, z, theta, theta_hat, problem.budget, planner_tol, opt.planner_max_iters);
    Profile a_next = solve_nash_fixed_point(u, problem.structure, theta + theta_hat, nash).actions;
    if (sol.damped) {
      th_next = 0.5 * (theta_hat + th_next);
      a_next = 0.5 * (a + a_next);
    }
    d = std::hypot(profile_distance(th_next, theta_hat), profile_distance(a_next, a));
    theta_hat = std::move(th_next);
    a = std::move(a_next);
    if (d <= opt.tol) {
      sol.converged = true;
      break;
    }
  }
  if (!sol.converged) sol.warnings.push_back("alternating iteration stopped at max_iters before reaching tol");

  sol.theta_hat = theta_hat;
  sol.iterations = it;
  sol.residual = d;
  sol.equilibrium = solve_nash_fixed_point(u, problem.structure, theta + theta_hat, nash);
  sol.welfare = average_welfare(u, problem.structure, sol.equilibrium.actions, theta + theta_hat);
  const double used = std::pow(profile_norm(theta_hat, Normalization::normalized), 2);
  sol.budget_active = problem.budget > 0.0 && used >= problem.budget * (1.0 - 1e-8);
  return sol;
}

}  // namespace ggames
