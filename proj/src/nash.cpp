#include "ggames/nash.hpp"

#include <cmath>
#include <sstream>

#include "ggames/errors.hpp"

namespace ggames {

namespace {

// Factors within this distance of 1 count as failing the condition: the
// eigenvalues carry rounding error of that order.
constexpr double kBoundaryTol = 1e-12;

void require_players(int expected, const Profile& theta, const char* where) {
  if (theta.players() != expected) throw ShapeError(std::string(where) + ": theta has the wrong number of players");
}

std::string contraction_message(double lambda1, const UtilityConstants& k, double q) {
  std::ostringstream os;
  os << "contraction condition ell_U * lambda_1 < alpha_U fails: lambda_1 = " << lambda1 << ", ell_U = " << k.ell_U
     << ", alpha_U = " << k.alpha << " (factor " << q << ")";
  return os.str();
}

template <typename Aggregate>
NashSolution iterate(const UtilityModel& u, const Profile& theta, double q, const NashOptions& opt,
                     Aggregate aggregate) {
  if (opt.tol <= 0.0 || opt.max_iters < 1) throw ArgumentError("Nash solver needs tol > 0 and max_iters >= 1");
  const double tol_br = opt.tol_br > 0 ? opt.tol_br : opt.tol / 10.0;
  const int n = theta.players();
  const auto& space = theta.space();
  Profile a = Profile::zeros(space, n);
  double prev = -1.0, ratio = 0.0;
  for (int it = 1; it <= opt.max_iters; ++it) {
    const Profile z = aggregate(a);
    Eigen::MatrixXd next(n, theta.slices());
    for (int i = 0; i < n; ++i) {
      const Process zi = z.process(i), ti = theta.process(i);
      Process br = [&] {
        if (auto cf = u.closed_form_best_response(zi, ti)) return *cf;
        return projected_gradient_best_response(u, zi, ti, a.process(i), tol_br, opt.br_max_iters);
      }();
      next.row(i) = br.flat().transpose();
    }
    Profile a_next(space, std::move(next));
    const double d = profile_distance(a_next, a);
    const double scale = std::max(1.0, profile_norm(a_next, Normalization::normalized));
    if (prev > 1e-9 * scale && d > 1e-9 * scale) ratio = std::max(ratio, d / prev);
    prev = d;
    a = std::move(a_next);
    if (d <= opt.tol) {
      NashSolution s{a, aggregate(a), it, d, q, q < 1 ? d * q / (1.0 - q) : INFINITY, ratio};
      return s;
    }
  }
  throw NumericError("Nash fixed-point iteration did not converge", prev);
}

}  // namespace

Process projected_gradient_best_response(const UtilityModel& u, const Process& z, const Process& theta,
                                         const Process& start, double tol_br, int max_iters) {
  const double step = 1.0 / u.constants().smoothness;
  Process a = u.action_set().project(start);
  double gm = INFINITY;
  for (int it = 0; it < max_iters; ++it) {
    Process next = u.action_set().project(a + step * u.grad_action(a, z, theta));
    gm = norm_A(next - a) / step;
    a = std::move(next);
    if (gm <= tol_br) return a;
  }
  throw NumericError("projected gradient best response did not converge", gm);
}

Process best_response(const UtilityModel& u, const Process& z, const Process& theta, double tol_br, int max_iters) {
  require_same_space(z.space(), theta.space(), "best_response");
  if (auto cf = u.closed_form_best_response(z, theta)) return *cf;
  return projected_gradient_best_response(u, z, theta, Process::constant(theta.space(), 0.0), tol_br, max_iters);
}

double normalized_lambda1(const InteractionMatrix& g) {
  return eigenvalues(g).cwiseAbs().maxCoeff() / g.size();
}

NashSolution solve_nash_fixed_point(const UtilityModel& u, const InteractionMatrix& g, const Profile& theta,
                                    const NashOptions& opt) {
  require_players(g.size(), theta, "solve_nash_fixed_point");
  const auto k = u.constants();
  const double lambda1 = normalized_lambda1(g);
  const double q = k.ell_U * lambda1 / k.alpha;
  if (!(q < 1.0 - kBoundaryTol)) throw PreconditionError(contraction_message(lambda1, k, q));
  return iterate(u, theta, q, opt, [&g](const Profile& a) { return local_aggregate(g, a); });
}

NashSolution solve_nash_fixed_point(const UtilityModel& u, const Graphon& w, const Profile& theta,
                                    const NashOptions& opt) {
  const int m = theta.players();
  const auto k = u.constants();
  const double lambda1 = graphon_lambda1(w, std::max(m, 2)) * (1.0 + opt.graphon_margin);
  const double q = k.ell_U * lambda1 / k.alpha;
  if (!(q < 1.0 - kBoundaryTol)) throw PreconditionError(contraction_message(lambda1, k, q));
  const InteractionMatrix g = discretize(w, m);
  return iterate(u, theta, q, opt, [&g](const Profile& a) { return local_aggregate(g, a); });
}

NashSolution solve_nash_lq(const InteractionMatrix& g, double beta, const Profile& theta) {
  require_players(g.size(), theta, "solve_nash_lq");
  const int n = g.size();
  const Eigen::VectorXd lam = eigenvalues(g);
  const double critical = beta >= 0 ? lam[0] : lam[n - 1];
  if (!(1.0 - beta * critical / n > kBoundaryTol)) {
    std::ostringstream os;
    os << "spectral condition beta * lambda / N < 1 fails: beta = " << beta << ", lambda_1 = " << lam[0]
       << ", lambda_N = " << lam[n - 1] << ", N = " << n;
    throw PreconditionError(os.str());
  }
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - (beta * g.scale() / n) * g.entries();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  Profile a(theta.space(), lu.solve(theta.data()));
  Profile z = local_aggregate(g, a);
  const double residual = profile_distance(a, theta + beta * z);
  const double q = std::abs(beta) * lam.cwiseAbs().maxCoeff() / n;
  return NashSolution{std::move(a), std::move(z), 1, residual, q, residual, 0.0};
}

NashSolution solve_nash_lq(const Graphon& w, double beta, const Profile& theta) {
  return solve_nash_lq(discretize(w, theta.players()), beta, theta);
}

NashSolution solve_nash(const UtilityModel& u, const InteractionMatrix& g, const Profile& theta,
                        const NashOptions& options) {
  if (const auto* lq = dynamic_cast<const LQUtility*>(&u); lq && !lq->action_set().bounded())
    return solve_nash_lq(g, lq->beta(), theta);
  return solve_nash_fixed_point(u, g, theta, options);
}

double average_welfare(const UtilityModel& u, const InteractionMatrix& g, const Profile& a, const Profile& theta) {
  require_players(g.size(), a, "average_welfare");
  require_players(g.size(), theta, "average_welfare");
  require_same_space(a.space(), theta.space(), "average_welfare");
  const Profile z = local_aggregate(g, a);
  double total = 0.0;
  for (int i = 0; i < a.players(); ++i) total += u.value(a.process(i), z.process(i), theta.process(i));
  return total / a.players();
}

double average_welfare(const UtilityModel& u, const Graphon& w, const Profile& a, const Profile& theta) {
  return average_welfare(u, discretize(w, a.players()), a, theta);
}

}  // namespace ggames
