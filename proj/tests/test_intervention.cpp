#include <gtest/gtest.h>

#include <cmath>

#include "ggames/errors.hpp"
#include "ggames/intervention.hpp"
#include "support.hpp"

using namespace ggames;

namespace {

InteractionMatrix swap2() {
  Eigen::MatrixXd g(2, 2);
  g << 0, 1, 1, 0;
  return InteractionMatrix(g);
}

InterventionProblem network_problem(const InteractionMatrix& g, double beta, double w_tilde, Profile theta,
                                    double budget) {
  auto u = std::make_shared<LQUtility>(LQUtility::network(beta, w_tilde, g.size()));
  return InterventionProblem{u, g, std::move(theta), budget};
}

// Welfare of an arbitrary intervention evaluated from scratch: solve the
// linear system directly and average the utilities.
double welfare_of(const InterventionProblem& p, const Profile& theta_hat) {
  const auto& lq = dynamic_cast<const LQUtility&>(*p.utility);
  const int n = p.structure.size();
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - lq.beta() / n * p.structure.effective();
  const Profile shifted = p.theta + theta_hat;
  const Profile a(p.theta.space(), m.lu().solve(shifted.data()));
  return average_welfare(lq, p.structure, a, shifted);
}

// Cosine, in the normalized inner product, between M^-2 (theta + x) and x.
double kkt_cosine(const InterventionProblem& p, const Profile& x) {
  const auto& lq = dynamic_cast<const LQUtility&>(*p.utility);
  const int n = p.structure.size();
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - lq.beta() / n * p.structure.effective();
  const Eigen::MatrixXd minv = m.inverse();
  const Profile y(p.theta.space(), minv * minv * (p.theta + x).data());
  return profile_inner(y, x, Normalization::normalized) / (profile_norm(y, Normalization::normalized) * profile_norm(x, Normalization::normalized));
}

// Random feasible intervention on the budget sphere.
Profile random_feasible(const InterventionProblem& p, rng::Stream& r) {
  Profile x = fixtures::random_profile(p.theta.space(), p.theta.players(), r);
  return (std::sqrt(p.budget) / profile_norm(x, Normalization::normalized)) * x;
}

}  // namespace

TEST(Amplification, TwoByTwo) {
  Eigen::VectorXd eig(2);
  eig << 1, -1;
  const auto a = amplification_factors(eig, 0.5, 2);
  EXPECT_NEAR(a[0], 1 / (0.75 * 0.75), 1e-15);
  EXPECT_NEAR(a[1], 1 / (1.25 * 1.25), 1e-15);
  EXPECT_THROW(amplification_factors(eig, 2.0, 2), PreconditionError);
}

TEST(SolveMu, SingleComponentClosedForm) {
  // C_B = (1/N) (w alpha / (mu - w alpha))^2 ||theta||^2 gives mu = w alpha (1 + ||theta|| / sqrt(N C_B)).
  Eigen::VectorXd alpha(1), norms(1);
  alpha << 1.7;
  norms << 4.0;
  const double w = 0.3, n = 5, cb = 0.2;
  EXPECT_NEAR(solve_mu(alpha, w, norms, cb, n), w * 1.7 * (1 + 2.0 / std::sqrt(n * cb)), 1e-12);
}

TEST(SolveMu, BudgetEquationHolds) {
  rng::Stream r(1);
  for (int rep = 0; rep < 50; ++rep) {
    const int k = r.integer(1, 30);
    Eigen::VectorXd alpha(k), norms(k);
    for (int j = 0; j < k; ++j) {
      alpha[j] = r.uniform(0.2, 5.0);
      norms[j] = r.uniform() < 0.2 ? 0.0 : r.uniform(0.0, 3.0);
    }
    if (norms.sum() == 0.0) norms[0] = 1.0;
    const double w = r.uniform(0.01, 2.0) * (r.uniform() < 0.7 ? 1 : -1);
    const double n = k;
    const double cb = w > 0 ? std::pow(10.0, r.uniform(-6, 6)) : norms.sum() / n * r.uniform(0.01, 0.99);
    const auto sol = solve_mu_detailed(alpha, w, norms, cb, n);
    double spent = 0.0;
    for (int j = 0; j < k; ++j)
      if (norms[j] > 0) {
        EXPECT_GT(sol.mu, w * alpha[j]);
        spent += std::pow(w * alpha[j] / (sol.mu - w * alpha[j]), 2) * norms[j];
      }
    EXPECT_NEAR(spent / n, cb, 1e-9 * cb);
    if (w < 0) EXPECT_GT(sol.mu, 0.0);
  }
}

TEST(SolveMu, TrivialAndDegenerateCases) {
  Eigen::VectorXd alpha(2), norms(2);
  alpha << 1, 2;
  norms << 1, 1;
  EXPECT_THROW(solve_mu(alpha, -0.5, norms, 1.0, 2), DomainError);  // ||theta||^2 / N = 1 <= C_B
  EXPECT_THROW(solve_mu(alpha, 0.0, norms, 0.1, 2), DomainError);
  EXPECT_THROW(solve_mu(alpha, 0.5, Eigen::VectorXd::Zero(2), 0.1, 2), DomainError);
  EXPECT_THROW(solve_mu(alpha, 0.5, norms, 0.0, 2), ArgumentError);
}

TEST(Spectral, TwoPlayerBruteForce) {
  // One slice, two players: the budget sphere is a circle, so the optimum
  // can be found by direct search over the angle.
  auto s = make_space(1.0, 1, 1);
  for (double beta : {0.6, -0.6}) {
    for (double wt : {0.3, -0.4}) {
      Eigen::MatrixXd th(2, 1);
      th << 1.0, 0.4;
      const auto p = network_problem(swap2(), beta, wt, Profile(s, th), 0.3);
      const auto sol = solve_spectral_lq(p);
      const double radius = std::sqrt(2 * p.budget);
      const auto at = [&](double phi) {
        Eigen::MatrixXd x(2, 1);
        x << radius * std::cos(phi), radius * std::sin(phi);
        return welfare_of(p, Profile(s, x));
      };
      double best_phi = 0, best = -INFINITY;
      const int grid = 20000;
      for (int k = 0; k < grid; ++k) {
        const double phi = 2 * M_PI * k / grid;
        if (const double v = at(phi); v > best) best = v, best_phi = phi;
      }
      double lo = best_phi - 2 * M_PI / grid, hi = best_phi + 2 * M_PI / grid;
      for (int it = 0; it < 200; ++it) {
        const double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
        (at(a) < at(b) ? lo : hi) = (at(a) < at(b) ? a : b);
      }
      best = at(0.5 * (lo + hi));
      EXPECT_NEAR(sol.welfare, best, 1e-10 * std::max(1.0, std::abs(best))) << "beta " << beta << " w~ " << wt;
      EXPECT_NEAR(sol.budget_used, p.budget, 1e-10);
    }
  }
}

TEST(Spectral, KKTAndDominanceOnRandomInstances) {
  rng::Stream r(2);
  for (int rep = 0; rep < 20; ++rep) {
    auto s = fixtures::random_space(r, 3, 5);
    const int n = r.integer(3, 20);
    InteractionMatrix g = fixtures::random_graph(n, r);
    const double beta = (r.uniform() < 0.5 ? -1 : 1) * r.uniform(0.2, 0.9) / normalized_lambda1(g);
    const double wt = r.uniform() < 0.6 ? r.uniform(0.0, 1.0) : r.uniform(-1.0, -0.6 / n);
    const Profile theta = fixtures::random_profile(s, n, r, 0.5, 1.0);
    const double th2 = std::pow(profile_norm(theta, Normalization::normalized), 2);
    const double cb = wt + 0.5 / n > 0 ? std::pow(10.0, r.uniform(-3, 2)) : th2 * r.uniform(0.05, 0.9);
    const auto p = network_problem(g, beta, wt, theta, cb);
    const auto sol = solve_spectral_lq(p);
    EXPECT_NEAR(sol.budget_used, cb, 1e-8 * cb);
    EXPECT_NEAR(sol.welfare, welfare_of(p, sol.theta_bar), 1e-9 * (1 + std::abs(sol.welfare)));
    const double sign = sol.welfare_weight > 0 ? 1.0 : -1.0;
    EXPECT_NEAR(kkt_cosine(p, sol.theta_bar), sign, 1e-8);
    for (int k = 0; k < 20; ++k)
      EXPECT_GE(sol.welfare, welfare_of(p, random_feasible(p, r)) - 1e-10 * (1 + std::abs(sol.welfare)));
    if (sol.welfare_weight > 0) EXPECT_GE(sol.welfare, sol.status_quo_welfare);
  }
}

TEST(Spectral, RegimeConventionsAgree) {
  // The same externality coefficient in network and graphon conventions
  // yields the same optimal intervention.
  rng::Stream r(3);
  auto s = make_space(1.0, 4, 2);
  const int n = 12;
  const InteractionMatrix g = fixtures::random_graph(n, r);
  const Profile theta = fixtures::random_profile(s, n, r);
  const double beta = 0.5 / normalized_lambda1(g), c = 0.2;
  const auto net = solve_spectral_lq(network_problem(g, beta, c / n, theta, 0.5));
  auto gu = std::make_shared<LQUtility>(LQUtility::graphon(beta, c));
  const auto gr = solve_spectral_lq(InterventionProblem{gu, g, theta, 0.5});
  EXPECT_LT(profile_distance(net.theta_bar, gr.theta_bar), 1e-10);
  EXPECT_NEAR(net.welfare, gr.welfare, 1e-10);
}

TEST(Spectral, InactiveComponentsWarn) {
  // theta along the top eigenvector of the complete graph only.
  auto s = make_space(1.0, 2, 1);
  const int n = 4;
  Eigen::MatrixXd full = Eigen::MatrixXd::Ones(n, n);
  const auto p = network_problem(InteractionMatrix(full), 0.5, 0.1, Profile::constant(s, n, 1.0), 0.2);
  const auto sol = solve_spectral_lq(p);
  EXPECT_FALSE(sol.warnings.empty());
  EXPECT_EQ(std::count(sol.active.begin(), sol.active.end(), true), 1);
  // All mass stays on the constant direction.
  EXPECT_LT((sol.theta_bar.data().array() - sol.theta_bar.data()(0, 0)).abs().maxCoeff(), 1e-12);
}

TEST(Spectral, TrivialProblemIsReported) {
  auto s = make_space(1.0, 2, 1);
  const auto p = network_problem(swap2(), 0.5, -1.0, Profile::constant(s, 2, 1.0), 2.0);
  EXPECT_THROW(solve_spectral_lq(p), DomainError);
  auto gu = std::make_shared<LogCoshUtility>(1.0, 0.5, 0.0, 0.0);
  EXPECT_THROW(solve_spectral_lq(InterventionProblem{gu, swap2(), Profile::constant(s, 2, 1.0), 1.0}),
               CapabilityError);
}

TEST(Similarity, MonotoneRatios) {
  rng::Stream r(4);
  for (int rep = 0; rep < 10; ++rep) {
    auto s = fixtures::random_space(r, 2, 4);
    const int n = r.integer(3, 15);
    InteractionMatrix g = fixtures::random_graph(n, r);
    const double beta = (rep % 2 ? -1 : 1) * 0.7 / normalized_lambda1(g);
    const auto p = network_problem(g, beta, 0.2, fixtures::random_profile(s, n, r), r.uniform(0.1, 10));
    const auto sol = solve_spectral_lq(p);
    const auto rep_ = similarity_report(sol, beta);
    EXPECT_TRUE(rep_.monotone) << rep_.violations << " violations";
    EXPECT_EQ(rep_.expected, beta > 0 ? "increasing" : "decreasing");
  }
}

TEST(Similarity, ConstantWhenBetaIsZero) {
  rng::Stream r(5);
  auto s = make_space(1.0, 3, 1);
  const int n = 6;
  const auto p = network_problem(fixtures::random_graph(n, r), 0.0, 0.3, fixtures::random_profile(s, n, r), 1.0);
  const auto sol = solve_spectral_lq(p);
  EXPECT_TRUE(similarity_report(sol, 0.0).monotone);
  // With beta = 0 the optimal intervention is parallel to theta.
  EXPECT_NEAR(profile_inner(sol.theta_bar, p.theta, Normalization::normalized),
              profile_norm(sol.theta_bar, Normalization::normalized) * profile_norm(p.theta, Normalization::normalized),
              1e-10);
}

TEST(BudgetAsymptotics, SmallBudgetsFollowAmplification) {
  rng::Stream r(6);
  auto s = make_space(1.0, 3, 2);
  const int n = 10;
  InteractionMatrix g = fixtures::random_graph(n, r);
  const auto p = network_problem(g, 0.6 / normalized_lambda1(g), 0.2, fixtures::random_profile(s, n, r), 1.0);
  const auto rep = budget_asymptotics(p, AsymptoticDirection::small);
  ASSERT_EQ(rep.ladder.size(), 4u);
  for (std::size_t k = 1; k < rep.ladder.size(); ++k) EXPECT_LT(rep.ladder[k].gap, rep.ladder[k - 1].gap);
  EXPECT_LT(rep.ladder.back().gap, 1e-3);
}

TEST(BudgetAsymptotics, LargeBudgetsAlignWithExtremeEigenvector) {
  rng::Stream r(7);
  auto s = make_space(1.0, 3, 2);
  const int n = 10;
  InteractionMatrix g = fixtures::random_graph(n, r);
  for (double sign : {1.0, -1.0}) {
    const auto p =
        network_problem(g, sign * 0.6 / normalized_lambda1(g), 0.2, fixtures::random_profile(s, n, r), 1.0);
    const auto rep = budget_asymptotics(p, AsymptoticDirection::large);
    EXPECT_EQ(rep.reference_component, sign > 0 ? 0 : n - 1);
    for (std::size_t k = 1; k < rep.ladder.size(); ++k)
      EXPECT_GE(rep.ladder[k].similarity, rep.ladder[k - 1].similarity - 1e-12);
    EXPECT_GT(rep.ladder.back().similarity, 1 - 1e-6);
    EXPECT_GT(rep.ladder.back().slice_min, 1 - 1e-3);
  }
}

TEST(SimpleIntervention, RatioBoundAboveThreshold) {
  rng::Stream r(8);
  for (int rep = 0; rep < 15; ++rep) {
    auto s = fixtures::random_space(r, 2, 4);
    const int n = r.integer(3, 15);
    InteractionMatrix g = fixtures::random_graph(n, r);
    const double beta = (rep % 2 ? -1 : 1) * r.uniform(0.3, 0.9) / normalized_lambda1(g);
    const double delta = 0.1;
    auto p = network_problem(g, beta, r.uniform(0.0, 0.5), fixtures::random_profile(s, n, r, 0.3, 1.0), 1.0);
    p.budget = simple_intervention_threshold(p, delta) * r.uniform(1.0, 5.0);
    const auto si = simple_intervention(p, delta);
    EXPECT_NEAR(si.budget_used, p.budget, 1e-9 * p.budget);
    EXPECT_GE(si.ratio, 1 - 1e-12);
    EXPECT_LE(si.ratio, 1 + delta);
    EXPECT_LE(si.delta_implied, delta);
    EXPECT_GT(si.similarity, 0.0);
  }
}

TEST(SimpleIntervention, Preconditions) {
  auto s = make_space(1.0, 1, 1);
  Eigen::MatrixXd th(2, 1);
  th << 1.0, 0.3;
  EXPECT_THROW(simple_intervention(network_problem(swap2(), 0.0, 0.2, Profile(s, th), 1.0)), PreconditionError);
  EXPECT_THROW(simple_intervention(network_problem(swap2(), 0.5, -1.0, Profile(s, th), 0.1)), PreconditionError);
  // Complete graph on three players: lambda_N = -1 is a double eigenvalue.
  Eigen::MatrixXd k3 = Eigen::MatrixXd::Ones(3, 3);
  k3.diagonal().setZero();
  auto s3 = make_space(1.0, 2, 1);
  rng::Stream r(9);
  EXPECT_THROW(simple_intervention(network_problem(InteractionMatrix(k3), -0.5, 0.2,
                                                   fixtures::random_profile(s3, 3, r), 1.0)),
               PreconditionError);
}

TEST(General, ConditionAndCapability) {
  const LogCoshUtility strict(0.5, 0.3, 0.0, -1.0);
  EXPECT_LT(planner_condition(strict, 1.0), 1.0);
  const LogCoshUtility weak(1.0, 0.3, 0.0, -0.1);
  EXPECT_GT(planner_condition(weak, 1.0), 1.0);
  auto s = make_space(1.0, 2, 1);
  auto w = std::make_shared<LogCoshUtility>(weak);
  EXPECT_THROW(solve_general_intervention({w, swap2(), Profile::constant(s, 2, 1.0), 0.1}), PreconditionError);
  auto lq = std::make_shared<LQUtility>(LQUtility::network(0.5, 0.1, 2));
  EXPECT_THROW(solve_general_intervention({lq, swap2(), Profile::constant(s, 2, 1.0), 0.1}), CapabilityError);
}

TEST(General, BoundaryCaseMatchesSpectral) {
  // beta = 0 and c < -1/2 sit exactly on the planner condition; the damped
  // iteration still reaches the spectral optimum theta_bar = -sqrt(C_B) theta / ||theta||.
  rng::Stream r(10);
  auto s = make_space(1.0, 3, 2);
  const int n = 6;
  const InteractionMatrix g = fixtures::random_graph(n, r);
  const Profile theta = fixtures::random_profile(s, n, r, 1.0, 0.5);
  auto u = std::make_shared<LQUtility>(LQUtility::graphon(0.0, -0.8));
  const InterventionProblem p{u, g, theta, 0.25};
  GeneralInterventionOptions opt;
  opt.tol = 1e-11;
  const auto gen = solve_general_intervention(p, opt);
  EXPECT_TRUE(gen.damped);
  EXPECT_TRUE(gen.converged);
  const auto spec = solve_spectral_lq(p);
  EXPECT_LT(profile_distance(gen.theta_hat, spec.theta_bar), 1e-9);
  EXPECT_NEAR(gen.welfare, spec.welfare, 1e-9);
}

TEST(General, StrictLogCoshMatchesFixedPointOracle) {
  // With eps = 0 the equilibrium is a = s M^-1 theta~. The planner step
  // maximizes the average utility with the actions held fixed, so a fixed
  // point satisfies s a + 2c theta~ = nu x with theta~ = theta + x, that is
  // Q (theta + x) = nu x for Q = s^2 M^-1 + 2c I. Q is negative definite
  // here, and nu >= 0 is found by bisection on the budget.
  rng::Stream r(11);
  auto s = make_space(1.0, 2, 2);
  const int n = 5;
  const InteractionMatrix g = fixtures::random_graph(n, r);
  const double sens = 0.5, beta = 0.3, c = -1.0;
  const Profile theta = fixtures::random_profile(s, n, r, 1.0, 0.5);
  const double cb = 0.2 * std::pow(profile_norm(theta, Normalization::normalized), 2);
  auto u = std::make_shared<LogCoshUtility>(sens, beta, 0.0, c);
  GeneralInterventionOptions opt;
  opt.tol = 1e-11;
  const auto gen = solve_general_intervention({u, g, theta, cb}, opt);
  EXPECT_FALSE(gen.damped);
  EXPECT_LT(gen.condition, 1.0);
  EXPECT_TRUE(gen.converged);

  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - beta / n * g.effective();
  const Eigen::MatrixXd minv = m.inverse();
  const Eigen::MatrixXd q2 = sens * sens * minv + 2 * c * Eigen::MatrixXd::Identity(n, n);
  const auto x_of = [&](double nu) {
    const Eigen::MatrixXd lhs = nu * Eigen::MatrixXd::Identity(n, n) - q2;
    return Profile(s, lhs.ldlt().solve(q2 * theta.data()));
  };
  double lo = 0.0, hi = 1.0;
  while (std::pow(profile_norm(x_of(hi), Normalization::normalized), 2) > cb) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::pow(profile_norm(x_of(mid), Normalization::normalized), 2) > cb ? lo : hi) = mid;
  }
  const Profile oracle = x_of(0.5 * (lo + hi));
  EXPECT_LT(profile_distance(gen.theta_hat, oracle), 1e-8);
  EXPECT_TRUE(gen.budget_active);
}

TEST(ApproximateNetwork, ConstantAndNorm) {
  auto s = make_space(1.0, 3, 2);
  const Profile c = Profile::constant(s, 12, 0.7);
  const Profile a = approximate_network_intervention(c, 4);
  EXPECT_LT((a.data().array() - 0.7).abs().maxCoeff(), 1e-15);
  rng::Stream r(12);
  const Profile p = fixtures::random_profile(s, 30, r);
  const Profile b = approximate_network_intervention(p, 7);
  EXPECT_NEAR(profile_norm(b, Normalization::normalized), profile_norm(p, Normalization::normalized), 1e-13);
  EXPECT_THROW(approximate_network_intervention(p, 31), ArgumentError);
  // Step profiles aligned with N blocks are recovered exactly.
  const Profile coarse = fixtures::random_profile(s, 5, r);
  EXPECT_LT(profile_distance(approximate_network_intervention(step_embed(coarse, 20), 5), coarse), 1e-13);
}
