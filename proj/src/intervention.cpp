#include "ggames/intervention.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ggames/errors.hpp"

namespace ggames {

namespace {

constexpr double kInactive = 1e-12;   // relative component norm treated as zero
constexpr double kEigenGroup = 1e-9;  // relative tolerance for equal eigenvalues

std::shared_ptr<const LQUtility> require_lq(const InterventionProblem& p) {
  auto lq = std::dynamic_pointer_cast<const LQUtility>(p.utility);
  if (!lq) throw CapabilityError("the spectral solver needs an LQ utility, got " + p.utility->name());
  if (lq->action_set().bounded()) throw CapabilityError("the spectral solver needs an unbounded action set");
  return lq;
}

double eigen_tolerance(const Eigen::VectorXd& eig) {
  return kEigenGroup * std::max(1.0, eig.cwiseAbs().maxCoeff());
}

// Extreme component for the sign of beta and the nearest distinct eigenvalue.
struct Extreme {
  int index;
  int next;
};

Extreme extreme_component(const Eigen::VectorXd& eig, double beta) {
  if (beta == 0.0) throw PreconditionError("beta = 0: no distinguished extreme eigenvalue");
  const int n = static_cast<int>(eig.size());
  if (n < 2) throw PreconditionError("need at least two eigenvalues to compare the extreme one");
  const double tol = eigen_tolerance(eig);
  Extreme e{beta > 0 ? 0 : n - 1, -1};
  const int dir = beta > 0 ? 1 : -1;
  const int neighbour = e.index + dir;
  if (std::abs(eig[neighbour] - eig[e.index]) <= tol) {
    std::ostringstream os;
    os << "extreme eigenvalue " << eig[e.index] << " is not simple (multiplicity > 1)";
    throw PreconditionError(os.str());
  }
  e.next = neighbour;
  return e;
}

void check_nontrivial(double w, double theta_sq, double budget) {
  if (w == 0.0) throw DomainError("w = 0: every feasible intervention yields zero welfare");
  if (w < 0.0 && theta_sq <= budget)
    throw DomainError(
        "trivial intervention problem: w < 0 and (1/N)||theta||^2 <= C_B, so the planner cancels theta entirely "
        "(theta_bar = -theta)");
}

}  // namespace

void InterventionProblem::validate() const {
  if (!utility) throw ArgumentError("intervention problem needs a utility");
  if (structure.size() != theta.players()) throw ShapeError("intervention problem: structure and theta differ in N");
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw ArgumentError("budget must be a nonnegative real");
  if (const auto* lq = dynamic_cast<const LQUtility*>(utility.get());
      lq && lq->regime() == Regime::network && lq->players() != structure.size())
    throw ShapeError("network LQ utility was built for a different N");
}

Eigen::VectorXd amplification_factors(const Eigen::VectorXd& eigenvalues, double beta, double n) {
  if (!(n > 0)) throw ArgumentError("amplification_factors: n must be positive");
  Eigen::VectorXd alpha(eigenvalues.size());
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    const double d = 1.0 - beta * eigenvalues[k] / n;
    if (!(d > 0.0)) {
      std::ostringstream os;
      os << "spectral condition fails: 1 - beta lambda_k / N = " << d << " for lambda_k = " << eigenvalues[k];
      throw PreconditionError(os.str());
    }
    alpha[k] = 1.0 / (d * d);
  }
  return alpha;
}

ComponentProjection project_components(const SpectralDecomposition& spec, const Profile& p) {
  if (spec.eigenvectors.rows() != p.players()) throw ShapeError("project_components: dimensions differ");
  ComponentProjection c;
  c.components = spec.eigenvectors.transpose() * p.data();
  c.norms_squared = c.components.array().square().matrix() * p.space()->slice_weights();
  return c;
}

MuSolution solve_mu_detailed(const Eigen::VectorXd& alpha, double w, const Eigen::VectorXd& norms_sq, double budget,
                             double n, const std::vector<bool>& active_in) {
  const Eigen::Index k = alpha.size();
  if (norms_sq.size() != k) throw ShapeError("solve_mu: alpha and component norms differ in length");
  if (!(budget > 0.0) || !std::isfinite(budget)) throw ArgumentError("solve_mu: budget must be positive");
  if (!(n > 0.0)) throw ArgumentError("solve_mu: N must be positive");
  std::vector<bool> active = active_in;
  if (active.empty()) {
    active.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) active[j] = norms_sq[j] > 0.0;
  }
  if (static_cast<Eigen::Index>(active.size()) != k) throw ShapeError("solve_mu: active mask has wrong length");
  double total = 0.0, mu_min = -INFINITY;
  for (Eigen::Index j = 0; j < k; ++j)
    if (active[j]) {
      total += norms_sq[j];
      mu_min = std::max(mu_min, w * alpha[j]);
    }
  if (total <= 0.0) throw DomainError("solve_mu: theta has no nonzero principal component");
  check_nontrivial(w, total / n, budget);

  // Parametrize mu = mu_min + s with s > 0 so the denominators
  // s + (mu_min - w alpha_k) never suffer cancellation.
  Eigen::VectorXd gap(k);
  for (Eigen::Index j = 0; j < k; ++j) gap[j] = mu_min - w * alpha[j];
  const auto spent = [&](double s) {
    double b = 0.0;
    for (Eigen::Index j = 0; j < k; ++j)
      if (active[j]) {
        const double f = w * alpha[j] / (s + gap[j]);
        b += f * f * norms_sq[j];
      }
    return b / n;
  };

  double lo = 0.0, hi = std::abs(mu_min) * 1e-6 + 1.0;
  int it = 0;
  while (spent(hi) > budget) {
    lo = hi;
    hi *= 2.0;
    if (++it > 2000 || !std::isfinite(hi)) throw NumericError("solve_mu: could not bracket the shadow price", hi);
  }
  double s = hi, residual = std::abs(spent(s) - budget) / budget;
  for (int bis = 0; bis < 400 && residual > 1e-14; ++bis, ++it) {
    s = (lo == 0.0) ? 0.5 * hi : (hi > 4.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi));
    const double b = spent(s);
    residual = std::abs(b - budget) / budget;
    (b > budget ? lo : hi) = s;
    if (lo > 0.0 && hi - lo <= 1e-15 * hi) break;
  }
  if (residual > 1e-10) throw NumericError("solve_mu: budget equation not solved to 1e-10", residual);
  return {mu_min + s, s, it, residual};
}

double solve_mu(const Eigen::VectorXd& alpha, double w, const Eigen::VectorXd& norms_sq, double budget, double n) {
  return solve_mu_detailed(alpha, w, norms_sq, budget, n).mu;
}

SpectralInterventionSolution solve_spectral_lq(const InterventionProblem& problem) {
  problem.validate();
  require_lq(problem);
  return solve_spectral_lq(problem, spectrum(problem.structure));
}

SpectralInterventionSolution solve_spectral_lq(const InterventionProblem& problem, const SpectralDecomposition& spec) {
  problem.validate();
  const auto lq = require_lq(problem);
  if (!(problem.budget > 0.0)) throw ArgumentError("the spectral solver needs a positive budget");
  const int n = problem.structure.size();
  if (spec.source_n != n) throw ShapeError("spectrum does not match the interaction structure");

  SpectralInterventionSolution sol{.theta_components = project_components(spec, problem.theta),
                                   .theta_bar = Profile::zeros(problem.theta.space(), n),
                                   .equilibrium = solve_nash_lq(problem.structure, lq->beta(), problem.theta)};
  sol.eigenvalues = spec.eigenvalues;
  sol.alpha = amplification_factors(spec.eigenvalues, lq->beta(), n);
  sol.welfare_weight = lq->welfare_weight();
  sol.status_quo_welfare = lq->equilibrium_welfare(sol.equilibrium.actions);
  const double w = sol.welfare_weight;

  const auto& norms = sol.theta_components.norms_squared;
  const double theta_total = norms.sum();
  const double threshold = kInactive * kInactive * std::max(1.0, theta_total);
  sol.active.resize(n);
  int inactive = 0;
  for (int k = 0; k < n; ++k) {
    sol.active[k] = norms[k] > threshold;
    inactive += !sol.active[k];
  }
  if (inactive > 0)
    sol.warnings.push_back(std::to_string(inactive) +
                           " principal component(s) of theta are numerically zero; they receive no intervention");

  const MuSolution mu = solve_mu_detailed(sol.alpha, w, norms, problem.budget, n, sol.active);
  sol.mu = mu.mu;
  sol.mu_iterations = mu.iterations;
  double mu_min = -INFINITY;
  for (int k = 0; k < n; ++k)
    if (sol.active[k]) mu_min = std::max(mu_min, w * sol.alpha[k]);

  sol.factors.resize(n);
  Eigen::MatrixXd bar_components = Eigen::MatrixXd::Zero(n, problem.theta.slices());
  for (int k = 0; k < n; ++k) {
    const double denom = mu.offset + (mu_min - w * sol.alpha[k]);
    sol.factors[k] = denom > 0.0 ? w * sol.alpha[k] / denom : NAN;
    if (sol.active[k]) bar_components.row(k) = sol.factors[k] * sol.theta_components.components.row(k);
  }
  sol.theta_bar = Profile(problem.theta.space(), spec.eigenvectors * bar_components);
  sol.equilibrium = solve_nash_lq(problem.structure, lq->beta(), problem.theta + sol.theta_bar);
  sol.welfare = lq->equilibrium_welfare(sol.equilibrium.actions);
  sol.budget_used = std::pow(profile_norm(sol.theta_bar, Normalization::normalized), 2);

  const double theta_norm = std::sqrt(theta_total);
  const Eigen::VectorXd bar_norms = bar_components.array().square().matrix() * problem.theta.space()->slice_weights();
  const double bar_norm = std::sqrt(bar_norms.sum());
  sol.similarities = bar_norms.cwiseSqrt() / bar_norm;
  sol.theta_similarities = norms.cwiseSqrt() / theta_norm;
  sol.ratios = sol.factors * (theta_norm / bar_norm);
  return sol;
}

Eigen::MatrixXd slice_similarities(const SpectralDecomposition& spec, const Profile& p) {
  const Eigen::MatrixXd comps = spec.eigenvectors.transpose() * p.data();
  Eigen::MatrixXd out(comps.rows(), comps.cols());
  for (Eigen::Index s = 0; s < comps.cols(); ++s) {
    const double nrm = p.data().col(s).norm();
    out.col(s) = nrm > 0.0 ? Eigen::VectorXd(comps.col(s) / nrm)
                           : Eigen::VectorXd::Constant(comps.rows(), NAN);
  }
  return out;
}

SimilarityReport similarity_report(const SpectralInterventionSolution& sol, double beta) {
  SimilarityReport r;
  std::vector<int> idx;
  for (int k = 0; k < static_cast<int>(sol.active.size()); ++k)
    if (sol.active[k]) idx.push_back(k);
  r.eigenvalues.resize(static_cast<Eigen::Index>(idx.size()));
  r.ratios.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    r.eigenvalues[static_cast<Eigen::Index>(j)] = sol.eigenvalues[idx[j]];
    r.ratios[static_cast<Eigen::Index>(j)] = sol.ratios[idx[j]];
  }
  r.expected = beta > 0 ? "increasing" : (beta < 0 ? "decreasing" : "constant");
  const double tol = eigen_tolerance(sol.eigenvalues);
  // Eigenvalues are descending, so "increasing in lambda" means |r| does not
  // grow along the list.
  for (Eigen::Index j = 0; j + 1 < r.ratios.size(); ++j) {
    const double a = std::abs(r.ratios[j]), b = std::abs(r.ratios[j + 1]);
    const double slack = 1e-12 * std::max(a, b);
    bool ok = true;
    if (beta > 0 && r.eigenvalues[j] - r.eigenvalues[j + 1] > tol) ok = a >= b - slack;
    else if (beta < 0 && r.eigenvalues[j] - r.eigenvalues[j + 1] > tol) ok = a <= b + slack;
    else if (beta == 0) ok = std::abs(a - b) <= slack;
    r.violations += !ok;
  }
  r.monotone = r.violations == 0;
  return r;
}

BudgetAsymptoticsReport budget_asymptotics(const InterventionProblem& problem, AsymptoticDirection direction,
                                           std::vector<double> budgets) {
  problem.validate();
  const auto lq = require_lq(problem);
  const SpectralDecomposition spec = spectrum(problem.structure);
  BudgetAsymptoticsReport rep;
  rep.direction = direction;
  if (budgets.empty())
    budgets = direction == AsymptoticDirection::small ? std::vector<double>{1e-2, 1e-4, 1e-6, 1e-8}
                                                      : std::vector<double>{1e2, 1e4, 1e6, 1e8};
  int ref = -1;
  if (direction == AsymptoticDirection::large) ref = extreme_component(spec.eigenvalues, lq->beta()).index;

  for (double cb : budgets) {
    InterventionProblem p = problem;
    p.budget = cb;
    const auto sol = solve_spectral_lq(p, spec);
    BudgetLadderEntry e{cb, 0.0, 0.0, 0.0};
    if (direction == AsymptoticDirection::small) {
      // Reference: the most amplified active component, so every alpha ratio is at most 1.
      if (ref < 0)
        for (int k = 0; k < static_cast<int>(sol.active.size()); ++k)
          if (sol.active[k] && (ref < 0 || sol.alpha[k] > sol.alpha[ref])) ref = k;
      for (int k = 0; k < static_cast<int>(sol.active.size()); ++k)
        if (sol.active[k])
          e.gap = std::max(e.gap, std::abs(sol.ratios[k] / sol.ratios[ref] - sol.alpha[k] / sol.alpha[ref]));
    } else {
      if (!sol.active[ref]) throw DomainError("theta has no component along the extreme eigenvector");
      e.similarity = sol.similarities[ref];
      e.gap = 1.0 - e.similarity;
      const Eigen::MatrixXd rho = slice_similarities(spec, sol.theta_bar);
      e.slice_min = INFINITY;
      for (Eigen::Index s = 0; s < rho.cols(); ++s)
        if (std::isfinite(rho(ref, s))) e.slice_min = std::min(e.slice_min, std::abs(rho(ref, s)));
    }
    rep.ladder.push_back(e);
  }
  rep.reference_component = ref;
  return rep;
}

double simple_intervention_threshold(const InterventionProblem& problem, double delta) {
  problem.validate();
  const auto lq = require_lq(problem);
  if (!(delta > 0.0)) throw ArgumentError("delta must be positive");
  const Eigen::VectorXd eig = eigenvalues(problem.structure);
  const Extreme e = extreme_component(eig, lq->beta());
  const Eigen::VectorXd alpha = amplification_factors(eig, lq->beta(), problem.structure.size());
  const double frac = alpha[e.next] / (alpha[e.index] - alpha[e.next]);
  const double theta_sq = std::pow(profile_norm(problem.theta, Normalization::normalized), 2);
  return 2.0 / delta * theta_sq * frac * frac;
}

SimpleInterventionReport simple_intervention(const InterventionProblem& problem, double delta) {
  problem.validate();
  const auto lq = require_lq(problem);
  if (!(lq->welfare_weight() > 0.0))
    throw PreconditionError("simple-intervention bounds need w > 0 (w~ > -1/2 in the graphon convention)");
  const int n = problem.structure.size();
  const SpectralDecomposition spec = spectrum(problem.structure);
  const Extreme e = extreme_component(spec.eigenvalues, lq->beta());
  const auto comps = project_components(spec, problem.theta);
  const double star = std::sqrt(comps.norms_squared[e.index]);
  if (!(star > kInactive * std::sqrt(std::max(1.0, comps.norms_squared.sum()))))
    throw DomainError("theta has no component along the extreme eigenvector");

  SimpleInterventionReport rep{.theta_hat = problem.theta};
  rep.component = e.index;
  const Eigen::VectorXd u = spec.eigenvectors.col(e.index);
  rep.theta_hat = Profile(problem.theta.space(),
                          (std::sqrt(n * problem.budget) / star) * u * comps.components.row(e.index));
  rep.budget_used = std::pow(profile_norm(rep.theta_hat, Normalization::normalized), 2);
  const auto simple_eq = solve_nash_lq(problem.structure, lq->beta(), problem.theta + rep.theta_hat);
  rep.welfare_simple = lq->equilibrium_welfare(simple_eq.actions);

  const auto opt = solve_spectral_lq(problem, spec);
  rep.welfare_optimal = opt.welfare;
  rep.ratio = rep.welfare_optimal / rep.welfare_simple;

  const double frac = opt.alpha[e.next] / (opt.alpha[e.index] - opt.alpha[e.next]);
  const double theta_sq = std::pow(profile_norm(problem.theta, Normalization::normalized), 2);
  rep.delta_implied = 2.0 * theta_sq * frac * frac / problem.budget;
  rep.threshold = 2.0 / delta * theta_sq * frac * frac;

  const Eigen::VectorXd f = player_norms_squared(opt.theta_bar).cwiseSqrt();
  const Eigen::VectorXd g = u.cwiseAbs();
  rep.similarity = f.dot(g) / (f.norm() * g.norm());
  return rep;
}

Profile approximate_network_intervention(const Profile& theta_bar, int n) {
  const int m = theta_bar.players();
  if (n < 1 || m < n) throw ArgumentError("approximate_network_intervention needs 1 <= N <= m");
  Eigen::MatrixXd out(n, theta_bar.slices());
  for (int i = 0; i < n; ++i) {
    // Sub-block of the m-partition containing the midpoint of block i.
    const int j = std::min(m - 1, static_cast<int>(std::floor((i + 0.5) * m / n)));
    out.row(i) = theta_bar.data().row(j);
  }
  Profile cand(theta_bar.space(), std::move(out));
  const double target = profile_norm(theta_bar, Normalization::normalized);
  const double have = profile_norm(cand, Normalization::normalized);
  if (have == 0.0) return Profile::zeros(theta_bar.space(), n);
  return (target / have) * cand;
}

}  // namespace ggames
