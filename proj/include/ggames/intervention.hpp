#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ggames/graphs.hpp"
#include "ggames/nash.hpp"
#include "ggames/utility.hpp"

namespace ggames {

// The planner perturbs theta by theta_hat with (1/N) ||theta_hat||^2 <= C_B
// to maximize average equilibrium utility. A graphon problem is posed on its
// m-point discretization (see discretize) with a graphon-regime utility.
struct InterventionProblem {
  std::shared_ptr<const UtilityModel> utility;
  InteractionMatrix structure;
  Profile theta;
  double budget = 0.0;

  void validate() const;
};

// alpha_k = (1 - beta lambda_k / n)^-2. Pass n = 1 for graphon eigenvalues.
Eigen::VectorXd amplification_factors(const Eigen::VectorXd& eigenvalues, double beta, double n);

struct ComponentProjection {
  Eigen::MatrixXd components;    // row k: theta_k = sum_i U_ik theta^i per slice
  Eigen::VectorXd norms_squared;  // ||theta_k||_A^2
};

ComponentProjection project_components(const SpectralDecomposition& spec, const Profile& p);

struct MuSolution {
  double mu = 0.0;
  double offset = 0.0;  // mu - max_k w alpha_k over active components, computed without cancellation
  int iterations = 0;
  double budget_residual = 0.0;  // |budget(mu) - C_B| / C_B
};

// Shadow price solving C_B = (1/N) sum_k (w alpha_k / (mu - w alpha_k))^2 ||theta_k||^2
// over components flagged active (all components with nonzero norm when
// `active` is empty).
MuSolution solve_mu_detailed(const Eigen::VectorXd& alpha, double w, const Eigen::VectorXd& norms_squared,
                             double budget, double n, const std::vector<bool>& active = {});
double solve_mu(const Eigen::VectorXd& alpha, double w, const Eigen::VectorXd& norms_squared, double budget,
                double n);

struct SpectralInterventionSolution {
  double mu = 0.0;              // in the utility's regime convention
  double welfare_weight = 0.0;  // w of that convention
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd alpha;
  Eigen::VectorXd factors;  // w alpha_k / (mu - w alpha_k); NaN where undefined on inactive components
  std::vector<bool> active;
  ComponentProjection theta_components;
  Profile theta_bar;
  NashSolution equilibrium;
  double welfare = 0.0;
  double status_quo_welfare = 0.0;
  double budget_used = 0.0;  // (1/N) ||theta_bar||^2
  Eigen::VectorXd similarities;        // ||theta_bar_k|| / ||theta_bar||
  Eigen::VectorXd theta_similarities;  // ||theta_k|| / ||theta||
  Eigen::VectorXd ratios;              // factor_k ||theta|| / ||theta_bar||
  int mu_iterations = 0;
  std::vector<std::string> warnings;
};

SpectralInterventionSolution solve_spectral_lq(const InterventionProblem& problem);
SpectralInterventionSolution solve_spectral_lq(const InterventionProblem& problem, const SpectralDecomposition& spec);

// Cosine similarity rho(p(s), u_k) of the players' values with eigenvector k
// in every slice s: a components x slices matrix (NaN where p(s) = 0).
Eigen::MatrixXd slice_similarities(const SpectralDecomposition& spec, const Profile& p);

struct SimilarityReport {
  Eigen::VectorXd eigenvalues;  // active components, descending
  Eigen::VectorXd ratios;       // r_k on those components
  std::string expected;         // "increasing", "decreasing" or "constant" in lambda
  int violations = 0;
  bool monotone = true;
};

SimilarityReport similarity_report(const SpectralInterventionSolution& sol, double beta);

enum class AsymptoticDirection { small, large };

struct BudgetLadderEntry {
  double budget = 0.0;
  double gap = 0.0;          // small: max |r_k/r_ref - alpha_k/alpha_ref|; large: 1 - |rho|
  double similarity = 0.0;   // large: aggregate |rho(theta_bar, e_extreme)|
  double slice_min = 0.0;    // large: smallest per-slice |rho|
};

struct BudgetAsymptoticsReport {
  AsymptoticDirection direction = AsymptoticDirection::small;
  int reference_component = 0;  // small: most amplified active component; large: extreme eigenvalue
  std::vector<BudgetLadderEntry> ladder;
};

// Solves along a geometric ladder of budgets (defaults: 1e-2..1e-8 for small,
// 1e2..1e8 for large).
BudgetAsymptoticsReport budget_asymptotics(const InterventionProblem& problem, AsymptoticDirection direction,
                                           std::vector<double> budgets = {});

struct SimpleInterventionReport {
  Profile theta_hat;
  int component = 0;         // index of the extreme eigenvalue
  double welfare_simple = 0.0;
  double welfare_optimal = 0.0;
  double ratio = 0.0;         // T_opt / T_sim
  double delta_implied = 0.0;  // delta at which C_B equals the threshold
  double threshold = 0.0;      // budget threshold for the requested delta
  double similarity = 0.0;     // rho(x -> ||theta_bar^x||_A, x -> ||c e(x)||_A)
  double budget_used = 0.0;
};

SimpleInterventionReport simple_intervention(const InterventionProblem& problem, double delta = 0.1);
// (2/delta) ||theta||^2 (alpha_2 / (alpha_1 - alpha_2))^2 for the relevant end of the spectrum.
double simple_intervention_threshold(const InterventionProblem& problem, double delta);

struct GeneralInterventionOptions {
  double tol = 1e-9;  // on the joint (theta_hat, a) successive distance
  int max_iters = 10000;
  double planner_tol = -1;  // negative means tol / 10
  int planner_max_iters = 100000;
  NashOptions nash{};
};

struct GeneralInterventionSolution {
  Profile theta_hat;
  NashSolution equilibrium;
  double welfare = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  bool budget_active = false;
  double condition = 0.0;  // left side of the planner contraction condition
  bool damped = false;
  std::vector<std::string> warnings;
};

// max((ell_a + ell_z lambda_1) / beta_U, ell_theta / (alpha_U - ell_U lambda_1)).
double planner_condition(const UtilityModel& u, double lambda1);

GeneralInterventionSolution solve_general_intervention(const InterventionProblem& problem,
                                                       const GeneralInterventionOptions& options = {});

// Network candidate from a graphon intervention on an m-partition: values at
// the midpoint of each N-block, rescaled so (1/N)||.||^2 = ||theta_bar||^2_{A^inf}.
Profile approximate_network_intervention(const Profile& theta_bar, int n);

}  // namespace ggames
