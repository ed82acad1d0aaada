#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ggames/cut_norm.hpp"
#include "ggames/heterogeneity.hpp"
#include "ggames/nash.hpp"
#include "ggames/utility.hpp"

namespace ggames {

struct GraphonSpec {
  std::string kind = "product";     // constant, product, minimum, sbm, step
  double p = 0.5;                   // constant
  std::vector<double> proportions;  // sbm block sizes
  Eigen::MatrixXd values;           // sbm probabilities or step block values
};
Graphon make_graphon(const GraphonSpec& spec);

struct UtilitySpec {
  std::string kind = "lq";  // lq, logcosh
  double beta = 0.5;
  // LQ: externality coefficient in the graphon convention (w~); network games
  // of size N use w~ / N so both describe the same utility.
  double w_tilde = 0.0;
  double action_radius = 0.0;  // 0 means unbounded
  double sensitivity = 1.0;    // log-cosh s
  double damping = 0.0;        // log-cosh eps
  double heterogeneity_cost = 0.0;  // log-cosh c
};
std::shared_ptr<UtilityModel> make_utility(const UtilitySpec& spec, Regime regime, int players);

struct ThetaSpec {
  HeterogeneityFamily family = HeterogeneityFamily::sinusoid;
  HeterogeneityParams params{};
  double horizon = 1.0;
  int steps = 4;
  int scenarios = 2;
  std::uint64_t seed_offset = 0;  // added to the run seed for the field draw
};
SpacePtr make_space(const ThetaSpec& spec);

enum class SamplingMode { weighted, simple, deterministic };
SamplingMode parse_sampling_mode(const std::string& name);
std::string to_string(SamplingMode mode);

// sampled: theta^N_i is the field at the sampled latent point x_i;
// midpoint: the field at the midpoint of block i.
enum class ThetaMode { sampled, midpoint };
ThetaMode parse_theta_mode(const std::string& name);
std::string to_string(ThetaMode mode);

struct ExperimentConfig {
  GraphonSpec graphon{};
  UtilitySpec utility{};
  ThetaSpec theta{};
  std::vector<int> ladder{50, 100, 200, 400, 800};
  int replications = 10;
  SamplingMode sampling = SamplingMode::weighted;
  ThetaMode theta_mode = ThetaMode::sampled;
  bool deterministic_rows = true;  // also run the coarsening sequence (reported as rep 0)
  double kappa0 = 1.0;             // kappa_N = min(1, kappa0 N^-gamma)
  double kappa_gamma = 0.0;
  bool zero_diagonal = false;
  std::uint64_t seed = 1;
  int resolution = 0;               // reference resolution m; 0 means 4 * max N
  int intervention_resolution = 0;  // 0 means max N
  double budget = 1.0;
  // Diagnostic sampling bounds: need blockwise Lipschitz constants.
  std::optional<double> lipschitz;
  std::optional<double> lipschitz_blocks;
  double delta = 0.05;
  CutNormMode cut_mode = CutNormMode::automatic;
  int threads = 0;  // 0 means hardware concurrency
  NashOptions nash{};

  int reference_resolution() const;
  int reference_intervention_resolution() const;
  double kappa(int n) const;
  void validate() const;
};

// Long-format record: rep 0 is the deterministic coarsening sequence, reps
// 1..R the sampled replications.
struct ReportRow {
  int n = 0;
  int rep = 0;
  std::string metric;
  double value = 0.0;
};

struct ConvergenceReport {
  std::vector<ReportRow> rows;
  std::vector<std::string> failures;  // "N=.. rep=..: message"
  int resolution = 0;
  double lambda1 = 0.0;  // of the reference graphon
  double wall_seconds = 0.0;

  // Values of `metric` at size n over the chosen reps (sampled: rep >= 1).
  std::vector<double> values(const std::string& metric, int n, bool sampled = true) const;
  // Median over sampled reps at every ladder size, NaN when none.
  std::vector<double> medians(const std::string& metric, const std::vector<int>& ladder, bool sampled = true) const;
};

ConvergenceReport run_equilibrium_convergence(const ExperimentConfig& cfg);
ConvergenceReport run_intervention_convergence(const ExperimentConfig& cfg);

struct RateEstimate {
  bool valid = false;
  std::string flag;  // reason when not valid
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};
// OLS of log(value) on log(N); needs at least four finite points above
// round-off (1e-13).
RateEstimate estimate_rate(const std::vector<int>& ladder, const std::vector<double>& values);
RateEstimate estimate_rate(const ConvergenceReport& report, const std::vector<int>& ladder,
                           const std::string& metric = "distance");

}  // namespace ggames
