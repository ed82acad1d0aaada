#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

namespace ggames {

// Quadrature grid on [0, T]. Weights are stored explicitly so that the
// inner product stays an exact bilinear form under any rule.
class TimeGrid {
 public:
  // Left-endpoint rule: n_t steps of width T / n_t.
  static TimeGrid uniform(double horizon, int steps);
  // Trapezoid rule on n_t equally spaced nodes including both endpoints.
  static TimeGrid trapezoid(double horizon, int nodes);

  TimeGrid(double horizon, std::vector<double> weights, std::vector<double> times);

  double horizon() const noexcept { return horizon_; }
  int steps() const noexcept { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& times() const noexcept { return times_; }

  bool operator==(const TimeGrid&) const = default;

 private:
  double horizon_;
  std::vector<double> weights_;
  std::vector<double> times_;
};

// Finite stand-in for the probability space.
class ScenarioSet {
 public:
  static ScenarioSet uniform(int count);
  explicit ScenarioSet(std::vector<double> probabilities);

  int size() const noexcept { return static_cast<int>(probabilities_.size()); }
  const std::vector<double>& probabilities() const noexcept { return probabilities_; }

  bool operator==(const ScenarioSet&) const = default;

 private:
  std::vector<double> probabilities_;
};

// Scenario x time product space. A slice is one (scenario, time) cell,
// indexed s = omega * n_t + t, with quadrature weight p_omega * w_t.
class Space {
 public:
  Space(TimeGrid grid, ScenarioSet scenarios);

  const TimeGrid& grid() const noexcept { return grid_; }
  const ScenarioSet& scenarios() const noexcept { return scenarios_; }
  int slices() const noexcept { return static_cast<int>(slice_weights_.size()); }
  int slice(int scenario, int step) const noexcept { return scenario * grid_.steps() + step; }
  const Eigen::VectorXd& slice_weights() const noexcept { return slice_weights_; }

  bool operator==(const Space& o) const { return grid_ == o.grid_ && scenarios_ == o.scenarios_; }

 private:
  TimeGrid grid_;
  ScenarioSet scenarios_;
  Eigen::VectorXd slice_weights_;
};

using SpacePtr = std::shared_ptr<const Space>;

SpacePtr make_space(TimeGrid grid, ScenarioSet scenarios);
// Convenience: uniform grid with n_t steps and n_omega equally likely scenarios.
SpacePtr make_space(double horizon, int steps, int scenarios);

// One discretized process: n_omega x n_t values.
class Process {
 public:
  Process(SpacePtr space, Eigen::MatrixXd values);
  static Process constant(SpacePtr space, double c);

  const SpacePtr& space() const noexcept { return space_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  double operator()(int scenario, int step) const { return values_(scenario, step); }

  // Flattened slice vector in the Space slice order.
  Eigen::VectorXd flat() const;
  static Process from_flat(SpacePtr space, const Eigen::Ref<const Eigen::VectorXd>& flat);

 private:
  SpacePtr space_;
  Eigen::MatrixXd values_;
};

Process operator+(const Process& a, const Process& b);
Process operator-(const Process& a, const Process& b);
Process operator*(double c, const Process& a);

double inner_product(const Process& a, const Process& b);
double norm_A(const Process& a);

// N players on a shared space. Stored as an N x S matrix: row i is player i,
// column s is a slice. All solvers operate on this matrix directly.
class Profile {
 public:
  Profile(SpacePtr space, Eigen::MatrixXd data);
  Profile(const std::vector<Process>& processes);
  static Profile zeros(SpacePtr space, int players);
  static Profile constant(SpacePtr space, int players, double c);

  const SpacePtr& space() const noexcept { return space_; }
  int players() const noexcept { return static_cast<int>(data_.rows()); }
  int slices() const noexcept { return static_cast<int>(data_.cols()); }
  const Eigen::MatrixXd& data() const noexcept { return data_; }

  Process process(int player) const;

 private:
  SpacePtr space_;
  Eigen::MatrixXd data_;
};

Profile operator+(const Profile& a, const Profile& b);
Profile operator-(const Profile& a, const Profile& b);
Profile operator*(double c, const Profile& a);

enum class Normalization { normalized, unnormalized };

// Per-player squared A-norms.
Eigen::VectorXd player_norms_squared(const Profile& a);
double profile_norm(const Profile& a, Normalization mode);
double profile_inner(const Profile& a, const Profile& b, Normalization mode);
// Normalized distance sqrt((1/N) sum_i ||a^i - b^i||^2).
double profile_distance(const Profile& a, const Profile& b);

// Piecewise-constant refinement onto m = k * N players.
Profile step_embed(const Profile& a, int m);

// Throws ShapeError unless both live on the same space.
void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* where);

}  // namespace ggames
