#include "ggames/stochastic.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ggames/errors.hpp"

namespace ggames {

namespace {

double kahan_sum(const std::vector<double>& v) {
  double sum = 0.0, c = 0.0;
  for (double x : v) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

TimeGrid TimeGrid::uniform(double horizon, int steps) {
  if (!(horizon > 0.0) || steps < 1) throw ArgumentError("time grid needs T > 0 and n_t >= 1");
  const double h = horizon / steps;
  std::vector<double> w(steps, h), t(steps);
  for (int k = 0; k < steps; ++k) t[k] = k * h;
  return TimeGrid(horizon, std::move(w), std::move(t));
}

TimeGrid TimeGrid::trapezoid(double horizon, int nodes) {
  if (!(horizon > 0.0) || nodes < 2) throw ArgumentError("trapezoid grid needs T > 0 and at least 2 nodes");
  const double h = horizon / (nodes - 1);
  std::vector<double> w(nodes, h), t(nodes);
  w.front() = w.back() = 0.5 * h;
  for (int k = 0; k < nodes; ++k) t[k] = k * h;
  return TimeGrid(horizon, std::move(w), std::move(t));
}

TimeGrid::TimeGrid(double horizon, std::vector<double> weights, std::vector<double> times)
    : horizon_(horizon), weights_(std::move(weights)), times_(std::move(times)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw ArgumentError("horizon must be positive and finite");
  if (weights_.empty()) throw ArgumentError("time grid needs at least one step");
  if (times_.size() != weights_.size()) throw ShapeError("time grid: weights and times differ in length");
  for (double w : weights_)
    if (!(w > 0.0) || !std::isfinite(w)) throw ArgumentError("time weights must be positive");
  if (std::abs(kahan_sum(weights_) - horizon_) > 1e-12 * horizon_)
    throw ArgumentError("time weights must sum to the horizon");
}

ScenarioSet ScenarioSet::uniform(int count) {
  if (count < 1) throw ArgumentError("scenario set needs at least one scenario");
  return ScenarioSet(std::vector<double>(count, 1.0 / count));
}

ScenarioSet::ScenarioSet(std::vector<double> probabilities) : probabilities_(std::move(probabilities)) {
  if (probabilities_.empty()) throw ArgumentError("scenario set needs at least one scenario");
  for (double p : probabilities_)
    if (!(p >= 0.0) || !std::isfinite(p)) throw ArgumentError("scenario probabilities must be nonnegative");
  if (std::abs(kahan_sum(probabilities_) - 1.0) > 1e-12) throw ArgumentError("scenario probabilities must sum to 1");
}

Space::Space(TimeGrid grid, ScenarioSet scenarios) : grid_(std::move(grid)), scenarios_(std::move(scenarios)) {
  const int nt = grid_.steps(), nw = scenarios_.size();
  slice_weights_.resize(nt * nw);
  for (int w = 0; w < nw; ++w)
    for (int t = 0; t < nt; ++t) slice_weights_[w * nt + t] = scenarios_.probabilities()[w] * grid_.weights()[t];
}

SpacePtr make_space(TimeGrid grid, ScenarioSet scenarios) {
  return std::make_shared<const Space>(std::move(grid), std::move(scenarios));
}

SpacePtr make_space(double horizon, int steps, int scenarios) {
  return make_space(TimeGrid::uniform(horizon, steps), ScenarioSet::uniform(scenarios));
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* where) {
  if (a == b) return;
  if (!a || !b || !(*a == *b)) throw ShapeError(std::string(where) + ": operands live on different grids");
}

// ---- Process ----

Process::Process(SpacePtr space, Eigen::MatrixXd values) : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw ArgumentError("process needs a space");
  if (values_.rows() != space_->scenarios().size() || values_.cols() != space_->grid().steps())
    throw ShapeError("process values must be n_omega x n_t");
  if (!all_finite(values_)) throw ArgumentError("process values must be finite");
}

Process Process::constant(SpacePtr space, double c) {
  const auto rows = space->scenarios().size(), cols = space->grid().steps();
  return Process(std::move(space), Eigen::MatrixXd::Constant(rows, cols, c));
}

Eigen::VectorXd Process::flat() const {
  // Row-major flattening matches s = omega * n_t + t.
  Eigen::VectorXd out(values_.size());
  const int nt = static_cast<int>(values_.cols());
  for (int w = 0; w < values_.rows(); ++w)
    for (int t = 0; t < nt; ++t) out[w * nt + t] = values_(w, t);
  return out;
}

Process Process::from_flat(SpacePtr space, const Eigen::Ref<const Eigen::VectorXd>& flat) {
  const int nw = space->scenarios().size(), nt = space->grid().steps();
  if (flat.size() != nw * nt) throw ShapeError("flat process has wrong length");
  Eigen::MatrixXd v(nw, nt);
  for (int w = 0; w < nw; ++w)
    for (int t = 0; t < nt; ++t) v(w, t) = flat[w * nt + t];
  return Process(std::move(space), std::move(v));
}

Process operator+(const Process& a, const Process& b) {
  require_same_space(a.space(), b.space(), "process sum");
  return Process(a.space(), a.values() + b.values());
}

Process operator-(const Process& a, const Process& b) {
  require_same_space(a.space(), b.space(), "process difference");
  return Process(a.space(), a.values() - b.values());
}

Process operator*(double c, const Process& a) { return Process(a.space(), c * a.values()); }

double inner_product(const Process& a, const Process& b) {
  require_same_space(a.space(), b.space(), "inner_product");
  const auto& p = a.space()->scenarios().probabilities();
  const auto& w = a.space()->grid().weights();
  double total = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) {
    double row = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) row += w[t] * a.values()(s, t) * b.values()(s, t);
    total += p[s] * row;
  }
  return total;
}

double norm_A(const Process& a) { return std::sqrt(std::max(0.0, inner_product(a, a))); }

// ---- Profile ----

Profile::Profile(SpacePtr space, Eigen::MatrixXd data) : space_(std::move(space)), data_(std::move(data)) {
  if (!space_) throw ArgumentError("profile needs a space");
  if (data_.rows() < 1) throw ArgumentError("profile needs at least one player");
  if (data_.cols() != space_->slices()) throw ShapeError("profile data must have one column per slice");
  if (!all_finite(data_)) throw ArgumentError("profile values must be finite");
}

Profile::Profile(const std::vector<Process>& processes) {
  if (processes.empty()) throw ArgumentError("profile needs at least one player");
  space_ = processes.front().space();
  data_.resize(static_cast<Eigen::Index>(processes.size()), space_->slices());
  for (std::size_t i = 0; i < processes.size(); ++i) {
    require_same_space(space_, processes[i].space(), "profile construction");
    data_.row(static_cast<Eigen::Index>(i)) = processes[i].flat().transpose();
  }
}

Profile Profile::zeros(SpacePtr space, int players) { return constant(std::move(space), players, 0.0); }

Profile Profile::constant(SpacePtr space, int players, double c) {
  if (players < 1) throw ArgumentError("profile needs at least one player");
  const int s = space->slices();
  return Profile(std::move(space), Eigen::MatrixXd::Constant(players, s, c));
}

Process Profile::process(int player) const {
  if (player < 0 || player >= players()) throw ArgumentError("player index out of range");
  return Process::from_flat(space_, data_.row(player).transpose());
}

namespace {
void require_same_shape(const Profile& a, const Profile& b, const char* where) {
  require_same_space(a.space(), b.space(), where);
  if (a.players() != b.players()) throw ShapeError(std::string(where) + ": player counts differ");
}
}  // namespace

Profile operator+(const Profile& a, const Profile& b) {
  require_same_shape(a, b, "profile sum");
  return Profile(a.space(), a.data() + b.data());
}

Profile operator-(const Profile& a, const Profile& b) {
  require_same_shape(a, b, "profile difference");
  return Profile(a.space(), a.data() - b.data());
}

Profile operator*(double c, const Profile& a) { return Profile(a.space(), c * a.data()); }

Eigen::VectorXd player_norms_squared(const Profile& a) {
  return a.data().array().square().matrix() * a.space()->slice_weights();
}

double profile_norm(const Profile& a, Normalization mode) {
  return std::sqrt(std::max(0.0, profile_inner(a, a, mode)));
}

double profile_inner(const Profile& a, const Profile& b, Normalization mode) {
  require_same_shape(a, b, "profile_inner");
  const Eigen::VectorXd per_player = (a.data().array() * b.data().array()).matrix() * a.space()->slice_weights();
  const double total = per_player.sum();
  return mode == Normalization::normalized ? total / a.players() : total;
}

double profile_distance(const Profile& a, const Profile& b) {
  require_same_shape(a, b, "profile_distance");
  const Eigen::MatrixXd d = a.data() - b.data();
  const double total = (d.array().square().matrix() * a.space()->slice_weights()).sum();
  return std::sqrt(std::max(0.0, total / a.players()));
}

Profile step_embed(const Profile& a, int m) {
  const int n = a.players();
  if (m < 1 || m % n != 0) throw ArgumentError("step_embed: m must be a positive multiple of N");
  const int k = m / n;
  Eigen::MatrixXd out(m, a.slices());
  for (int i = 0; i < n; ++i) out.middleRows(i * k, k) = a.data().row(i).replicate(k, 1);
  return Profile(a.space(), std::move(out));
}

}  // namespace ggames
