#include "ggames/utility.hpp"

#include <cmath>

#include "ggames/errors.hpp"

namespace ggames {

namespace {

// E int f(a, z, theta) dt for a pointwise running utility.
template <typename F>
double integrate(const Process& a, const Process& z, const Process& theta, F f) {
  require_same_space(a.space(), z.space(), "utility");
  require_same_space(a.space(), theta.space(), "utility");
  const auto& p = a.space()->scenarios().probabilities();
  const auto& w = a.space()->grid().weights();
  double total = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) {
    double row = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) row += w[t] * f(a(s, t), z(s, t), theta(s, t));
    total += p[s] * row;
  }
  return total;
}

// log cosh without overflow.
double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

}  // namespace

ActionSet ActionSet::ball(double radius) {
  if (!(radius > 0.0)) throw ArgumentError("action ball radius must be positive");
  return ActionSet(radius);
}

Process ActionSet::project(const Process& a) const {
  if (!bounded()) return a;
  const double n = norm_A(a);
  return n <= radius_ ? a : (radius_ / n) * a;
}

std::optional<Process> UtilityModel::closed_form_best_response(const Process&, const Process&) const {
  return std::nullopt;
}

Process UtilityModel::grad_heterogeneity(const Process&, const Process&, const Process&) const {
  throw CapabilityError(name() + " utility has no planner extension");
}

PlannerConstants UtilityModel::planner_constants() const {
  throw CapabilityError(name() + " utility has no planner extension");
}

// ---- LQ ----

LQUtility LQUtility::network(double beta, double w_tilde, int players, ActionSet actions) {
  if (players < 1) throw ArgumentError("network LQ utility needs N >= 1");
  return LQUtility(beta, players * w_tilde, Regime::network, players, actions);
}

LQUtility LQUtility::graphon(double beta, double w_tilde, ActionSet actions) {
  return LQUtility(beta, w_tilde, Regime::graphon, 0, actions);
}

LQUtility::LQUtility(double beta, double externality, Regime regime, int players, ActionSet actions)
    : UtilityModel(actions), beta_(beta), externality_(externality), regime_(regime), players_(players) {
  if (!std::isfinite(beta_) || !std::isfinite(externality_)) throw ArgumentError("LQ parameters must be finite");
  if (regime_ == Regime::network && players_ < 1) throw ArgumentError("network LQ utility needs N >= 1");
}

double LQUtility::value(const Process& a, const Process& z, const Process& theta) const {
  const double b = beta_, c = externality_;
  return integrate(a, z, theta, [b, c](double av, double zv, double tv) {
    const double m = tv + b * zv;
    return av * m - 0.5 * av * av + c * m * m;
  });
}

Process LQUtility::grad_action(const Process& a, const Process& z, const Process& theta) const {
  return Process(a.space(), theta.values() + beta_ * z.values() - a.values());
}

UtilityConstants LQUtility::constants() const { return {1.0, std::abs(beta_), 1.0, 1.0}; }

std::optional<Process> LQUtility::closed_form_best_response(const Process& z, const Process& theta) const {
  // The maximizer of <a, m> - ||a||^2/2 over a ball is the projection of m.
  return action_set().project(Process(theta.space(), theta.values() + beta_ * z.values()));
}

Process LQUtility::grad_heterogeneity(const Process& a, const Process& z, const Process& theta) const {
  if (!has_planner()) return UtilityModel::grad_heterogeneity(a, z, theta);
  return Process(a.space(), a.values() + 2.0 * externality_ * (theta.values() + beta_ * z.values()));
}

PlannerConstants LQUtility::planner_constants() const {
  if (!has_planner())
    throw CapabilityError("LQ utility is concave in theta only when the externality coefficient is negative");
  const double c = std::abs(externality_);
  PlannerConstants pc{2.0 * c, 1.0, 2.0 * c * std::abs(beta_), 2.0 * c, std::nullopt};
  if (action_set().bounded()) {
    // |grad_theta U| <= M + 2|c|(M' + |beta| M) <= l0 (1 + M').
    const double m = action_set().radius();
    pc.ell_0 = std::max(m * (1.0 + 2.0 * c * std::abs(beta_)), 2.0 * c);
  }
  return pc;
}

double LQUtility::w_tilde() const noexcept {
  return regime_ == Regime::network ? externality_ / players_ : externality_;
}

double LQUtility::welfare_weight() const noexcept {
  return regime_ == Regime::network ? (externality_ + 0.5) / players_ : externality_ + 0.5;
}

double LQUtility::equilibrium_welfare(const Profile& actions) const {
  return normalized_welfare_weight() * std::pow(profile_norm(actions, Normalization::normalized), 2);
}

// ---- log cosh ----

LogCoshUtility::LogCoshUtility(double sensitivity, double beta, double damping, double heterogeneity_cost,
                               ActionSet actions)
    : UtilityModel(actions), s_(sensitivity), beta_(beta), eps_(damping), c_(heterogeneity_cost) {
  if (!(eps_ >= 0.0)) throw ArgumentError("log-cosh damping must be nonnegative");
  if (!std::isfinite(s_) || !std::isfinite(beta_) || !std::isfinite(c_))
    throw ArgumentError("log-cosh parameters must be finite");
}

double LogCoshUtility::value(const Process& a, const Process& z, const Process& theta) const {
  return integrate(a, z, theta, [this](double av, double zv, double tv) {
    return av * (s_ * tv + beta_ * zv) - 0.5 * av * av - eps_ * log_cosh(av) + c_ * tv * tv;
  });
}

Process LogCoshUtility::grad_action(const Process& a, const Process& z, const Process& theta) const {
  Eigen::MatrixXd g = s_ * theta.values() + beta_ * z.values() - a.values();
  g -= eps_ * a.values().array().tanh().matrix();
  return Process(a.space(), std::move(g));
}

UtilityConstants LogCoshUtility::constants() const { return {1.0, std::abs(beta_), std::abs(s_), 1.0 + eps_}; }

Process LogCoshUtility::grad_heterogeneity(const Process& a, const Process& z, const Process& theta) const {
  if (!has_planner()) return UtilityModel::grad_heterogeneity(a, z, theta);
  return Process(a.space(), s_ * a.values() + 2.0 * c_ * theta.values());
}

PlannerConstants LogCoshUtility::planner_constants() const {
  if (!has_planner()) return UtilityModel::planner_constants();
  PlannerConstants pc{-2.0 * c_, std::abs(s_), 0.0, -2.0 * c_, std::nullopt};
  if (action_set().bounded()) pc.ell_0 = std::max(std::abs(s_) * action_set().radius(), -2.0 * c_);
  return pc;
}

}  // namespace ggames
