#pragma once

#include <limits>
#include <optional>
#include <string>

#include "ggames/stochastic.hpp"

namespace ggames {

// Unbounded action space or the ball ||a||_A <= M.
class ActionSet {
 public:
  static ActionSet unbounded() { return ActionSet(std::numeric_limits<double>::infinity()); }
  static ActionSet ball(double radius);

  bool bounded() const noexcept { return radius_ < std::numeric_limits<double>::infinity(); }
  double radius() const noexcept { return radius_; }
  // Radial projection (nearest point in the A-norm).
  Process project(const Process& a) const;

 private:
  explicit ActionSet(double radius) : radius_(radius) {}
  double radius_;
};

struct UtilityConstants {
  double alpha = 1.0;       // strong concavity in a
  double ell_U = 0.0;       // Lipschitz constant of grad_a in z
  double ell_theta = 1.0;   // Lipschitz constant of grad_a in theta
  double smoothness = 1.0;  // Lipschitz constant of grad_a in a (step size for gradient ascent)
};

// Constants of the planner extension: U is strongly concave in theta.
struct PlannerConstants {
  double beta_U = 0.0;      // strong concavity in theta
  double ell_a = 0.0;       // Lipschitz constant of grad_theta in a
  double ell_z = 0.0;       // Lipschitz constant of grad_theta in z
  double smoothness = 0.0;  // Lipschitz constant of grad_theta in theta
  std::optional<double> ell_0;  // growth constant, when the action set is bounded
};

// Utility functional U(a, z, theta) shared by every player.
class UtilityModel {
 public:
  explicit UtilityModel(ActionSet actions) : actions_(actions) {}
  virtual ~UtilityModel() = default;

  virtual std::string name() const = 0;
  virtual double value(const Process& a, const Process& z, const Process& theta) const = 0;
  virtual Process grad_action(const Process& a, const Process& z, const Process& theta) const = 0;
  virtual UtilityConstants constants() const = 0;

  // Exact maximizer over the action set when one is available.
  virtual std::optional<Process> closed_form_best_response(const Process& z, const Process& theta) const;

  virtual bool has_planner() const { return false; }
  virtual Process grad_heterogeneity(const Process& a, const Process& z, const Process& theta) const;
  virtual PlannerConstants planner_constants() const;

  const ActionSet& action_set() const noexcept { return actions_; }

 private:
  ActionSet actions_;
};

enum class Regime { network, graphon };

// U = <a, theta + beta z> - 1/2 ||a||^2 + c ||theta + beta z||^2.
// The externality term depends on (z, theta) only. At equilibrium
// a = theta + beta z, so the average utility is (c + 1/2) times the
// normalized squared norm of the actions. In the network convention c = N w~
// and w = w~ + 1/(2N); in the graphon convention c = w~ and w = w~ + 1/2.
class LQUtility final : public UtilityModel {
 public:
  static LQUtility network(double beta, double w_tilde, int players, ActionSet actions = ActionSet::unbounded());
  static LQUtility graphon(double beta, double w_tilde, ActionSet actions = ActionSet::unbounded());

  LQUtility(double beta, double externality, Regime regime, int players, ActionSet actions);

  std::string name() const override { return "lq"; }
  double value(const Process& a, const Process& z, const Process& theta) const override;
  Process grad_action(const Process& a, const Process& z, const Process& theta) const override;
  UtilityConstants constants() const override;
  std::optional<Process> closed_form_best_response(const Process& z, const Process& theta) const override;

  bool has_planner() const override { return externality_ < 0.0; }
  Process grad_heterogeneity(const Process& a, const Process& z, const Process& theta) const override;
  PlannerConstants planner_constants() const override;

  double beta() const noexcept { return beta_; }
  double externality() const noexcept { return externality_; }
  Regime regime() const noexcept { return regime_; }
  int players() const noexcept { return players_; }
  double w_tilde() const noexcept;
  // w of the regime's welfare identity T = w ||a||^2 (unnormalized for
  // networks, normalized for graphons).
  double welfare_weight() const noexcept;
  // Regime-independent weight c + 1/2 on the normalized squared norm.
  double normalized_welfare_weight() const noexcept { return externality_ + 0.5; }
  // Average utility at an equilibrium profile.
  double equilibrium_welfare(const Profile& actions) const;

 private:
  double beta_;
  double externality_;
  Regime regime_;
  int players_;
};

// Running utility f(a, z, theta) = a (s theta + beta z) - a^2/2 - eps log cosh(a) + c theta^2,
// integrated against the slice weights. It has no closed-form best response,
// so equilibria need projected gradient ascent. For c < 0 it carries the
// planner extension with a strongly concave dependence on theta.
class LogCoshUtility final : public UtilityModel {
 public:
  LogCoshUtility(double sensitivity, double beta, double damping, double heterogeneity_cost,
                 ActionSet actions = ActionSet::unbounded());

  std::string name() const override { return "logcosh"; }
  double value(const Process& a, const Process& z, const Process& theta) const override;
  Process grad_action(const Process& a, const Process& z, const Process& theta) const override;
  UtilityConstants constants() const override;

  bool has_planner() const override { return c_ < 0.0; }
  Process grad_heterogeneity(const Process& a, const Process& z, const Process& theta) const override;
  PlannerConstants planner_constants() const override;

 private:
  double s_, beta_, eps_, c_;
};

}  // namespace ggames
