#include "ggames/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

#include "ggames/errors.hpp"
#include "ggames/intervention.hpp"
#include "ggames/rng.hpp"
#include "ggames/sampling.hpp"

namespace ggames {

namespace {

constexpr std::uint64_t kJobStream = 0x5a;
constexpr std::uint64_t kFieldStream = 0xf1;
constexpr int kMaxOpNormBlocks = 400;
// Distances this small are floating-point noise; a slope through them means nothing.
constexpr double kRoundOff = 1e-13;

void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) job(i);
    });
  for (auto& th : pool) th.join();
}

double median(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::uint64_t field_seed(const ExperimentConfig& cfg) {
  return rng::key(cfg.seed + cfg.theta.seed_offset, kFieldStream);
}

struct Job {
  int n;
  int rep;
};

std::vector<Job> make_jobs(const ExperimentConfig& cfg) {
  std::vector<Job> jobs;
  for (int n : cfg.ladder) {
    if (cfg.deterministic_rows || cfg.sampling == SamplingMode::deterministic) jobs.push_back({n, 0});
    if (cfg.sampling != SamplingMode::deterministic)
      for (int r = 1; r <= cfg.replications; ++r) jobs.push_back({n, r});
  }
  return jobs;
}

struct NetworkInstance {
  InteractionMatrix g;
  Profile theta;
};

NetworkInstance build_instance(const ExperimentConfig& cfg, const Graphon& w, const SpacePtr& space, int m,
                               const Job& job) {
  std::vector<double> latent = midpoints(job.n);
  InteractionMatrix g(Eigen::MatrixXd::Zero(1, 1));
  if (job.rep == 0) {
    g = coarsen(w, job.n, m);
  } else {
    const std::uint64_t seed = rng::key(cfg.seed, kJobStream, static_cast<std::uint64_t>(job.n),
                                        static_cast<std::uint64_t>(job.rep));
    SampledGraph s = cfg.sampling == SamplingMode::simple ? sample_simple(w, job.n, cfg.kappa(job.n), seed)
                                                          : sample_weighted(w, job.n, seed);
    g = std::move(s.matrix);
    if (cfg.theta_mode == ThetaMode::sampled) latent = std::move(s.latent);
  }
  if (cfg.zero_diagonal) g = g.with_zero_diagonal();
  Profile theta =
      heterogeneity_field(space, latent, cfg.theta.family, cfg.theta.params, field_seed(cfg));
  return {std::move(g), std::move(theta)};
}

std::string failure_text(const Job& job, const std::exception& e) {
  std::ostringstream os;
  os << "N=" << job.n << " rep=" << job.rep << ": " << e.what();
  return os.str();
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs every job, gathering rows and failures in job order.
ConvergenceReport collect(const ExperimentConfig& cfg, const std::vector<Job>& jobs,
                          const std::function<void(const Job&, std::vector<ReportRow>&)>& body) {
  std::vector<std::vector<ReportRow>> rows(jobs.size());
  std::vector<std::string> failures(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), cfg.threads, [&](int i) {
    try {
      body(jobs[i], rows[i]);
    } catch (const std::exception& e) {
      rows[i].push_back({jobs[i].n, jobs[i].rep, "failed", 1.0});
      failures[i] = failure_text(jobs[i], e);
    }
  });
  ConvergenceReport rep;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    rep.rows.insert(rep.rows.end(), rows[i].begin(), rows[i].end());
    if (!failures[i].empty()) rep.failures.push_back(failures[i]);
  }
  return rep;
}

}  // namespace

Graphon make_graphon(const GraphonSpec& spec) {
  if (spec.kind == "constant") return Graphon::constant(spec.p);
  if (spec.kind == "product") return Graphon::product();
  if (spec.kind == "minimum") return Graphon::minimum();
  if (spec.kind == "sbm") return Graphon::stochastic_block(spec.proportions, spec.values);
  if (spec.kind == "step") return Graphon::step(spec.values);
  throw ArgumentError("unknown graphon kind '" + spec.kind + "' (constant, product, minimum, sbm, step)");
}

std::shared_ptr<UtilityModel> make_utility(const UtilitySpec& spec, Regime regime, int players) {
  if (spec.action_radius < 0.0) throw ArgumentError("action_radius must be nonnegative");
  const ActionSet actions = spec.action_radius > 0.0 ? ActionSet::ball(spec.action_radius) : ActionSet::unbounded();
  if (spec.kind == "lq") {
    if (regime == Regime::graphon) return std::make_shared<LQUtility>(LQUtility::graphon(spec.beta, spec.w_tilde, actions));
    return std::make_shared<LQUtility>(LQUtility::network(spec.beta, spec.w_tilde / players, players, actions));
  }
  if (spec.kind == "logcosh")
    return std::make_shared<LogCoshUtility>(spec.sensitivity, spec.beta, spec.damping, spec.heterogeneity_cost,
                                            actions);
  throw ArgumentError("unknown utility kind '" + spec.kind + "' (lq, logcosh)");
}

SpacePtr make_space(const ThetaSpec& spec) { return make_space(spec.horizon, spec.steps, spec.scenarios); }

SamplingMode parse_sampling_mode(const std::string& name) {
  if (name == "weighted" || name == "P1") return SamplingMode::weighted;
  if (name == "simple" || name == "P2") return SamplingMode::simple;
  if (name == "deterministic") return SamplingMode::deterministic;
  throw ArgumentError("unknown sampling mode '" + name + "' (weighted, simple, deterministic)");
}

std::string to_string(SamplingMode mode) {
  switch (mode) {
    case SamplingMode::weighted: return "weighted";
    case SamplingMode::simple: return "simple";
    case SamplingMode::deterministic: return "deterministic";
  }
  return "";
}

ThetaMode parse_theta_mode(const std::string& name) {
  if (name == "sampled") return ThetaMode::sampled;
  if (name == "midpoint") return ThetaMode::midpoint;
  throw ArgumentError("unknown theta mode '" + name + "' (sampled, midpoint)");
}

std::string to_string(ThetaMode mode) { return mode == ThetaMode::sampled ? "sampled" : "midpoint"; }

int ExperimentConfig::reference_resolution() const {
  return resolution > 0 ? resolution : 4 * (ladder.empty() ? 1 : ladder.back());
}

int ExperimentConfig::reference_intervention_resolution() const {
  return intervention_resolution > 0 ? intervention_resolution : (ladder.empty() ? 1 : ladder.back());
}

double ExperimentConfig::kappa(int n) const { return std::min(1.0, kappa0 * std::pow(n, -kappa_gamma)); }

void ExperimentConfig::validate() const {
  if (ladder.empty()) throw ArgumentError("experiment ladder is empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 1) throw ArgumentError("ladder sizes must be positive");
    if (i > 0 && ladder[i] <= ladder[i - 1]) throw ArgumentError("ladder must be strictly increasing");
  }
  if (replications < 1) throw ArgumentError("replications must be >= 1");
  const int m = reference_resolution();
  if (m < ladder.back()) throw ArgumentError("resolution m must be >= max N");
  for (int n : ladder)
    if (m % n != 0)
      throw ArgumentError("resolution m = " + std::to_string(m) + " must be a multiple of every ladder size (N = " +
                          std::to_string(n) + ")");
  if (reference_intervention_resolution() < ladder.back())
    throw ArgumentError("intervention resolution must be >= max N");
  if (!(kappa0 > 0.0) || kappa_gamma < 0.0) throw ArgumentError("kappa schedule needs kappa0 > 0 and gamma >= 0");
  if (!(budget >= 0.0)) throw ArgumentError("budget must be nonnegative");
  if (lipschitz.has_value() != lipschitz_blocks.has_value())
    throw ArgumentError("sampling bounds need both Lipschitz constants L and K");
  ggames::validate(theta.params, theta.family);
}

std::vector<double> ConvergenceReport::values(const std::string& metric, int n, bool sampled) const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.n == n && r.metric == metric && (sampled ? r.rep >= 1 : r.rep == 0)) out.push_back(r.value);
  return out;
}

std::vector<double> ConvergenceReport::medians(const std::string& metric, const std::vector<int>& ladder,
                                               bool sampled) const {
  std::vector<double> out;
  for (int n : ladder) out.push_back(median(values(metric, n, sampled)));
  return out;
}

ConvergenceReport run_equilibrium_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Graphon w = make_graphon(cfg.graphon);
  const SpacePtr space = make_space(cfg.theta);
  const int m = cfg.reference_resolution();

  const auto u_ref = make_utility(cfg.utility, Regime::graphon, m);
  const InteractionMatrix g_ref = discretize(w, m);
  const Profile theta_ref = heterogeneity_field(space, midpoints(m), cfg.theta.family, cfg.theta.params, field_seed(cfg));
  const double lambda1 = power_norm(g_ref.effective()) / m;
  const auto k = u_ref->constants();
  const double denom = k.alpha - k.ell_U * lambda1;
  if (!(denom > 0.0)) {
    std::ostringstream os;
    os << "reference graphon violates the contraction condition: ell_U lambda_1 = " << k.ell_U * lambda1
       << " >= alpha_U = " << k.alpha << " (lambda_1 = " << lambda1 << ")";
    throw PreconditionError(os.str());
  }
  const NashSolution ref = solve_nash(*u_ref, g_ref, theta_ref, cfg.nash);
  const double c_theta = k.ell_theta / denom;
  const double c_w_per_m = std::sqrt(8.0) * k.ell_U / denom;
  const StepKernel ref_kernel = merge_equal_blocks(StepKernel::uniform(g_ref.effective()));

  const auto jobs = make_jobs(cfg);
  ConvergenceReport rep = collect(cfg, jobs, [&](const Job& job, std::vector<ReportRow>& out) {
    const NetworkInstance inst = build_instance(cfg, w, space, m, job);
    const auto u = make_utility(cfg.utility, Regime::network, job.n);
    const double lam_n = power_norm(inst.g.effective()) / job.n;
    const double q = k.ell_U * lam_n / k.alpha;
    const NashSolution sol = solve_nash(*u, inst.g, inst.theta, cfg.nash);
    const double distance = profile_distance(step_embed(sol.actions, m), ref.actions);
    const double theta_distance = profile_distance(step_embed(inst.theta, m), theta_ref);
    const double action_bound = u->action_set().bounded() ? u->action_set().radius()
                                                          : profile_norm(sol.actions, Normalization::normalized);
    const auto add = [&](const char* metric, double v) { out.push_back({job.n, job.rep, metric, v}); };
    add("distance", distance);
    add("theta_distance", theta_distance);
    add("lambda1", lam_n);
    add("contraction_factor", q);
    add("action_norm", action_bound);
    const double c_w = c_w_per_m * action_bound;

    if (job.rep == 0) {
      const StepKernel diff =
          merge_equal_blocks(kernel_difference(ref_kernel, StepKernel::uniform(inst.g.effective())));
      if (diff.blocks() <= kMaxExactBlocks || cfg.cut_mode == CutNormMode::exact) {
        const double cut = cut_norm(diff, CutNormMode::exact).value;
        add("cut_norm", cut);
        add("bound_cut", c_w * std::sqrt(cut) + c_theta * theta_distance);
      }
      if (diff.blocks() <= kMaxOpNormBlocks) {
        const double op = step_kernel_op_norm(diff);
        add("op_norm", op);
        add("bound_op", c_w / std::sqrt(8.0) * op + c_theta * theta_distance);
      }
    } else if (cfg.lipschitz) {
      try {
        const auto sb = sampling_bound(job.n, cfg.delta, *cfg.lipschitz, *cfg.lipschitz_blocks, cfg.kappa(job.n));
        add("rho", sb.rho);
        add("rho_prime", sb.rho_prime);
        const double r = cfg.sampling == SamplingMode::simple ? sb.rho_prime : sb.rho;
        add("bound_sampling", c_w / std::sqrt(8.0) * r + c_theta * theta_distance);
      } catch (const ArgumentError&) {
        // delta outside the admissible window at this N: no diagnostic bound.
      }
    }
  });
  rep.resolution = m;
  rep.lambda1 = lambda1;
  rep.wall_seconds = elapsed(t0);
  return rep;
}

ConvergenceReport run_intervention_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.utility.kind != "lq" || cfg.utility.action_radius > 0.0)
    throw CapabilityError("intervention convergence needs an LQ utility with unbounded actions");
  if (!(cfg.budget > 0.0)) throw ArgumentError("intervention convergence needs a positive budget");
  const Graphon w = make_graphon(cfg.graphon);
  const SpacePtr space = make_space(cfg.theta);
  const int m = cfg.reference_resolution();
  const int mi = cfg.reference_intervention_resolution();

  const InteractionMatrix g_ref = discretize(w, mi);
  const Profile theta_ref = heterogeneity_field(space, midpoints(mi), cfg.theta.family, cfg.theta.params, field_seed(cfg));
  const InterventionProblem ref_problem{make_utility(cfg.utility, Regime::graphon, mi), g_ref, theta_ref, cfg.budget};
  const auto ref = solve_spectral_lq(ref_problem);

  const auto jobs = make_jobs(cfg);
  ConvergenceReport rep = collect(cfg, jobs, [&](const Job& job, std::vector<ReportRow>& out) {
    // Coarsening in deterministic rows uses the equilibrium resolution m.
    const NetworkInstance inst = build_instance(cfg, w, space, m, job);
    const auto u = std::dynamic_pointer_cast<LQUtility>(make_utility(cfg.utility, Regime::network, job.n));
    const auto opt = solve_spectral_lq({u, inst.g, inst.theta, cfg.budget});
    const Profile candidate = approximate_network_intervention(ref.theta_bar, job.n);
    const auto eq = solve_nash_lq(inst.g, u->beta(), inst.theta + candidate);
    const double t_approx = u->equilibrium_welfare(eq.actions);
    const auto add = [&](const char* metric, double v) { out.push_back({job.n, job.rep, metric, v}); };
    add("t_opt", opt.welfare);
    add("t_approx", t_approx);
    add("gap", opt.welfare - t_approx);
    add("budget_used", std::pow(profile_norm(candidate, Normalization::normalized), 2));
  });
  rep.resolution = mi;
  rep.lambda1 = ref.eigenvalues.cwiseAbs().maxCoeff() / mi;
  rep.wall_seconds = elapsed(t0);
  return rep;
}

RateEstimate estimate_rate(const std::vector<int>& ladder, const std::vector<double>& values) {
  RateEstimate est;
  if (ladder.size() != values.size()) throw ShapeError("estimate_rate: ladder and values differ in length");
  std::vector<double> x, y;
  bool degenerate = false;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    if (!(values[i] > kRoundOff) || ladder[i] < 1) {
      degenerate = true;
      continue;
    }
    x.push_back(std::log(static_cast<double>(ladder[i])));
    y.push_back(std::log(values[i]));
  }
  est.points = static_cast<int>(x.size());
  if (degenerate) {
    est.flag = "slope undefined: values at or below round-off level";
    return est;
  }
  if (est.points < 4) {
    est.flag = "slope undefined: fewer than 4 valid ladder points";
    return est;
  }
  const double n = est.points;
  double mx = 0, my = 0;
  for (int i = 0; i < est.points; ++i) mx += x[i] / n, my += y[i] / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < est.points; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  const double ss_res = syy - est.slope * sxy;
  est.r_squared = syy > 0 ? 1.0 - std::max(0.0, ss_res) / syy : 1.0;
  est.valid = true;
  return est;
}

RateEstimate estimate_rate(const ConvergenceReport& report, const std::vector<int>& ladder, const std::string& metric) {
  bool any_sampled = false;
  for (const auto& r : report.rows) any_sampled = any_sampled || r.rep >= 1;
  return estimate_rate(ladder, report.medians(metric, ladder, any_sampled));
}

}  // namespace ggames
