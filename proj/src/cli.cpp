#include "ggames/cli.hpp"

#include <Eigen/Core>
#include <cmath>
#include <ostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ggames/cut_norm.hpp"
#include "ggames/errors.hpp"
#include "ggames/experiments.hpp"
#include "ggames/heterogeneity.hpp"
#include "ggames/intervention.hpp"
#include "ggames/io.hpp"
#include "ggames/nash.hpp"
#include "ggames/rng.hpp"
#include "ggames/sampling.hpp"

#ifndef GGAMES_VERSION
#define GGAMES_VERSION "dev"
#endif

namespace ggames::cli {

namespace {

using Json = nlohmann::ordered_json;

// Stream ids for seeds derived from the run seed. The field stream matches
// the experiments module so a converge run and a nash run on the same
// config see the same heterogeneity.
constexpr std::uint64_t kGraphStream = 0x5e;
constexpr std::uint64_t kFieldStream = 0xf1;
constexpr std::uint64_t kIndependentStream = 0x7e;
constexpr std::uint64_t kCutStream = 0xc7;

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// ---- config readers ------------------------------------------------------

GraphonSpec read_graphon(const Config& c) {
  GraphonSpec s;
  s.kind = c.get_string("graphon.kind", s.kind);
  if (s.kind == "constant") s.p = c.get_double("graphon.p", s.p);
  if (s.kind == "sbm") s.proportions = c.get_doubles("graphon.proportions", {});
  if (s.kind == "sbm" || s.kind == "step") s.values = c.get_matrix("graphon.values");
  return s;
}

UtilitySpec read_utility(const Config& c) {
  UtilitySpec s;
  s.kind = c.get_string("utility.kind", s.kind);
  s.beta = c.get_double("utility.beta", s.beta);
  s.action_radius = c.get_double("utility.action_radius", s.action_radius);
  if (s.kind == "lq") {
    s.w_tilde = c.get_double("utility.w_tilde", s.w_tilde);
  } else {
    s.sensitivity = c.get_double("utility.sensitivity", s.sensitivity);
    s.damping = c.get_double("utility.damping", s.damping);
    s.heterogeneity_cost = c.get_double("utility.heterogeneity_cost", s.heterogeneity_cost);
  }
  return s;
}

ThetaSpec read_theta(const Config& c) {
  ThetaSpec s;
  s.family = parse_heterogeneity_family(c.get_string("theta.family", to_string(s.family)));
  auto& p = s.params;
  p.level = c.get_double("theta.level", p.level);
  if (s.family == HeterogeneityFamily::sinusoid) {
    p.amplitude = c.get_double("theta.amplitude", p.amplitude);
    p.frequency = c.get_double("theta.frequency", p.frequency);
  }
  if (s.family == HeterogeneityFamily::ar1) {
    p.phi = c.get_double("theta.phi", p.phi);
    p.sigma = c.get_double("theta.sigma", p.sigma);
  }
  s.horizon = c.get_double("theta.horizon", s.horizon);
  s.steps = c.get_int("theta.steps", s.steps);
  s.scenarios = c.get_int("theta.scenarios", s.scenarios);
  s.seed_offset = c.get_uint64("theta.seed_offset", s.seed_offset);
  validate(p, s.family);
  return s;
}

NashOptions read_nash_options(const Config& c) {
  NashOptions o;
  o.tol = c.get_double("solver.tol", o.tol);
  o.max_iters = c.get_int("solver.max_iters", o.max_iters);
  o.tol_br = c.get_double("solver.tol_br", o.tol_br);
  o.br_max_iters = c.get_int("solver.br_max_iters", o.br_max_iters);
  return o;
}

// ---- game assembly -------------------------------------------------------

struct Game {
  InteractionMatrix g{Eigen::MatrixXd::Zero(1, 1)};
  std::optional<Graphon> w;  // set for graphon games
  Regime regime = Regime::network;
  std::vector<double> latent;
  std::string structure;
};

Game read_game(const RunConfig& run) {
  const Config& c = run.config;
  Game game;
  game.structure = c.get_string("game.structure", c.has_section("matrix") ? "matrix" : "graphon");
  if (game.structure == "matrix") {
    if (c.has("matrix.file")) {
      std::istringstream in(io::read_file(c.get_path("matrix.file")));
      game.g = io::read_matrix_csv(in);
    } else {
      game.g = InteractionMatrix(c.get_matrix("matrix.values"), c.get_double("matrix.scale", 1.0));
    }
    game.latent = midpoints(game.g.size());
  } else if (game.structure == "graphon") {
    const int m = c.get_int("game.players", 64);
    if (m < 1) throw ArgumentError("game.players must be positive");
    game.w = make_graphon(read_graphon(c));
    game.g = discretize(*game.w, m);
    game.regime = Regime::graphon;
    game.latent = midpoints(m);
  } else if (game.structure == "sampled") {
    const int n = c.get_int("game.players", 64);
    if (n < 1) throw ArgumentError("game.players must be positive");
    const Graphon w = make_graphon(read_graphon(c));
    const auto mode = parse_sampling_mode(c.get_string("game.sampling", "weighted"));
    const std::uint64_t seed = rng::key(run.seed, kGraphStream);
    SampledGraph s{InteractionMatrix(Eigen::MatrixXd::Zero(1, 1)), {}};
    if (mode == SamplingMode::weighted) s = sample_weighted(w, n, seed);
    else if (mode == SamplingMode::simple) s = sample_simple(w, n, c.get_double("game.kappa", 1.0), seed);
    else throw ArgumentError("game.sampling must be weighted or simple");
    game.g = std::move(s.matrix);
    game.latent = std::move(s.latent);
  } else {
    throw ArgumentError("game.structure must be matrix, graphon or sampled, got '" + game.structure + "'");
  }
  if (c.get_bool("game.zero_diagonal", false)) game.g = game.g.with_zero_diagonal();
  return game;
}

Profile read_theta_profile(const RunConfig& run, const Game& game) {
  const Config& c = run.config;
  const ThetaSpec spec = read_theta(c);
  const SpacePtr space = make_space(spec);
  const int n = game.g.size();
  if (c.has("theta.file")) {
    std::istringstream in(io::read_file(c.get_path("theta.file")));
    Profile p = io::read_profile_csv(in, space);
    if (p.players() != n)
      throw ShapeError("theta.file has " + std::to_string(p.players()) + " players, the game has " +
                       std::to_string(n));
    return p;
  }
  const std::string source = c.get_string("theta.source", "field");
  if (source == "field")
    return heterogeneity_field(space, game.latent, spec.family, spec.params,
                               rng::key(run.seed + spec.seed_offset, kFieldStream));
  if (source == "independent")
    return make_heterogeneity(space, n, spec.family, spec.params,
                              rng::key(run.seed + spec.seed_offset, kIndependentStream));
  throw ArgumentError("theta.source must be field or independent, got '" + source + "'");
}

const LQUtility* unconstrained_lq(const UtilityModel& u) {
  const auto* lq = dynamic_cast<const LQUtility*>(&u);
  return lq && !lq->action_set().bounded() ? lq : nullptr;
}

NashSolution solve_game(const UtilityModel& u, const Game& game, const Profile& theta, const std::string& method,
                        const NashOptions& opt) {
  const LQUtility* lq = unconstrained_lq(u);
  bool closed_form = false;
  if (method == "lq") {
    if (!lq) throw CapabilityError("solver.method = lq needs an LQ utility without an action bound");
    closed_form = true;
  } else if (method == "auto") {
    closed_form = lq != nullptr;
  } else if (method != "fixed_point") {
    throw ArgumentError("solver.method must be auto, lq or fixed_point, got '" + method + "'");
  }
  if (closed_form) return game.w ? solve_nash_lq(*game.w, lq->beta(), theta) : solve_nash_lq(game.g, lq->beta(), theta);
  return game.w ? solve_nash_fixed_point(u, *game.w, theta, opt) : solve_nash_fixed_point(u, game.g, theta, opt);
}

double welfare(const UtilityModel& u, const Game& game, const Profile& a, const Profile& theta) {
  return game.w ? average_welfare(u, *game.w, a, theta) : average_welfare(u, game.g, a, theta);
}

// ---- output --------------------------------------------------------------

class Outputs {
 public:
  explicit Outputs(const RunConfig& run) : run_(run) {}

  void text(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(run_.out_dir);
    io::write_file(run_.out_dir / name, content);
    names_.push_back(name);
  }
  void json(const std::string& name, const Json& j) { text(name, j.dump(2) + "\n"); }
  void profile(const std::string& name, const Profile& p) {
    std::ostringstream os;
    io::write_profile_csv(os, p);
    text(name, os.str());
  }

  void manifest(const std::string& command) {
    Json j;
    j["command"] = command;
    j["version"] = GGAMES_VERSION;
    j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    j["seed"] = run_.seed;
    j["config_hash"] = "fnv1a64:" + io::hex64(io::fnv1a64(command + "\n" + run_.config.canonical()));
    j["outputs"] = names_;
    std::filesystem::create_directories(run_.out_dir);
    io::write_file(run_.out_dir / "manifest.json", j.dump(2) + "\n");
  }

 private:
  const RunConfig& run_;
  std::vector<std::string> names_;
};

Json nash_json(const NashSolution& s) {
  Json j;
  j["iterations"] = s.iterations;
  j["residual"] = s.residual;
  j["contraction_factor"] = s.contraction_factor;
  j["error_bound"] = s.error_bound;
  j["observed_ratio"] = s.observed_ratio;
  return j;
}

Json rate_json(const RateEstimate& r) {
  Json j;
  j["valid"] = r.valid;
  if (!r.valid) j["flag"] = r.flag;
  j["slope"] = r.slope;
  j["intercept"] = r.intercept;
  j["r_squared"] = r.r_squared;
  j["points"] = r.points;
  return j;
}

Json report_json(const ConvergenceReport& rep, const ExperimentConfig& cfg, const std::vector<std::string>& metrics,
                 const std::string& rate_metric) {
  const bool sampled = cfg.sampling != SamplingMode::deterministic;
  Json j;
  j["resolution"] = rep.resolution;
  j["lambda1"] = rep.lambda1;
  j["ladder"] = cfg.ladder;
  Json med = Json::object();
  for (const auto& m : metrics) med[m] = rep.medians(m, cfg.ladder, sampled);
  j["medians"] = med;
  j["rate"] = rate_json(estimate_rate(rep, cfg.ladder, rate_metric));
  j["rate_metric"] = rate_metric;
  j["failures"] = rep.failures;
  j["wall_seconds"] = rep.wall_seconds;
  return j;
}

void prepare(RunConfig& run) {
  run.config.reject_unknown();
  // The seed is part of the run's identity even when it came from a flag.
  run.config.set("run.seed", std::to_string(run.seed));
}

}  // namespace

// ---- commands ------------------------------------------------------------

void cmd_nash(RunConfig& run) {
  const Config& c = run.config;
  const Game game = read_game(run);
  const Profile theta = read_theta_profile(run, game);
  const auto utility = make_utility(read_utility(c), game.regime, game.g.size());
  const std::string method = c.get_string("solver.method", "auto");
  const NashOptions opt = read_nash_options(c);
  prepare(run);

  const NashSolution sol = solve_game(*utility, game, theta, method, opt);
  Outputs out(run);
  out.profile("equilibrium.csv", sol.actions);
  out.profile("theta.csv", theta);
  out.text("space.json", io::space_metadata(*theta.space()));
  Json j;
  j["command"] = "nash";
  j["structure"] = game.structure;
  j["utility"] = utility->name();
  j["players"] = theta.players();
  j["slices"] = theta.slices();
  j["lambda1"] = normalized_lambda1(game.g);
  j["solver"] = nash_json(sol);
  j["welfare"] = welfare(*utility, game, sol.actions, theta);
  j["action_norm"] = profile_norm(sol.actions, Normalization::normalized);
  out.json("summary.json", j);
  out.manifest("nash");
}

void cmd_intervene(RunConfig& run) {
  const Config& c = run.config;
  const Game game = read_game(run);
  const Profile theta = read_theta_profile(run, game);
  const auto utility = make_utility(read_utility(c), game.regime, game.g.size());
  const double budget = c.get_double("intervention.budget", 1.0);
  std::string solver = c.get_string("intervention.solver", "auto");
  const double delta = c.get_double("intervention.delta", 0.0);
  GeneralInterventionOptions gopt;
  gopt.tol = c.get_double("intervention.tol", gopt.tol);
  gopt.max_iters = c.get_int("intervention.max_iters", gopt.max_iters);
  gopt.nash = read_nash_options(c);
  prepare(run);

  if (solver == "auto") solver = unconstrained_lq(*utility) ? "spectral" : "general";
  const InterventionProblem problem{utility, game.g, theta, budget};
  Outputs out(run);
  Json j;
  j["command"] = "intervene";
  j["structure"] = game.structure;
  j["utility"] = utility->name();
  j["solver"] = solver;
  j["players"] = theta.players();
  j["budget"] = budget;
  if (solver == "spectral") {
    const auto sol = solve_spectral_lq(problem);
    const auto sim = similarity_report(sol, unconstrained_lq(*utility)->beta());
    out.profile("theta_bar.csv", sol.theta_bar);
    out.profile("equilibrium.csv", sol.equilibrium.actions);
    j["mu"] = sol.mu;
    j["welfare_weight"] = sol.welfare_weight;
    j["budget_used"] = sol.budget_used;
    j["eigenvalues"] = to_vector(sol.eigenvalues);
    j["amplification"] = to_vector(sol.alpha);
    j["factors"] = to_vector(sol.factors);
    j["similarities"] = to_vector(sol.similarities);
    j["theta_similarities"] = to_vector(sol.theta_similarities);
    j["ratios"] = to_vector(sol.ratios);
    j["ratio_order"] = {{"expected", sim.expected}, {"monotone", sim.monotone}, {"violations", sim.violations}};
    j["welfare"] = sol.welfare;
    j["status_quo_welfare"] = sol.status_quo_welfare;
    j["welfare_gain"] = sol.welfare - sol.status_quo_welfare;
    j["mu_iterations"] = sol.mu_iterations;
    j["warnings"] = sol.warnings;
    if (delta > 0.0) {
      Json s;
      try {
        const auto r = simple_intervention(problem, delta);
        s["delta"] = delta;
        s["threshold"] = r.threshold;
        s["delta_implied"] = r.delta_implied;
        s["welfare_simple"] = r.welfare_simple;
        s["ratio"] = r.ratio;
        s["similarity"] = r.similarity;
      } catch (const PreconditionError& e) {
        s["unavailable"] = e.what();
      } catch (const DomainError& e) {
        s["unavailable"] = e.what();
      }
      j["simple_intervention"] = s;
    }
  } else if (solver == "general") {
    const auto sol = solve_general_intervention(problem, gopt);
    const NashSolution base = solve_game(*utility, game, theta, "auto", gopt.nash);
    const double status_quo = welfare(*utility, game, base.actions, theta);
    out.profile("theta_bar.csv", sol.theta_hat);
    out.profile("equilibrium.csv", sol.equilibrium.actions);
    j["budget_used"] = std::pow(profile_norm(sol.theta_hat, Normalization::normalized), 2);
    j["budget_active"] = sol.budget_active;
    j["iterations"] = sol.iterations;
    j["residual"] = sol.residual;
    j["converged"] = sol.converged;
    j["condition"] = sol.condition;
    j["damped"] = sol.damped;
    j["welfare"] = sol.welfare;
    j["status_quo_welfare"] = status_quo;
    j["welfare_gain"] = sol.welfare - status_quo;
    j["warnings"] = sol.warnings;
  } else {
    throw ArgumentError("intervention.solver must be auto, spectral or general, got '" + solver + "'");
  }
  out.text("space.json", io::space_metadata(*theta.space()));
  out.json("summary.json", j);
  out.manifest("intervene");
}

void cmd_sample(RunConfig& run) {
  const Config& c = run.config;
  const Graphon w = make_graphon(read_graphon(c));
  const int n = c.get_int("sample.players", 0);
  if (n < 1) throw ArgumentError("sample.players must be a positive integer");
  const auto mode = parse_sampling_mode(c.get_string("sample.mode", "weighted"));
  const double kappa = c.get_double("sample.kappa", 1.0);
  const bool zero_diagonal = c.get_bool("sample.zero_diagonal", false);
  prepare(run);

  const std::uint64_t seed = rng::key(run.seed, kGraphStream);
  SampledGraph s{InteractionMatrix(Eigen::MatrixXd::Zero(1, 1)), {}};
  if (mode == SamplingMode::weighted) s = sample_weighted(w, n, seed);
  else if (mode == SamplingMode::simple) s = sample_simple(w, n, kappa, seed);
  else throw ArgumentError("sample.mode must be weighted or simple");
  if (zero_diagonal) s.matrix = s.matrix.with_zero_diagonal();

  Outputs out(run);
  std::ostringstream g;
  io::write_matrix_csv(g, s.matrix);
  out.text("graph.csv", g.str());
  std::ostringstream x;
  x << "player,x\n";
  for (int i = 0; i < n; ++i) x << i << ',' << io::format_number(s.latent[i]) << '\n';
  out.text("latent.csv", x.str());
  out.manifest("sample");
}

void cmd_converge(RunConfig& run) {
  const Config& c = run.config;
  ExperimentConfig cfg;
  const std::string kind = c.get_string("experiment.kind", "equilibrium");
  if (kind != "equilibrium" && kind != "intervention" && kind != "both")
    throw ArgumentError("experiment.kind must be equilibrium, intervention or both, got '" + kind + "'");
  cfg.graphon = read_graphon(c);
  cfg.utility = read_utility(c);
  cfg.theta = read_theta(c);
  cfg.ladder = c.get_ints("experiment.ladder", cfg.ladder);
  cfg.replications = c.get_int("experiment.replications", cfg.replications);
  cfg.sampling = parse_sampling_mode(c.get_string("experiment.sampling", to_string(cfg.sampling)));
  cfg.theta_mode = parse_theta_mode(c.get_string("experiment.theta_mode", to_string(cfg.theta_mode)));
  cfg.deterministic_rows = c.get_bool("experiment.deterministic_rows", cfg.deterministic_rows);
  cfg.kappa0 = c.get_double("experiment.kappa0", cfg.kappa0);
  cfg.kappa_gamma = c.get_double("experiment.kappa_gamma", cfg.kappa_gamma);
  cfg.zero_diagonal = c.get_bool("experiment.zero_diagonal", cfg.zero_diagonal);
  cfg.resolution = c.get_int("experiment.resolution", cfg.resolution);
  cfg.intervention_resolution = c.get_int("experiment.intervention_resolution", cfg.intervention_resolution);
  cfg.budget = c.get_double("experiment.budget", cfg.budget);
  cfg.lipschitz = c.get_optional_double("experiment.lipschitz");
  cfg.lipschitz_blocks = c.get_optional_double("experiment.lipschitz_blocks");
  cfg.delta = c.get_double("experiment.delta", cfg.delta);
  cfg.cut_mode = parse_cut_norm_mode(c.get_string("experiment.cut_mode", "automatic"));
  cfg.threads = c.get_int("run.threads", cfg.threads);
  cfg.nash = read_nash_options(c);
  prepare(run);
  cfg.seed = run.seed;
  cfg.validate();

  Outputs out(run);
  Json j;
  j["command"] = "converge";
  j["sampling"] = to_string(cfg.sampling);
  j["replications"] = cfg.replications;
  std::size_t failures = 0;
  if (kind != "intervention") {
    const auto rep = run_equilibrium_convergence(cfg);
    std::ostringstream os;
    io::write_report_csv(os, rep.rows);
    out.text("report.csv", os.str());
    j["equilibrium"] = report_json(rep, cfg, {"distance", "theta_distance", "cut_norm", "bound_cut", "op_norm"},
                                   "distance");
    failures += rep.failures.size();
  }
  if (kind != "equilibrium") {
    const auto rep = run_intervention_convergence(cfg);
    std::ostringstream os;
    io::write_report_csv(os, rep.rows);
    out.text("intervention_report.csv", os.str());
    j["intervention"] = report_json(rep, cfg, {"gap", "t_opt", "t_approx"}, "gap");
    failures += rep.failures.size();
  }
  out.json("summary.json", j);
  out.manifest("converge");
  if (failures > 0) run.warnings.push_back(std::to_string(failures) + " ladder rows failed; see summary.json");
}

void cmd_spectral(RunConfig& run) {
  const Config& c = run.config;
  const Game game = read_game(run);
  const bool vectors = c.get_bool("spectral.eigenvectors", false);
  const auto mode = parse_cut_norm_mode(c.get_string("spectral.cut_mode", "automatic"));
  const bool compare = c.get_bool("spectral.compare_graphon", false);
  std::optional<Graphon> reference;
  int resolution = 256;
  if (compare) {
    reference = game.w ? *game.w : make_graphon(read_graphon(c));
    resolution = c.get_int("spectral.resolution", resolution);
  }
  prepare(run);

  const SpectralDecomposition spec = spectrum(game.g);
  const int n = game.g.size();
  Outputs out(run);
  std::ostringstream os;
  os << "index,eigenvalue,normalized\n";
  for (int k = 0; k < n; ++k)
    os << k << ',' << io::format_number(spec.eigenvalues[k]) << ',' << io::format_number(spec.eigenvalues[k] / n)
       << '\n';
  out.text("spectrum.csv", os.str());
  if (vectors) {
    std::ostringstream vs;
    vs << "player,component,value\n";
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) vs << i << ',' << k << ',' << io::format_number(spec.eigenvectors(i, k)) << '\n';
    out.text("eigenvectors.csv", vs.str());
  }
  const Graphon step = step_graphon(game.g);
  const auto cut = cut_norm(*step.as_step_kernel(), mode, rng::key(run.seed, kCutStream));
  Json j;
  j["command"] = "spectral";
  j["players"] = n;
  j["scale"] = game.g.scale();
  j["eigenvalues"] = to_vector(spec.eigenvalues);
  j["lambda1_normalized"] = spec.eigenvalues.cwiseAbs().maxCoeff() / n;
  j["cut_norm"] = {{"value", cut.value}, {"lower_bound", cut.lower_bound}, {"blocks", cut.blocks}};
  if (reference) {
    const auto d = cut_norm_difference(step, *reference, mode, resolution);
    j["graphon"] = {{"resolution", resolution},
                    {"cut_distance", d.value},
                    {"cut_distance_lower_bound", d.lower_bound},
                    {"op_distance", op_norm_diff(step, *reference, resolution)}};
  }
  out.json("summary.json", j);
  out.manifest("spectral");
}

// ---- entry point ---------------------------------------------------------

ExitCode exit_code_for(const std::exception& e) {
  if (dynamic_cast<const DomainError*>(&e)) return kTrivial;
  if (dynamic_cast<const PreconditionError*>(&e) || dynamic_cast<const CapabilityError*>(&e)) return kPrecondition;
  if (dynamic_cast<const NumericError*>(&e)) return kNumeric;
  return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Network and graphon games: equilibria, interventions and convergence experiments", "ggames"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GGAMES_VERSION);

  std::string config_path, out_dir = "ggames-out";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  struct Command {
    const char* name;
    const char* help;
    void (*fn)(RunConfig&);
  };
  const Command commands[] = {
      {"nash", "Solve for the Nash equilibrium", cmd_nash},
      {"intervene", "Solve the planner's targeted intervention", cmd_intervene},
      {"sample", "Sample a network from a graphon", cmd_sample},
      {"converge", "Run the convergence experiment over a ladder of sizes", cmd_converge},
      {"spectral", "Report the spectrum and cut norm of a structure", cmd_spectral},
  };
  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_path, "INI config file")->required();
    sub->add_option("--seed", seed, "Run seed (overrides run.seed)");
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--override", overrides, "section.key=value, repeatable")->take_all()->allow_extra_args(false);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << GGAMES_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "ggames: " << e.what() << '\n' << "run 'ggames --help' for usage\n";
    return kUsage;
  }

  const Command* chosen = nullptr;
  for (const auto& cmd : commands)
    if (app.got_subcommand(cmd.name)) chosen = &cmd;
  try {
    RunConfig run{Config::from_file(config_path), 1, {}};
    for (const auto& o : overrides) run.config.apply_override(o);
    run.seed = seed ? *seed : run.config.get_uint64("run.seed", 1);
    const std::string config_out = run.config.get_string("run.out", "");
    run.out_dir = std::filesystem::absolute(config_out.empty() || app.get_subcommand(chosen->name)->count("--out")
                                                ? std::filesystem::path(out_dir)
                                                : run.config.get_path("run.out"))
                      .lexically_normal();
    chosen->fn(run);
    for (const auto& w : run.warnings) err << "ggames: warning: " << w << '\n';
    out << "ggames " << chosen->name << ": wrote " << run.out_dir.string() << '\n';
    return kOk;
  } catch (const std::exception& e) {
    const ExitCode code = exit_code_for(e);
    switch (code) {
      case kTrivial:
        err << "ggames: " << e.what() << '\n';
        break;
      case kPrecondition:
        err << "ggames: precondition failed: " << e.what() << '\n';
        break;
      case kNumeric:
        err << "ggames: numerical failure: " << e.what() << '\n';
        break;
      default:
        err << "ggames: error: " << e.what() << '\n';
    }
    return code;
  }
}

}  // namespace ggames::cli
