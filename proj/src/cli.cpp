#include "tdcp/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "tdcp/error.hpp"
#include "tdcp/model_io.hpp"
#include "tdcp/rng.hpp"

namespace tdcp::cli {

namespace {

bool is_uint(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

DisasterOptions disaster_options(const ProblemOptions& o) {
  DisasterOptions d;
  if (o.budget == "1" || o.budget == "2" || o.budget == "3") {
    d.budget_level = std::stoi(o.budget);
  } else if (is_uint(o.budget)) {
    d.budget_level.reset();
    d.budget = std::stoll(o.budget);
  } else {
    throw Error("--budget expects 1, 2, 3 or a positive integer amount, got '" + o.budget + "'");
  }
  if (o.penalty == "low" || o.penalty == "high") {
    d.penalty_level = o.penalty == "low" ? PenaltyLevel::low : PenaltyLevel::high;
  } else {
    d.penalty_level.reset();
    try {
      std::size_t pos = 0;
      d.penalty = std::stod(o.penalty, &pos);
      if (pos != o.penalty.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error("--penalty expects low, high or a number, got '" + o.penalty + "'");
    }
  }
  d.maximality = o.maximal;
  d.permutation_seed = o.permute_seed;
  return d;
}

bool better(const Model& model, double a, double b) {
  const auto& obj = model.objective();
  if (std::holds_alternative<SatisfactionProbability>(obj.mode) || obj.sense == Sense::maximize) return a > b;
  return a < b;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

nlohmann::json seeds_json(const Seeds& s) {
  return {{"zobrist", s.zobrist}, {"exploration", s.exploration}, {"sampling", s.sampling}};
}

const char* shape_name(DecayShape s) {
  switch (s) {
    case DecayShape::linear:
      return "linear";
    case DecayShape::exponential:
      return "exponential";
    case DecayShape::constant:
      return "constant";
  }
  return "linear";
}

std::filesystem::path curve_path(const std::filesystem::path& base, std::size_t run) {
  auto stem = base.stem().string();
  auto ext = base.extension().string();
  if (ext.empty()) ext = ".csv";
  return base.parent_path() / (stem + ".run" + std::to_string(run) + ext);
}

void write_curve(const std::filesystem::path& path, const std::vector<CurvePoint>& curve) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write curve file " + path.string());
  f << "episode,estimate\n";
  for (const auto& p : curve) {
    f << p.episode << ',';
    if (std::isnan(p.estimate)) {
      f << "nan";
    } else {
      f << fmt(p.estimate);
    }
    f << '\n';
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

}  // namespace

Problem load_problem(const ProblemOptions& o) {
  if (o.model_path) {
    Model m = read_model_file(*o.model_path);
    return {std::move(m), "model " + o.model_path->filename().string(), std::nullopt, std::nullopt, {}};
  }
  if (o.benchmark == "artificial") {
    return {build_artificial(o.n), "artificial N=" + std::to_string(o.n), std::nullopt, std::nullopt, {}};
  }
  if (o.benchmark == "disaster") {
    if (!o.network) throw Error("--benchmark disaster needs --network PATH");
    Network net = load_network(*o.network);
    DisasterOptions d = disaster_options(o);
    Model m = build_disaster(net, d);
    std::ostringstream desc;
    desc << "disaster " << o.network->filename().string() << " B=" << d.resolved_budget(net)
         << " M=" << fmt(d.resolved_penalty(net)) << (d.maximality ? " maximal" : "");
    auto warnings = disaster_warnings(net, d);
    return {std::move(m), desc.str(), std::move(net), d, std::move(warnings)};
  }
  throw Error("unknown benchmark '" + o.benchmark + "' (expected artificial or disaster)");
}

Seeds run_seeds(std::uint64_t seed, std::size_t index) {
  return {seed + index, seed + index + 1000, seed + index + 2000};
}

std::vector<std::uint64_t> default_checkpoints(std::uint64_t episodes, std::size_t points) {
  std::vector<std::uint64_t> out;
  if (episodes == 0 || points == 0) return out;
  for (std::size_t k = 1; k <= points; ++k) {
    const std::uint64_t e = episodes * k / points;
    if (e > 0 && (out.empty() || out.back() != e)) out.push_back(e);
  }
  return out;
}

std::string describe_plan(const Problem& problem, const Plan& plan) {
  if (!problem.network) return plan_to_string(problem.model, plan);
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& a : plan.decisions) {
    if (a.value != 1) continue;
    const auto& name = problem.model.variables().decl(a.var).name;
    os << (first ? "" : ",") << name.substr(1);
    first = false;
  }
  os << '}';
  return os.str();
}

nlohmann::json plan_to_json(const Problem& problem, const Plan& plan) {
  nlohmann::json decisions = nlohmann::json::object();
  for (const auto& a : plan.decisions) decisions[problem.model.variables().decl(a.var).name] = a.value;
  nlohmann::json j{{"decisions", decisions}, {"display", describe_plan(problem, plan)}};
  if (problem.network) {
    std::vector<int> invested;
    for (const auto& a : plan.decisions) {
      if (a.value == 1) invested.push_back(std::stoi(problem.model.variables().decl(a.var).name.substr(1)));
    }
    j["invested_links"] = invested;
  }
  return j;
}

Plan plan_from_json(const Model& model, const nlohmann::json& j) {
  const nlohmann::json* src = &j;
  if (!src->contains("decisions") && src->contains("best") && (*src)["best"].is_object()) src = &(*src)["best"];
  if (!src->contains("decisions") || !(*src)["decisions"].is_object()) {
    throw Error("plan file needs a \"decisions\" object mapping variable names to values");
  }
  Plan plan;
  for (const auto& [name, value] : (*src)["decisions"].items()) {
    const auto var = model.variables().find(name);
    if (!var) throw Error("plan names unknown variable '" + name + "'");
    if (!value.is_number_integer()) throw Error("plan value for '" + name + "' must be an integer");
    plan.decisions.push_back({*var, value.get<int>()});
  }
  std::sort(plan.decisions.begin(), plan.decisions.end(),
            [](const Assignment& a, const Assignment& b) { return a.var.index < b.var.index; });
  if (src->contains("estimated") && (*src)["estimated"].is_number()) plan.estimated = (*src)["estimated"].get<double>();
  return plan;
}

Plan read_plan_file(const Model& model, const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open plan file " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("plan file " + path.string() + ": " + e.what());
  }
  return plan_from_json(model, j);
}

Evaluation cmd_eval(const Problem& problem, const Plan& plan, bool exact, std::optional<std::uint64_t> mc,
                    std::uint64_t seed) {
  const auto problems = check_plan(problem.model, plan.decisions);
  if (!problems.empty()) {
    std::string msg = "plan is infeasible:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(msg);
  }
  if (mc && !exact) {
    const auto r = mc_eval(problem.model, plan.decisions, *mc, seed);
    return {"mc", r.mean, r.stderr_, r.samples, seed};
  }
  const auto r = exact_eval_detail(problem.model, plan.decisions);
  return {"exact", r.value, 0.0, r.scenarios, std::nullopt};
}

OptimumResult cmd_oracle(const Problem& problem, EnumerationLimits limits) {
  return exhaustive_opt(problem.model, limits);
}

TrainReport cmd_train(const Problem& problem, const TrainOptions& options) {
  const Model& model = problem.model;
  TrainReport report;
  report.warnings = problem.warnings;
  if (options.runs == 0) throw Error("--runs must be at least 1");
  if (options.exact && model.scenario_count() > kDefaultScenarioLimit) {
    const auto count = model.scenario_count();
    throw LimitExceeded("refusing --exact: " + std::to_string(count) + " scenarios exceed the limit " +
                            std::to_string(kDefaultScenarioLimit) + "; use --mc N",
                        count, kDefaultScenarioLimit);
  }

  LearnerConfig base = options.learner;
  base.checkpoints =
      options.checkpoints.empty() ? default_checkpoints(base.episodes, options.curve_points) : options.checkpoints;
  base.validate(model);
  if (base.episodes == 0) {
    report.warnings.push_back("0 episodes: the value table stays zero and the plan is the lexicographic default");
  }

  const SolverFingerprint fp{};
  for (std::size_t i = 0; i < options.runs; ++i) {
    LearnerConfig cfg = base;
    cfg.seeds = run_seeds(options.seed, i);
    const auto t0 = std::chrono::steady_clock::now();
    auto trained = train(model, fp, cfg);
    auto ex = extract_plan(model, fp, trained.values, cfg);
    RunRecord rec;
    rec.index = i + 1;
    rec.seeds = cfg.seeds;
    rec.plan = ex.plan;
    rec.rollouts_completed = ex.completed;
    rec.rollouts_truncated = ex.truncated;
    rec.stats = trained.stats;
    rec.curve = std::move(trained.curve);
    if (options.timing) rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!rec.plan) report.warnings.push_back("run " + std::to_string(rec.index) + ": no greedy rollout completed");
    report.runs.push_back(std::move(rec));
  }

  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    const auto& r = report.runs[i];
    if (!r.plan) continue;
    if (!report.best || better(model, r.plan->estimated, report.runs[*report.best].plan->estimated)) report.best = i;
  }

  if (report.best) {
    const Plan& plan = *report.runs[*report.best].plan;
    const bool within = model.scenario_count() <= kDefaultScenarioLimit;
    if (options.exact || (!options.mc && within)) {
      report.evaluation = cmd_eval(problem, plan, true, std::nullopt, 0);
    } else if (options.mc) {
      report.evaluation = cmd_eval(problem, plan, false, options.mc, mix_seed(options.seed, 0x6d63));
    }
  }

  nlohmann::json cfg;
  cfg["problem"] = problem.description;
  cfg["episodes"] = base.episodes;
  cfg["alpha"] = base.alpha;
  cfg["epsilon"] = {{"start", base.epsilon.start},
                    {"end", base.epsilon.end},
                    {"shape", shape_name(base.epsilon.shape)},
                    {"decay_fraction", base.epsilon.decay_fraction}};
  cfg["k_reward"] = base.step_reward(model);
  cfg["hash_size"] = base.hash_size;
  cfg["eval_rollouts"] = base.eval_rollouts;
  cfg["checkpoints"] = base.checkpoints;
  cfg["runs"] = options.runs;
  cfg["seed"] = options.seed;
  cfg["fingerprint"] = fp.canonical();
  report.config = std::move(cfg);
  return report;
}

nlohmann::json report_to_json(const Problem& problem, const TrainReport& report) {
  nlohmann::json j;
  j["format"] = "tdcp-report";
  j["version"] = 1;
  j["config"] = report.config;
  j["warnings"] = report.warnings;
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : report.runs) {
    nlohmann::json e;
    e["run"] = r.index;
    e["seeds"] = seeds_json(r.seeds);
    if (r.plan) {
      e["plan"] = plan_to_json(problem, *r.plan);
      e["estimated"] = r.plan->estimated;
      e["estimate_stderr"] = r.plan->estimate_stderr;
    } else {
      e["plan"] = nullptr;
    }
    const double episodes = static_cast<double>(r.stats.completed + r.stats.wipe_outs + r.stats.integrity_halts);
    e["training"] = {{"completed", r.stats.completed},
                     {"wipe_outs", r.stats.wipe_outs},
                     {"integrity_halts", r.stats.integrity_halts},
                     {"truncation_rate",
                      episodes > 0 ? static_cast<double>(r.stats.wipe_outs + r.stats.integrity_halts) / episodes : 0.0}};
    e["rollouts"] = {{"completed", r.rollouts_completed}, {"truncated", r.rollouts_truncated}};
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& p : r.curve) curve.push_back({p.episode, std::isnan(p.estimate) ? nlohmann::json() : nlohmann::json(p.estimate)});
    e["curve"] = curve;
    if (r.seconds) e["seconds"] = *r.seconds;
    runs.push_back(std::move(e));
  }
  j["runs"] = runs;
  if (report.best) {
    const auto& r = report.runs[*report.best];
    nlohmann::json b = plan_to_json(problem, *r.plan);
    b["run"] = r.index;
    b["estimated"] = r.plan->estimated;
    if (report.evaluation) {
      b["evaluated"] = report.evaluation->value;
      b["evaluation"] = {{"method", report.evaluation->method},
                         {"value", report.evaluation->value},
                         {"stderr", report.evaluation->stderr_},
                         {"samples", report.evaluation->samples}};
      if (report.evaluation->seed) b["evaluation"]["seed"] = *report.evaluation->seed;
    }
    j["best"] = b;
  } else {
    j["best"] = nullptr;
  }
  return j;
}

namespace {

void add_problem_flags(CLI::App& app, ProblemOptions& p) {
  app.add_option("--model", p.model_path, "Model file (JSON)");
  app.add_option("--benchmark", p.benchmark, "Builtin family")->check(CLI::IsMember({"artificial", "disaster"}));
  app.add_option("--n", p.n, "Size of the artificial model");
  app.add_option("--network", p.network, "Network file for the disaster model");
  app.add_option("--budget", p.budget, "Budget level 1, 2, 3 or an explicit amount");
  app.add_option("--penalty", p.penalty, "Penalty level low, high or an explicit value");
  app.add_flag("--maximal", p.maximal, "Exclude non-maximal investment plans");
  app.add_option("--permute-seed", p.permute_seed, "Seed for the decision order permutation");
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

void print_evaluation(const Evaluation& e, std::ostream& out) {
  if (e.method == "exact") {
    out << "exact: " << fmt(e.value) << " (" << e.samples << " scenarios)\n";
  } else {
    out << "mc: " << fmt(e.value) << " +- " << fmt(e.stderr_) << " (" << e.samples << " samples)\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic constraint solving with TD(0) over a propagation engine", "tdcp"};
  app.require_subcommand(1);

  TrainOptions train_opt;
  double eps_start = train_opt.learner.epsilon.start;
  double eps_end = train_opt.learner.epsilon.end;
  std::string eps_shape = "linear";
  std::optional<double> k_reward;
  auto* train_cmd = app.add_subcommand("train", "Train R seeded runs and report the best plan");
  add_problem_flags(*train_cmd, train_opt.problem);
  train_cmd->add_option("--episodes", train_opt.learner.episodes, "Episodes per run");
  train_cmd->add_option("--alpha", train_opt.learner.alpha, "Learning rate");
  train_cmd->add_option("--epsilon-start", eps_start, "Initial exploration rate");
  train_cmd->add_option("--epsilon-end", eps_end, "Final exploration rate");
  train_cmd->add_option("--epsilon-shape", eps_shape, "Decay shape")
      ->check(CLI::IsMember({"linear", "exponential", "constant"}));
  train_cmd->add_option("--k-reward", k_reward, "Per-assignment reward K (default: objective bound + 1)");
  train_cmd->add_option("--hash-size", train_opt.learner.hash_size, "Value table size H");
  train_cmd->add_option("--rollouts", train_opt.learner.eval_rollouts, "Greedy rollouts per estimate");
  train_cmd->add_option("--runs", train_opt.runs, "Independent runs");
  train_cmd->add_option("--seed", train_opt.seed, "Base seed");
  train_cmd->add_option("--checkpoints", train_opt.checkpoints, "Episode counts for the learning curve")
      ->delimiter(',');
  train_cmd->add_option("--curve-points", train_opt.curve_points, "Evenly spaced checkpoints when none are given");
  train_cmd->add_option("--curve-out", train_opt.curve_out, "Curve CSV path; one file per run");
  train_cmd->add_option("--report-out", train_opt.report_out, "Report file (JSON)");
  train_cmd->add_flag("--exact", train_opt.exact, "Evaluate the best plan by full enumeration");
  train_cmd->add_option("--mc", train_opt.mc, "Evaluate the best plan with N Monte Carlo samples");
  train_cmd->add_flag("--timing", train_opt.timing, "Record wall time in the report");

  ProblemOptions eval_problem;
  std::filesystem::path plan_path;
  bool eval_exact = false;
  std::optional<std::uint64_t> eval_mc;
  std::uint64_t eval_seed = 1;
  std::optional<std::filesystem::path> eval_out;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a plan exactly or by Monte Carlo");
  add_problem_flags(*eval_cmd, eval_problem);
  eval_cmd->add_option("--plan", plan_path, "Plan file or train report")->required();
  eval_cmd->add_flag("--exact", eval_exact, "Full scenario enumeration");
  eval_cmd->add_option("--mc", eval_mc, "Monte Carlo samples");
  eval_cmd->add_option("--seed", eval_seed, "Sampling seed for --mc");
  eval_cmd->add_option("--report-out", eval_out, "Evaluation report (JSON)");

  ProblemOptions oracle_problem;
  std::uint64_t max_plans = kDefaultAssignmentLimit;
  std::uint64_t max_scenarios = kDefaultScenarioLimit;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive optimum by enumeration");
  add_problem_flags(*oracle_cmd, oracle_problem);
  oracle_cmd->add_option("--max-plans", max_plans, "Limit on decision assignments");
  oracle_cmd->add_option("--max-scenarios", max_scenarios, "Limit on scenarios");

  ProblemOptions build_problem;
  std::filesystem::path build_out;
  auto* build_cmd = app.add_subcommand("build", "Write a builtin model to a model file");
  add_problem_flags(*build_cmd, build_problem);
  build_cmd->add_option("--out", build_out, "Output model file")->required();

  int gen_nodes = 8;
  int gen_links = 12;
  std::uint64_t gen_seed = 1;
  std::filesystem::path gen_out;
  auto* gen_cmd = app.add_subcommand("gen-network", "Generate a seeded random network file");
  gen_cmd->add_option("--nodes", gen_nodes, "Number of nodes");
  gen_cmd->add_option("--links", gen_links, "Number of links");
  gen_cmd->add_option("--seed", gen_seed, "Generator seed");
  gen_cmd->add_option("--out", gen_out, "Output network file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? Exit::ok : Exit::usage;
  }

  try {
    if (*train_cmd) {
      train_opt.learner.epsilon.start = eps_start;
      train_opt.learner.epsilon.end = eps_end;
      train_opt.learner.epsilon.shape = eps_shape == "exponential" ? DecayShape::exponential
                                        : eps_shape == "constant"  ? DecayShape::constant
                                                                   : DecayShape::linear;
      train_opt.learner.k_reward = k_reward;
      const Problem problem = load_problem(train_opt.problem);
      TrainReport report;
      try {
        report = cmd_train(problem, train_opt);
      } catch (const LimitExceeded& e) {
        err << "error: " << e.what() << '\n';
        return Exit::over_limit;
      }
      print_warnings(report.warnings, err);
      out << problem.description << '\n';
      for (const auto& r : report.runs) {
        out << "run " << r.index << ": ";
        if (r.plan) {
          out << describe_plan(problem, *r.plan) << " estimated " << fmt(r.plan->estimated);
        } else {
          out << "no plan";
        }
        out << '\n';
      }
      if (train_opt.curve_out) {
        for (const auto& r : report.runs) write_curve(curve_path(*train_opt.curve_out, r.index), r.curve);
      }
      if (train_opt.report_out) write_json(*train_opt.report_out, report_to_json(problem, report));
      if (!report.best) {
        err << "error: no run produced a plan (every greedy rollout was truncated)\n";
        return Exit::no_plan;
      }
      const auto& best = report.runs[*report.best];
      out << "best: run " << best.index << ' ' << describe_plan(problem, *best.plan) << " estimated "
          << fmt(best.plan->estimated) << '\n';
      if (report.evaluation) print_evaluation(*report.evaluation, out);
      return Exit::ok;
    }

    if (*eval_cmd) {
      const Problem problem = load_problem(eval_problem);
      print_warnings(problem.warnings, err);
      const Plan plan = read_plan_file(problem.model, plan_path);
      if (!eval_exact && !eval_mc) eval_exact = true;
      Evaluation e;
      try {
        e = cmd_eval(problem, plan, eval_exact, eval_mc, eval_seed);
      } catch (const LimitExceeded& ex) {
        err << "error: refusing exact evaluation: " << ex.count() << " scenarios exceed the limit " << ex.limit()
            << "; use --mc N\n";
        return Exit::over_limit;
      } catch (const Error& ex) {
        err << "error: " << ex.what() << '\n';
        return Exit::infeasible;
      }
      out << problem.description << '\n';
      out << "plan: " << describe_plan(problem, plan) << '\n';
      print_evaluation(e, out);
      if (eval_out) {
        nlohmann::json j = plan_to_json(problem, plan);
        j["format"] = "tdcp-evaluation";
        j["problem"] = problem.description;
        j["plan"] = describe_plan(problem, plan);
        j["estimated"] = plan.estimated;
        j["evaluated"] = e.value;
        j["method"] = e.method;
        j["stderr"] = e.stderr_;
        j["samples"] = e.samples;
        if (e.seed) j["seed"] = *e.seed;
        write_json(*eval_out, j);
      }
      return Exit::ok;
    }

    if (*oracle_cmd) {
      const Problem problem = load_problem(oracle_problem);
      print_warnings(problem.warnings, err);
      OptimumResult r;
      try {
        r = cmd_oracle(problem, {max_plans, max_scenarios});
      } catch (const LimitExceeded& e) {
        err << "error: refusing enumeration: " << e.what() << " (count " << e.count() << ")\n";
        return Exit::over_limit;
      }
      out << problem.description << '\n';
      out << "optimum: " << describe_plan(problem, r.plan) << " value " << fmt(r.value) << " (" << r.feasible_plans
          << " feasible plans)\n";
      return Exit::ok;
    }

    if (*build_cmd) {
      const Problem problem = load_problem(build_problem);
      print_warnings(problem.warnings, err);
      write_model_file(problem.model, build_out);
      out << "wrote " << build_out.string() << '\n';
      return Exit::ok;
    }

    if (*gen_cmd) {
      save_network(gen_network(gen_nodes, gen_links, gen_seed), gen_out);
      out << "wrote " << gen_out.string() << '\n';
      return Exit::ok;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return Exit::failure;
  }
  return Exit::usage;
}

}  // namespace tdcp::cli
