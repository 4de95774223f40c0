#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdcp/benchmarks.hpp"
#include "tdcp/evaluate.hpp"
#include "tdcp/learner.hpp"
#include "tdcp/model.hpp"
#include "tdcp/plan.hpp"

namespace tdcp::cli {

/// Exit codes of the front end.
enum Exit : int {
  ok = 0,
  usage = 1,
  no_plan = 2,
  infeasible = 3,
  over_limit = 4,
  failure = 5,
};

/// Where the model comes from: a model file or one of the builtin families.
struct ProblemOptions {
  std::optional<std::filesystem::path> model_path;
  std::string benchmark = "artificial";
  int n = 5;
  std::optional<std::filesystem::path> network;
  std::string budget = "1";      // 1, 2, 3 or an explicit amount
  std::string penalty = "low";   // low, high or an explicit value
  bool maximal = false;
  std::optional<std::uint64_t> permute_seed;
};

struct Problem {
  Model model;
  std::string description;
  /// Set for the disaster family: plans are shown as invested link ids.
  std::optional<Network> network;
  std::optional<DisasterOptions> disaster;
  std::vector<std::string> warnings;
};

Problem load_problem(const ProblemOptions& options);

struct TrainOptions {
  ProblemOptions problem;
  LearnerConfig learner;  // seeds are overwritten per run
  std::size_t runs = 1;
  std::uint64_t seed = 1;
  /// Explicit checkpoints; otherwise `curve_points` evenly spaced ones.
  std::vector<std::uint64_t> checkpoints;
  std::size_t curve_points = 10;
  std::optional<std::filesystem::path> curve_out;
  std::optional<std::filesystem::path> report_out;
  bool exact = false;
  std::optional<std::uint64_t> mc;
  bool timing = false;
};

struct Evaluation {
  std::string method;  // "exact" or "mc"
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t samples = 0;
  std::optional<std::uint64_t> seed;
};

struct RunRecord {
  std::size_t index = 0;
  Seeds seeds;
  std::optional<Plan> plan;
  std::size_t rollouts_completed = 0;
  std::size_t rollouts_truncated = 0;
  TrainStats stats;
  std::vector<CurvePoint> curve;
  std::optional<double> seconds;
};

struct TrainReport {
  std::vector<RunRecord> runs;
  std::optional<std::size_t> best;  // position in `runs`
  std::optional<Evaluation> evaluation;
  std::vector<std::string> warnings;
  nlohmann::json config;
};

/// Seeds used by run `index` of a batch started from `seed`.
Seeds run_seeds(std::uint64_t seed, std::size_t index);

/// Evenly spaced checkpoints ending at `episodes`.
std::vector<std::uint64_t> default_checkpoints(std::uint64_t episodes, std::size_t points);

/// R seeded training runs, best plan by estimated objective, then exact or
/// MC evaluation of that plan. Throws LimitExceeded when --exact is over
/// the scenario limit.
TrainReport cmd_train(const Problem& problem, const TrainOptions& options);

nlohmann::json report_to_json(const Problem& problem, const TrainReport& report);

/// Plan files are JSON objects with a "decisions" map from variable name to
/// value; a train report (whose "best" entry carries one) is accepted too.
Plan read_plan_file(const Model& model, const std::filesystem::path& path);
Plan plan_from_json(const Model& model, const nlohmann::json& j);
nlohmann::json plan_to_json(const Problem& problem, const Plan& plan);

/// Human-readable plan: invested link ids for the disaster family.
std::string describe_plan(const Problem& problem, const Plan& plan);

/// Checks feasibility, then evaluates exactly or by Monte Carlo. Throws
/// Error listing the violated constraints for an infeasible plan.
Evaluation cmd_eval(const Problem& problem, const Plan& plan, bool exact, std::optional<std::uint64_t> mc,
                    std::uint64_t seed);

OptimumResult cmd_oracle(const Problem& problem, EnumerationLimits limits = {});

/// Parses `args` (without the program name) and runs the subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tdcp::cli
