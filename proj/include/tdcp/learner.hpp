#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tdcp/model.hpp"
#include "tdcp/plan.hpp"
#include "tdcp/rng.hpp"
#include "tdcp/solver.hpp"
#include "tdcp/value_table.hpp"
#include "tdcp/zobrist.hpp"

namespace tdcp {

enum class DecayShape : std::uint8_t { linear, exponential, constant };

struct EpsilonSchedule {
  double start = 0.2;
  double end = 0.01;
  DecayShape shape = DecayShape::linear;
  /// Fraction of the run over which epsilon moves from start to end.
  double decay_fraction = 0.8;

  double at(std::uint64_t episode, std::uint64_t total) const;
};

struct Seeds {
  std::uint64_t zobrist = 1;
  std::uint64_t exploration = 2;
  std::uint64_t sampling = 3;
};

struct LearnerConfig {
  std::uint64_t episodes = 100000;
  double alpha = 0.1;
  EpsilonSchedule epsilon;
  /// Step reward K; defaults to objective bound + 1.
  std::optional<double> k_reward;
  /// Overrides the model's bound on |objective| for the K check.
  std::optional<double> objective_bound;
  std::size_t hash_size = 100000;
  Seeds seeds;
  std::size_t eval_rollouts = 1000;
  /// Episode counts after which the greedy estimate is recorded.
  std::vector<std::uint64_t> checkpoints;

  /// Throws tdcp::Error unless K exceeds the objective bound and the numeric
  /// settings are in range.
  void validate(const Model& model) const;
  double step_reward(const Model& model) const;
};

enum class HaltReason : std::uint8_t { none, wipe_out, integrity };

struct EpisodeTrace {
  /// Slots of the visited states, starting with the empty assignment.
  std::vector<std::size_t> states;
  /// rewards[t] is earned moving from states[t] to states[t + 1].
  std::vector<double> rewards;
  /// Per-scenario objective; present iff the episode completed.
  std::optional<double> objective;
  /// Sense-adjusted terminal reward (0 for truncated episodes).
  double terminal_reward = 0.0;
  bool truncated = false;
  HaltReason halt = HaltReason::none;
  std::vector<Assignment> first_stage;  // ascending variable index; complete episodes only
};

enum class Selection : std::uint8_t {
  /// Epsilon-greedy, ties broken uniformly at random.
  training,
  /// Pure argmax, ties broken by lowest value.
  greedy,
};

/// Everything one training run needs besides the value table: solver,
/// Zobrist codes, variable order and step reward. Owns scratch buffers, so
/// use one per thread.
class EpisodeRunner {
 public:
  EpisodeRunner(const Model& model, SolverFingerprint fingerprint, const LearnerConfig& config);

  const Model& model() const { return *model_; }
  const Solver& solver() const { return solver_; }
  const ZobristTable& zobrist() const { return zobrist_; }
  std::span<const VarId> order() const { return order_; }
  double step_reward() const { return k_; }

  void run(const ValueTable& values, double epsilon, Selection selection, Rng& explore, Rng& sample,
           EpisodeTrace& trace);

 private:
  const Model* model_;
  Solver solver_;
  ZobristTable zobrist_;
  std::vector<VarId> order_;
  std::vector<VarId> first_stage_vars_;
  double k_;
  SearchState initial_;

  SearchState state_;
  std::vector<std::size_t> candidates_;
  std::vector<std::size_t> ties_;
  std::vector<int> values_;
  std::vector<double> outputs_;
};

EpisodeTrace run_episode(EpisodeRunner& runner, const ValueTable& values, double epsilon, Rng& explore,
                         Rng& sample, Selection selection = Selection::training);

/// TD(0), discount 1, applied in reverse visitation order so earlier states
/// bootstrap from successors already updated in this episode.
void td_update(ValueTable& values, const EpisodeTrace& trace, double alpha);

struct Extraction {
  std::optional<Plan> plan;
  std::size_t completed = 0;
  std::size_t truncated = 0;
};

/// Greedy rollouts against a frozen table. The plan is the first completed
/// rollout's first-stage assignment; the estimate is the mean objective over
/// completed rollouts.
Extraction extract_plan(EpisodeRunner& runner, const ValueTable& values, std::size_t rollouts,
                        std::uint64_t sampling_seed);

struct CurvePoint {
  std::uint64_t episode = 0;
  double estimate = 0.0;  // NaN when no rollout completed
};

struct TrainStats {
  std::uint64_t completed = 0;
  std::uint64_t wipe_outs = 0;
  std::uint64_t integrity_halts = 0;
};

struct TrainResult {
  ValueTable values;
  std::vector<CurvePoint> curve;
  TrainStats stats;
};

TrainResult train(const Model& model, const SolverFingerprint& fingerprint, const LearnerConfig& config);

/// Extraction with a fresh runner, the config's rollout count, and a sampling
/// stream derived from the config's sampling seed and episode count.
Extraction extract_plan(const Model& model, const SolverFingerprint& fingerprint, const ValueTable& values,
                        const LearnerConfig& config);

}  // namespace tdcp
