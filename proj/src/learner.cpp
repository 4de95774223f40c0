#include "tdcp/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tdcp/error.hpp"

namespace tdcp {

double EpsilonSchedule::at(std::uint64_t episode, std::uint64_t total) const {
  if (shape == DecayShape::constant) return start;
  const double horizon = decay_fraction * static_cast<double>(total);
  const double e = static_cast<double>(episode);
  if (horizon <= 0.0 || e >= horizon) return end;
  const double f = e / horizon;
  if (shape == DecayShape::exponential && start > 0.0 && end > 0.0) return start * std::pow(end / start, f);
  return start + (end - start) * f;
}

void LearnerConfig::validate(const Model& model) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("alpha must lie in [0,1]");
  if (!(epsilon.start >= 0.0 && epsilon.start <= 1.0 && epsilon.end >= 0.0 && epsilon.end <= 1.0)) {
    throw Error("epsilon must lie in [0,1]");
  }
  if (!(epsilon.decay_fraction >= 0.0 && epsilon.decay_fraction <= 1.0)) throw Error("decay fraction must lie in [0,1]");
  if (hash_size == 0) throw Error("hash size must be positive");
  if (eval_rollouts == 0) throw Error("eval_rollouts must be positive");
  const auto bound = objective_bound ? objective_bound : model.objective_bound();
  if (!bound) throw Error("no bound on |objective| available to validate the step reward K");
  const double k = step_reward(model);
  if (!(k > *bound)) {
    throw Error("step reward K=" + std::to_string(k) + " must exceed the objective bound " + std::to_string(*bound));
  }
}

double LearnerConfig::step_reward(const Model& model) const {
  if (k_reward) return *k_reward;
  const auto bound = objective_bound ? objective_bound : model.objective_bound();
  if (!bound) throw Error("no bound on |objective| available to derive the step reward K");
  return *bound + 1.0;
}

EpisodeRunner::EpisodeRunner(const Model& model, SolverFingerprint fingerprint, const LearnerConfig& config)
    : model_(&model),
      solver_(make_solver(model, fingerprint)),
      zobrist_(model.variables(), config.hash_size, config.seeds.zobrist),
      order_(stage_variable_order(model, fingerprint.order_seed)),
      k_(config.step_reward(model)),
      initial_(solver_.initial_state()),
      state_(initial_),
      values_(model.variables().size(), 0),
      outputs_(model.outputs().size(), 0.0) {
  if (!model.stages().empty()) {
    first_stage_vars_ = model.stages().front().decisions;
    std::sort(first_stage_vars_.begin(), first_stage_vars_.end());
  }
}

void EpisodeRunner::run(const ValueTable& values, double epsilon, Selection selection, Rng& explore, Rng& sample,
                        EpisodeTrace& trace) {
  if (values.fingerprint() != solver_.fingerprint()) {
    throw ContractViolation("value table fingerprint does not match the live solver configuration");
  }
  if (values.size() != zobrist_.table_size()) throw ContractViolation("value table size differs from H");

  const auto& vars = model_->variables();
  trace.states.clear();
  trace.rewards.clear();
  trace.objective.reset();
  trace.terminal_reward = 0.0;
  trace.truncated = false;
  trace.halt = HaltReason::none;
  trace.first_stage.clear();

  state_ = initial_;
  std::uint64_t raw = 0;
  trace.states.push_back(zobrist_.slot(raw));

  for (VarId v : order_) {
    std::size_t idx = 0;
    if (v.kind == VarKind::decision) {
      state_.indices_into(v, candidates_);
      if (selection == Selection::training && epsilon > 0.0 && explore.uniform() < epsilon) {
        idx = candidates_[explore.below(candidates_.size())];
      } else {
        double best = -std::numeric_limits<double>::infinity();
        ties_.clear();
        for (std::size_t c : candidates_) {
          const double score = values[zobrist_.slot(raw ^ zobrist_.code_at(v, c))];
          if (score > best) {
            best = score;
            ties_.clear();
            ties_.push_back(c);
          } else if (score == best) {
            ties_.push_back(c);
          }
        }
        idx = (selection == Selection::training && ties_.size() > 1) ? ties_[explore.below(ties_.size())]
                                                                       : ties_.front();
      }
    } else {
      if (!solver_.check_random_integrity(state_, v)) {
        trace.truncated = true;
        trace.halt = HaltReason::integrity;
        break;
      }
      const Pmf& pmf = model_->resolve_pmf(v, state_);
      const double u = sample.uniform();
      double cum = 0.0;
      int value = pmf.pairs.back().first;
      for (const auto& [x, p] : pmf.pairs) {
        cum += p;
        if (u < cum) {
          value = x;
          break;
        }
      }
      idx = *vars.index_of(v, value);
    }

    solver_.assign_in_place(state_, v, vars.value_at(v, idx));
    raw ^= zobrist_.code_at(v, idx);
    trace.states.push_back(zobrist_.slot(raw));
    trace.rewards.push_back(k_);
    if (state_.wiped()) {
      trace.truncated = true;
      trace.halt = HaltReason::wipe_out;
      break;
    }
  }

  if (trace.truncated) return;

  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = *state_.value(vars.id(i));
  for (std::size_t i = 0; i < outputs_.size(); ++i) {
    const auto o = state_.output(i);
    if (!o) throw ContractViolation("output '" + model_->outputs()[i] + "' not computed by the end of the episode");
    outputs_[i] = *o;
  }
  const double obj = objective_value(*model_, values_, outputs_);
  trace.objective = obj;
  const auto& objective = model_->objective();
  if (std::holds_alternative<SatisfactionProbability>(objective.mode) || objective.sense == Sense::maximize) {
    trace.terminal_reward = obj;
  } else {
    trace.terminal_reward = -obj;
  }
  for (VarId v : first_stage_vars_) trace.first_stage.push_back({v, values_[v.index]});
}

EpisodeTrace run_episode(EpisodeRunner& runner, const ValueTable& values, double epsilon, Rng& explore,
                         Rng& sample, Selection selection) {
  EpisodeTrace trace;
  runner.run(values, epsilon, selection, explore, sample, trace);
  return trace;
}

void td_update(ValueTable& values, const EpisodeTrace& trace, double alpha) {
  if (trace.states.empty()) return;
  if (trace.rewards.size() + 1 != trace.states.size()) {
    throw ContractViolation("trace must hold one reward per transition");
  }
  const std::size_t last = trace.states.size() - 1;
  double& terminal = values[trace.states[last]];
  terminal += alpha * (trace.terminal_reward - terminal);
  for (std::size_t t = last; t-- > 0;) {
    double& v = values[trace.states[t]];
    v += alpha * (trace.rewards[t] + values[trace.states[t + 1]] - v);
  }
}

Extraction extract_plan(EpisodeRunner& runner, const ValueTable& values, std::size_t rollouts,
                        std::uint64_t sampling_seed) {
  Extraction ex;
  Rng explore(0);
  Rng sample(mix_seed(sampling_seed, 0xe7a1));
  EpisodeTrace trace;
  double sum = 0.0;
  double sumsq = 0.0;
  for (std::size_t i = 0; i < rollouts; ++i) {
    runner.run(values, 0.0, Selection::greedy, explore, sample, trace);
    if (trace.truncated) {
      ++ex.truncated;
      continue;
    }
    ++ex.completed;
    if (!ex.plan) {
      ex.plan.emplace();
      ex.plan->decisions = trace.first_stage;
    } else if (ex.plan->decisions != trace.first_stage) {
      throw std::logic_error("greedy rollouts disagree on the first-stage assignment");
    }
    sum += *trace.objective;
    sumsq += *trace.objective * *trace.objective;
  }
  if (ex.plan) {
    const double n = static_cast<double>(ex.completed);
    const double mean = sum / n;
    ex.plan->estimated = mean;
    if (ex.completed > 1) {
      const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
      ex.plan->estimate_stderr = std::sqrt(var / n);
    }
  }
  return ex;
}

TrainResult train(const Model& model, const SolverFingerprint& fingerprint, const LearnerConfig& config) {
  config.validate(model);
  EpisodeRunner runner(model, fingerprint, config);
  TrainResult result{ValueTable(config.hash_size, fingerprint, config.seeds.zobrist), {}, {}};

  std::vector<std::uint64_t> checkpoints = config.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  auto next_cp = checkpoints.begin();
  while (next_cp != checkpoints.end() && *next_cp == 0) ++next_cp;

  Rng explore(mix_seed(config.seeds.exploration, 0x3c9));
  Rng sample(mix_seed(config.seeds.sampling, 0x5a3));
  EpisodeTrace trace;
  for (std::uint64_t e = 0; e < config.episodes; ++e) {
    const double eps = config.epsilon.at(e, config.episodes);
    runner.run(result.values, eps, Selection::training, explore, sample, trace);
    td_update(result.values, trace, config.alpha);
    if (!trace.truncated) {
      ++result.stats.completed;
    } else if (trace.halt == HaltReason::integrity) {
      ++result.stats.integrity_halts;
    } else {
      ++result.stats.wipe_outs;
    }
    if (next_cp != checkpoints.end() && *next_cp == e + 1) {
      const auto ex = extract_plan(runner, result.values, config.eval_rollouts, mix_seed(config.seeds.sampling, e + 1));
      result.curve.push_back({e + 1, ex.plan ? ex.plan->estimated : std::numeric_limits<double>::quiet_NaN()});
      ++next_cp;
    }
  }
  return result;
}

Extraction extract_plan(const Model& model, const SolverFingerprint& fingerprint, const ValueTable& values,
                        const LearnerConfig& config) {
  EpisodeRunner runner(model, fingerprint, config);
  return extract_plan(runner, values, config.eval_rollouts, mix_seed(config.seeds.sampling, config.episodes));
}

}  // namespace tdcp
