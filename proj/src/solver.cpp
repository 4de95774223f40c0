#include "tdcp/solver.hpp"

#include <algorithm>
#include <sstream>

#include "tdcp/error.hpp"

namespace tdcp {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string SolverFingerprint::canonical() const {
  std::ostringstream os;
  os << "alldifferent=" << (alldifferent == AllDifferentStrength::pairwise ? "pairwise" : "strong")
     << ";order_seed=" << (order_seed ? std::to_string(*order_seed) : "none") << ";code=" << code_version;
  return os.str();
}

std::uint64_t SolverFingerprint::digest() const { return fnv1a(canonical()); }

Solver::Solver(std::shared_ptr<const VariableSet> vars, std::vector<ConstraintSpec> constraints,
               std::size_t output_count, SolverFingerprint fingerprint)
    : vars_(std::move(vars)),
      constraints_(std::move(constraints)),
      output_count_(output_count),
      fingerprint_(std::move(fingerprint)),
      watchers_(vars_->size()),
      evaluators_(constraints_.size()) {
  for (std::size_t c = 0; c < constraints_.size(); ++c) {
    for (VarId v : scope(constraints_[c])) {
      if (v.index >= vars_->size()) throw Error("constraint references an undeclared variable");
      auto& w = watchers_[v.index];
      if (w.empty() || w.back() != c) w.push_back(c);
    }
    if (const auto* sp = std::get_if<ShortestPathCost>(&constraints_[c])) {
      if (sp->output >= output_count_) throw Error("shortest_path_cost writes an undeclared output");
      evaluators_[c].emplace(*sp->network);
    }
  }
}

SearchState Solver::initial_state() const { return SearchState(*vars_, output_count_); }

SearchState Solver::propagate(SearchState state) const {
  propagate_in_place(state);
  return state;
}

SearchState Solver::assign(SearchState state, VarId var, int value) const {
  assign_in_place(state, var, value);
  return state;
}

void Solver::propagate_in_place(SearchState& state) const {
  if (state.wiped_) throw ContractViolation("propagate called on a wiped-out state");
  state.queued_.assign(constraints_.size(), 0);
  state.queue_.clear();
  for (std::size_t c = 0; c < constraints_.size(); ++c) {
    state.queue_.push_back(c);
    state.queued_[c] = 1;
  }
  state.propagated_ = true;
  run_queue(state);
}

void Solver::assign_in_place(SearchState& state, VarId var, int value) const {
  if (state.wiped_) throw ContractViolation("assign called on a wiped-out state");
  if (var.index >= vars_->size()) throw ContractViolation("assign: unknown variable");
  if (state.is_assigned(var)) {
    throw ContractViolation("assign: variable '" + vars_->decl(var).name + "' is already assigned");
  }
  const auto idx = vars_->index_of(var, value);
  if (!idx || !state.has_index(var, *idx)) {
    throw ContractViolation("assign: value " + std::to_string(value) + " is not in the current domain of '" +
                            vars_->decl(var).name + "' " + state.domain(var).to_string());
  }
  state.fix(var, value, *idx);
  if (!state.propagated_) {
    propagate_in_place(state);
    return;
  }
  state.queued_.assign(constraints_.size(), 0);
  state.queue_.clear();
  enqueue_watchers(state, var, constraints_.size());
  run_queue(state);
}

bool Solver::check_random_integrity(const SearchState& state, VarId var) const {
  if (vars_->decl(var).kind != VarKind::random) {
    throw ContractViolation("integrity check on non-random variable '" + vars_->decl(var).name + "'");
  }
  if (state.is_assigned(var)) {
    throw ContractViolation("integrity check on already assigned variable '" + vars_->decl(var).name + "'");
  }
  return state.domain_size(var) == vars_->original(var).size();
}

void Solver::enqueue_watchers(SearchState& state, VarId v, std::size_t except) const {
  for (std::size_t c : watchers_[v.index]) {
    if (c != except && !state.queued_[c]) {
      state.queued_[c] = 1;
      state.queue_.push_back(c);
    }
  }
}

void Solver::run_queue(SearchState& state) const {
  std::size_t head = 0;
  while (head < state.queue_.size()) {
    const std::size_t c = state.queue_[head++];
    state.queued_[c] = 0;
    state.modified_.clear();
    run_one(state, c);
    if (state.wiped_) break;
    for (std::size_t i = 0; i < state.modified_.size(); ++i) enqueue_watchers(state, state.modified_[i], c);
  }
  state.queue_.clear();
  state.modified_.clear();
}

void Solver::run_one(SearchState& state, std::size_t c) const {
  const auto& spec = constraints_[c];
  if (const auto* a = std::get_if<AllDifferent>(&spec)) {
    if (fingerprint_.alldifferent == AllDifferentStrength::pairwise) {
      alldifferent_pairwise(state, *a);
    } else {
      alldifferent_strong(state, *a);
    }
  } else if (const auto* l = std::get_if<LinearLe>(&spec)) {
    linear_le(state, *l);
  } else if (const auto* g = std::get_if<MaximalityGuard>(&spec)) {
    maximality_guard(state, *g);
  } else if (const auto* sp = std::get_if<ShortestPathCost>(&spec)) {
    shortest_path(state, *sp, c);
  }
  // ReifiedLe is never posted.
}

bool Solver::remove(SearchState& s, VarId v, int value) const {
  const auto idx = vars_->index_of(v, value);
  if (!idx || !s.remove_index(v, *idx)) return false;
  s.modified_.push_back(v);
  return true;
}


void Solver::alldifferent_pairwise(SearchState& s, const AllDifferent& c) const {
  // Forward checking from assigned variables only.
  for (VarId a : c.vars) {
    if (!s.is_assigned(a)) continue;
    const int value = s.assigned_value_[a.index];
    for (VarId b : c.vars) {
      if (b == a) continue;
      remove(s, b, value);
      if (s.wiped_) return;
    }
  }
  // Two fixed variables sharing a value violate a disequality.
  for (std::size_t i = 0; i < c.vars.size(); ++i) {
    const auto vi = s.singleton_value(c.vars[i]);
    if (!vi) continue;
    for (std::size_t j = i + 1; j < c.vars.size(); ++j) {
      const auto vj = s.singleton_value(c.vars[j]);
      if (vj && *vi == *vj) {
        s.wiped_ = true;
        return;
      }
    }
  }
}

void Solver::alldifferent_strong(SearchState& s, const AllDifferent& c) const {
  bool changed = true;
  while (changed) {
    changed = false;
    for (VarId a : c.vars) {
      const auto value = s.singleton_value(a);
      if (!value) continue;
      for (VarId b : c.vars) {
        if (b == a) continue;
        if (remove(s, b, *value)) changed = true;
        if (s.wiped_) return;
      }
    }
  }
  std::vector<int> all;
  std::vector<int> vals;
  for (VarId v : c.vars) {
    s.values_into(v, vals);
    all.insert(all.end(), vals.begin(), vals.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  if (all.size() < c.vars.size()) s.wiped_ = true;
}

void Solver::linear_le(SearchState& s, const LinearLe& c) const {
  std::vector<int> vals;
  long long min_sum = 0;
  for (std::size_t i = 0; i < c.vars.size(); ++i) {
    s.values_into(c.vars[i], vals);
    if (vals.empty()) return;
    min_sum += c.coeffs[i] >= 0 ? c.coeffs[i] * vals.front() : c.coeffs[i] * vals.back();
  }
  for (std::size_t i = 0; i < c.vars.size(); ++i) {
    const VarId v = c.vars[i];
    const long long a = c.coeffs[i];
    s.values_into(v, vals);
    const long long own_min = a >= 0 ? a * vals.front() : a * vals.back();
    const long long rest = min_sum - own_min;
    for (int value : vals) {
      if (a * value + rest > c.bound) {
        remove(s, v, value);
        if (s.wiped_) return;
      }
    }
  }
}

void Solver::maximality_guard(SearchState& s, const MaximalityGuard& c) const {
  bool changed = true;
  while (changed) {
    changed = false;
    long long spent_min = 0;
    long long free_sum = 0;
    for (std::size_t i = 0; i < c.vars.size(); ++i) {
      const bool can0 = s.contains(c.vars[i], 0);
      const bool can1 = s.contains(c.vars[i], 1);
      if (can1 && !can0) spent_min += c.costs[i];
      if (can1 && can0) free_sum += c.costs[i];
    }
    for (std::size_t i = 0; i < c.vars.size(); ++i) {
      const VarId v = c.vars[i];
      if (!s.contains(v, 0)) continue;
      const bool free = s.contains(v, 1);
      const long long best_spent = spent_min + free_sum - (free ? c.costs[i] : 0);
      if (best_spent + c.costs[i] <= c.budget) {
        remove(s, v, 0);
        if (s.wiped_) return;
        changed = true;
        break;
      }
    }
  }
}

void Solver::shortest_path(SearchState& s, const ShortestPathCost& c, std::size_t c_index) const {
  if (s.output_set_[c.output]) return;
  std::vector<std::uint8_t> alive(c.links.size());
  for (std::size_t k = 0; k < c.links.size(); ++k) {
    if (!s.is_assigned(c.links[k])) return;
    alive[k] = s.assigned_value_[c.links[k].index] != 0;
  }
  s.outputs_[c.output] = evaluators_[c_index]->total_cost(alive, c.penalty);
  s.output_set_[c.output] = 1;
}

}  // namespace tdcp
