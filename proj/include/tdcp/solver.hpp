#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tdcp/constraint.hpp"
#include "tdcp/search_state.hpp"

namespace tdcp {

enum class AllDifferentStrength : std::uint8_t {
  /// Prune assigned values from the other variables; fail on two equal
  /// singletons.
  pairwise,
  /// Prune from every singleton to fixpoint and fail when fewer values than
  /// variables remain in the union of domains.
  strong,
};

inline constexpr const char* kCodeVersion = "tdcp-solver/1";

/// The solver configuration is part of a learned policy's identity: a value
/// table is only meaningful under the exact filtering that produced it.
struct SolverFingerprint {
  AllDifferentStrength alldifferent = AllDifferentStrength::pairwise;
  std::optional<std::uint64_t> order_seed;
  std::string code_version = kCodeVersion;

  std::string canonical() const;
  std::uint64_t digest() const;

  friend bool operator==(const SolverFingerprint&, const SolverFingerprint&) = default;
};

/// Propagation engine. Immutable after construction; one Solver can serve
/// many concurrently running episodes, each owning its SearchState.
class Solver {
 public:
  Solver(std::shared_ptr<const VariableSet> vars, std::vector<ConstraintSpec> constraints, std::size_t output_count,
         SolverFingerprint fingerprint = {});

  const SolverFingerprint& fingerprint() const { return fingerprint_; }
  const VariableSet& variables() const { return *vars_; }
  std::span<const ConstraintSpec> constraints() const { return constraints_; }

  /// Fresh state holding the original domains, not yet propagated.
  SearchState initial_state() const;

  SearchState propagate(SearchState state) const;
  SearchState assign(SearchState state, VarId var, int value) const;

  /// In-place forms used by the episode loop.
  void propagate_in_place(SearchState& state) const;
  void assign_in_place(SearchState& state, VarId var, int value) const;

  /// True iff the unassigned random variable still has its full original
  /// domain.
  bool check_random_integrity(const SearchState& state, VarId var) const;

 private:
  void enqueue_watchers(SearchState& state, VarId v, std::size_t except) const;
  void run_queue(SearchState& state) const;
  void run_one(SearchState& state, std::size_t c) const;
  bool remove(SearchState& s, VarId v, int value) const;

  void alldifferent_pairwise(SearchState& s, const AllDifferent& c) const;
  void alldifferent_strong(SearchState& s, const AllDifferent& c) const;
  void linear_le(SearchState& s, const LinearLe& c) const;
  void maximality_guard(SearchState& s, const MaximalityGuard& c) const;
  void shortest_path(SearchState& s, const ShortestPathCost& c, std::size_t c_index) const;

  std::shared_ptr<const VariableSet> vars_;
  std::vector<ConstraintSpec> constraints_;
  std::size_t output_count_;
  SolverFingerprint fingerprint_;
  std::vector<std::vector<std::size_t>> watchers_;
  std::vector<std::optional<ShortestPathEvaluator>> evaluators_;
};

}  // namespace tdcp
