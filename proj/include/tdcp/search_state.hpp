#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tdcp/domain.hpp"

namespace tdcp {

class Solver;

/// Partial assignment plus the filtered domain of every variable during one
/// episode. Domains are bitsets over each variable's original domain.
class SearchState {
 public:
  SearchState(const VariableSet& vars, std::size_t output_count);

  const VariableSet& variables() const { return *vars_; }

  Domain domain(VarId v) const;
  bool contains(VarId v, int value) const;
  std::size_t domain_size(VarId v) const { return sizes_[v.index]; }
  bool is_assigned(VarId v) const { return assigned_flag_[v.index] != 0; }
  std::optional<int> value(VarId v) const;
  std::span<const Assignment> assigned() const { return assigned_; }
  bool wiped() const { return wiped_; }

  /// Values of real-valued auxiliaries computed by functional constraints.
  std::optional<double> output(std::size_t i) const;
  std::size_t output_count() const { return outputs_.size(); }

  /// Candidate values of `v` in ascending order, written into `out`.
  void values_into(VarId v, std::vector<int>& out) const;
  /// Same, as positions in the original domain.
  void indices_into(VarId v, std::vector<std::size_t>& out) const;

  /// Narrow a domain before any propagation (model-specific setups, tests).
  /// Values outside the current domain are ignored.
  void restrict(VarId v, const Domain& keep);

  /// Full store comparison: domains, assignment order, outputs, wipe flag.
  friend bool operator==(const SearchState& a, const SearchState& b);

 private:
  friend class Solver;

  bool has_index(VarId v, std::size_t idx) const {
    return (bits_[vars_->word_offset(v) + idx / 64] >> (idx % 64)) & 1u;
  }
  bool remove_index(VarId v, std::size_t idx);
  void fix(VarId v, int value, std::size_t idx);
  std::optional<int> singleton_value(VarId v) const;

  const VariableSet* vars_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint32_t> sizes_;
  std::vector<std::uint8_t> assigned_flag_;
  std::vector<int> assigned_value_;
  std::vector<Assignment> assigned_;
  std::vector<double> outputs_;
  std::vector<std::uint8_t> output_set_;
  bool wiped_ = false;
  bool propagated_ = false;

  // propagation scratch
  std::vector<VarId> modified_;
  std::vector<std::size_t> queue_;
  std::vector<std::uint8_t> queued_;
};

}  // namespace tdcp
