#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tdcp {

enum class VarKind : std::uint8_t { decision, random };

/// Index into the model's single variable space (V and S share it).
struct VarId {
  std::uint32_t index = 0;
  VarKind kind = VarKind::decision;

  friend bool operator==(const VarId&, const VarId&) = default;
  friend auto operator<=>(const VarId& a, const VarId& b) { return a.index <=> b.index; }
};

struct Assignment {
  VarId var;
  int value = 0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Finite set of integers kept strictly ascending. An empty domain is a
/// wiped-out domain.
class Domain {
 public:
  Domain() = default;
  Domain(std::initializer_list<int> values);
  explicit Domain(std::vector<int> values);

  static Domain range(int lo, int hi);

  bool empty() const { return values_.empty(); }
  bool wiped() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }
  bool contains(int v) const;
  std::optional<std::size_t> index_of(int v) const;
  int operator[](std::size_t i) const { return values_[i]; }
  int min() const { return values_.front(); }
  int max() const { return values_.back(); }
  std::span<const int> values() const { return values_; }

  std::string to_string() const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  std::vector<int> values_;
};

struct VariableDecl {
  std::string name;
  VarKind kind = VarKind::decision;
  Domain domain;
};

/// Immutable variable table. Besides names and original domains it fixes
/// the bit layout every SearchState uses for its domain store.
class VariableSet {
 public:
  VariableSet() = default;
  explicit VariableSet(std::vector<VariableDecl> decls);

  std::size_t size() const { return decls_.size(); }
  const VariableDecl& decl(VarId v) const { return decls_.at(v.index); }
  const VariableDecl& decl(std::size_t i) const { return decls_.at(i); }
  std::span<const VariableDecl> decls() const { return decls_; }
  VarId id(std::size_t i) const { return {static_cast<std::uint32_t>(i), decls_.at(i).kind}; }
  std::optional<VarId> find(std::string_view name) const;
  VarId require(std::string_view name) const;

  const Domain& original(VarId v) const { return decls_[v.index].domain; }
  std::size_t word_offset(VarId v) const { return offsets_[v.index]; }
  std::size_t word_count(VarId v) const { return offsets_[v.index + 1] - offsets_[v.index]; }
  std::size_t total_words() const { return offsets_.empty() ? 0 : offsets_.back(); }

  /// Position of `value` in v's original domain.
  std::optional<std::size_t> index_of(VarId v, int value) const;
  int value_at(VarId v, std::size_t idx) const { return decls_[v.index].domain[idx]; }

  std::vector<VarId> decision_vars() const;
  std::vector<VarId> random_vars() const;

  friend bool operator==(const VariableSet& a, const VariableSet& b);

 private:
  std::vector<VariableDecl> decls_;
  std::vector<std::size_t> offsets_;
  std::vector<int> contiguous_min_;  // INT_MIN when the domain has holes
};

bool operator==(const VariableDecl& a, const VariableDecl& b);

}  // namespace tdcp
