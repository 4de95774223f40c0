#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tdcp/domain.hpp"

namespace tdcp {

/// One fixed 64-bit code per (variable, value) pair. A state's slot is the
/// XOR of the codes of its assignments, reduced modulo the table size.
class ZobristTable {
 public:
  ZobristTable(const VariableSet& vars, std::size_t table_size, std::uint64_t seed);

  std::uint64_t code(VarId v, int value) const;
  std::uint64_t code_at(VarId v, std::size_t value_index) const { return codes_[offsets_[v.index] + value_index]; }

  std::size_t table_size() const { return table_size_; }
  std::uint64_t seed() const { return seed_; }

  std::uint64_t raw_hash(std::span<const Assignment> assignments) const;
  std::size_t slot(std::uint64_t raw) const { return static_cast<std::size_t>(raw % table_size_); }
  std::size_t state_hash(std::span<const Assignment> assignments) const { return slot(raw_hash(assignments)); }

 private:
  const VariableSet* vars_;
  std::vector<std::uint64_t> codes_;
  std::vector<std::size_t> offsets_;
  std::size_t table_size_;
  std::uint64_t seed_;
};

}  // namespace tdcp
