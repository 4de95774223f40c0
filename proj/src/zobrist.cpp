#include "tdcp/zobrist.hpp"

#include "tdcp/error.hpp"
#include "tdcp/rng.hpp"

namespace tdcp {

ZobristTable::ZobristTable(const VariableSet& vars, std::size_t table_size, std::uint64_t seed)
    : vars_(&vars), table_size_(table_size), seed_(seed) {
  if (table_size == 0) throw Error("hash table size must be positive");
  Rng rng(seed);
  offsets_.reserve(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    offsets_.push_back(codes_.size());
    for (std::size_t k = 0; k < vars.decl(i).domain.size(); ++k) codes_.push_back(rng.next());
  }
}

std::uint64_t ZobristTable::code(VarId v, int value) const {
  if (v.index >= offsets_.size()) throw ContractViolation("zobrist: unknown variable");
  const auto idx = vars_->index_of(v, value);
  if (!idx) {
    throw ContractViolation("zobrist: no code for " + vars_->decl(v).name + "=" + std::to_string(value));
  }
  return code_at(v, *idx);
}

std::uint64_t ZobristTable::raw_hash(std::span<const Assignment> assignments) const {
  std::uint64_t h = 0;
  for (const auto& a : assignments) h ^= code(a.var, a.value);
  return h;
}

}  // namespace tdcp
