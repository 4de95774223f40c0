#include "tdcp/search_state.hpp"

#include <bit>
#include <cmath>

#include "tdcp/error.hpp"

namespace tdcp {

SearchState::SearchState(const VariableSet& vars, std::size_t output_count)
    : vars_(&vars),
      bits_(vars.total_words(), 0),
      sizes_(vars.size()),
      assigned_flag_(vars.size(), 0),
      assigned_value_(vars.size(), 0),
      outputs_(output_count, 0.0),
      output_set_(output_count, 0) {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const VarId v = vars.id(i);
    const std::size_t n = vars.original(v).size();
    sizes_[i] = static_cast<std::uint32_t>(n);
    auto* w = bits_.data() + vars.word_offset(v);
    for (std::size_t k = 0; k < n; ++k) w[k / 64] |= std::uint64_t{1} << (k % 64);
  }
  assigned_.reserve(vars.size());
}

Domain SearchState::domain(VarId v) const {
  std::vector<int> out;
  values_into(v, out);
  return Domain(std::move(out));
}

void SearchState::values_into(VarId v, std::vector<int>& out) const {
  out.clear();
  const auto& orig = vars_->original(v);
  const auto* w = bits_.data() + vars_->word_offset(v);
  for (std::size_t k = 0; k < vars_->word_count(v); ++k) {
    std::uint64_t word = w[k];
    while (word) {
      const int bit = std::countr_zero(word);
      out.push_back(orig[k * 64 + static_cast<std::size_t>(bit)]);
      word &= word - 1;
    }
  }
}

void SearchState::indices_into(VarId v, std::vector<std::size_t>& out) const {
  out.clear();
  const auto* w = bits_.data() + vars_->word_offset(v);
  for (std::size_t k = 0; k < vars_->word_count(v); ++k) {
    std::uint64_t word = w[k];
    while (word) {
      out.push_back(k * 64 + static_cast<std::size_t>(std::countr_zero(word)));
      word &= word - 1;
    }
  }
}

bool SearchState::contains(VarId v, int value) const {
  auto idx = vars_->index_of(v, value);
  return idx && has_index(v, *idx);
}

std::optional<int> SearchState::value(VarId v) const {
  if (!is_assigned(v)) return std::nullopt;
  return assigned_value_[v.index];
}

std::optional<double> SearchState::output(std::size_t i) const {
  if (!output_set_.at(i)) return std::nullopt;
  return outputs_[i];
}

void SearchState::restrict(VarId v, const Domain& keep) {
  const auto& orig = vars_->original(v);
  for (std::size_t k = 0; k < orig.size(); ++k) {
    if (!keep.contains(orig[k])) remove_index(v, k);
  }
}

bool SearchState::remove_index(VarId v, std::size_t idx) {
  auto& word = bits_[vars_->word_offset(v) + idx / 64];
  const std::uint64_t mask = std::uint64_t{1} << (idx % 64);
  if (!(word & mask)) return false;
  word &= ~mask;
  if (--sizes_[v.index] == 0) wiped_ = true;
  return true;
}

void SearchState::fix(VarId v, int value, std::size_t idx) {
  auto* w = bits_.data() + vars_->word_offset(v);
  for (std::size_t k = 0; k < vars_->word_count(v); ++k) w[k] = 0;
  w[idx / 64] = std::uint64_t{1} << (idx % 64);
  sizes_[v.index] = 1;
  assigned_flag_[v.index] = 1;
  assigned_value_[v.index] = value;
  assigned_.push_back({v, value});
}

std::optional<int> SearchState::singleton_value(VarId v) const {
  if (sizes_[v.index] != 1) return std::nullopt;
  const auto* w = bits_.data() + vars_->word_offset(v);
  for (std::size_t k = 0; k < vars_->word_count(v); ++k) {
    if (w[k]) return vars_->value_at(v, k * 64 + static_cast<std::size_t>(std::countr_zero(w[k])));
  }
  return std::nullopt;
}

bool operator==(const SearchState& a, const SearchState& b) {
  if (a.wiped_ != b.wiped_ || a.assigned_ != b.assigned_ || a.output_set_ != b.output_set_) return false;
  if (a.bits_ != b.bits_) return false;
  for (std::size_t i = 0; i < a.outputs_.size(); ++i) {
    if (a.output_set_[i] && a.outputs_[i] != b.outputs_[i]) return false;
  }
  return true;
}

}  // namespace tdcp
