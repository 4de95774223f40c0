#include "tdcp/domain.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

#include "tdcp/error.hpp"

namespace tdcp {

Domain::Domain(std::initializer_list<int> values) : Domain(std::vector<int>(values)) {}

Domain::Domain(std::vector<int> values) : values_(std::move(values)) {
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (values_[i - 1] >= values_[i]) {
      throw Error("domain values must be strictly ascending: " + to_string());
    }
  }
}

Domain Domain::range(int lo, int hi) {
  std::vector<int> v;
  for (int x = lo; x <= hi; ++x) v.push_back(x);
  return Domain(std::move(v));
}

bool Domain::contains(int v) const { return std::binary_search(values_.begin(), values_.end(), v); }

std::optional<std::size_t> Domain::index_of(int v) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), v);
  if (it == values_.end() || *it != v) return std::nullopt;
  return static_cast<std::size_t>(it - values_.begin());
}

std::string Domain::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < values_.size(); ++i) os << (i ? "," : "") << values_[i];
  os << '}';
  return os.str();
}

VariableSet::VariableSet(std::vector<VariableDecl> decls) : decls_(std::move(decls)) {
  offsets_.reserve(decls_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t i = 0; i < decls_.size(); ++i) {
    const auto& d = decls_[i];
    if (d.domain.empty()) throw Error("variable '" + d.name + "' has an empty domain");
    for (std::size_t j = 0; j < i; ++j) {
      if (decls_[j].name == d.name) throw Error("duplicate variable name '" + d.name + "'");
    }
    offsets_.push_back(offsets_.back() + (d.domain.size() + 63) / 64);
    const bool contiguous =
        static_cast<long long>(d.domain.max()) - d.domain.min() + 1 ==
        static_cast<long long>(d.domain.size());
    contiguous_min_.push_back(contiguous ? d.domain.min() : INT_MIN);
  }
}

std::optional<VarId> VariableSet::find(std::string_view name) const {
  for (std::size_t i = 0; i < decls_.size(); ++i) {
    if (decls_[i].name == name) return id(i);
  }
  return std::nullopt;
}

VarId VariableSet::require(std::string_view name) const {
  if (auto v = find(name)) return *v;
  throw Error("unknown variable '" + std::string(name) + "'");
}

std::optional<std::size_t> VariableSet::index_of(VarId v, int value) const {
  const int lo = contiguous_min_[v.index];
  if (lo != INT_MIN) {
    const long long idx = static_cast<long long>(value) - lo;
    if (idx < 0 || idx >= static_cast<long long>(decls_[v.index].domain.size())) return std::nullopt;
    return static_cast<std::size_t>(idx);
  }
  return decls_[v.index].domain.index_of(value);
}

std::vector<VarId> VariableSet::decision_vars() const {
  std::vector<VarId> out;
  for (std::size_t i = 0; i < decls_.size(); ++i) {
    if (decls_[i].kind == VarKind::decision) out.push_back(id(i));
  }
  return out;
}

std::vector<VarId> VariableSet::random_vars() const {
  std::vector<VarId> out;
  for (std::size_t i = 0; i < decls_.size(); ++i) {
    if (decls_[i].kind == VarKind::random) out.push_back(id(i));
  }
  return out;
}

bool operator==(const VariableDecl& a, const VariableDecl& b) {
  return a.name == b.name && a.kind == b.kind && a.domain == b.domain;
}

bool operator==(const VariableSet& a, const VariableSet& b) { return a.decls_ == b.decls_; }

}  // namespace tdcp
