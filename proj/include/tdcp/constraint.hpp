#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "tdcp/domain.hpp"
#include "tdcp/network.hpp"

namespace tdcp {

struct AllDifferent {
  std::vector<VarId> vars;
};

/// sum(coeffs[i] * vars[i]) <= bound
struct LinearLe {
  std::vector<long long> coeffs;
  std::vector<VarId> vars;
  long long bound = 0;
};

/// lhs <= rhs; only evaluated inside objectives.
struct ReifiedLe {
  VarId lhs;
  VarId rhs;
};

/// Over 0/1 variables: for every i, vars[i] = 1 or spent + costs[i] > budget,
/// where spent = sum(costs[j] * vars[j]).
struct MaximalityGuard {
  std::vector<long long> costs;
  std::vector<VarId> vars;
  long long budget = 0;
};

/// Suspended until every link variable is fixed; then writes the summed
/// OD shortest-path length (penalty per disconnected pair) into `output`.
struct ShortestPathCost {
  std::shared_ptr<const Network> network;
  double penalty = 0.0;
  std::vector<VarId> links;  // aligned with network->links
  std::size_t output = 0;
};

using ConstraintSpec = std::variant<AllDifferent, LinearLe, ReifiedLe, MaximalityGuard, ShortestPathCost>;

std::string kind_name(const ConstraintSpec& c);
std::vector<VarId> scope(const ConstraintSpec& c);

/// Evaluate on a total assignment. `values` is indexed by variable index.
/// ShortestPathCost is functional and always holds.
bool holds(const ConstraintSpec& c, std::span<const int> values);

}  // namespace tdcp
