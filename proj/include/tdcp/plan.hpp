#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tdcp/domain.hpp"

namespace tdcp {

class Model;

/// Complete first-stage decision assignment with its estimated and, when
/// computable, exact objective.
struct Plan {
  std::vector<Assignment> decisions;  // ascending variable index
  double estimated = 0.0;
  double estimate_stderr = 0.0;
  std::optional<double> exact;

  int value_of(VarId v) const;
  /// Values in ascending variable order, for display.
  std::vector<int> values() const;
};

std::string plan_to_string(const Model& model, const Plan& plan);

}  // namespace tdcp
