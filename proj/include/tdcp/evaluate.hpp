#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tdcp/error.hpp"
#include "tdcp/model.hpp"
#include "tdcp/plan.hpp"

namespace tdcp {

inline constexpr std::uint64_t kDefaultScenarioLimit = std::uint64_t{1} << 20;
inline constexpr std::uint64_t kDefaultAssignmentLimit = 1'000'000;

/// Raised when an enumeration would exceed its configured limit.
class LimitExceeded : public Error {
 public:
  LimitExceeded(const std::string& what, std::uint64_t count, std::uint64_t limit)
      : Error(what), count_(count), limit_(limit) {}
  std::uint64_t count() const { return count_; }
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t count_;
  std::uint64_t limit_;
};

/// Hard-constraint violations of a plan, one message per constraint; empty
/// when feasible. Only constraints over decision variables are checked.
std::vector<std::string> check_plan(const Model& model, std::span<const Assignment> decisions);

struct ExactResult {
  double value = 0.0;
  double probability_mass = 0.0;
  std::uint64_t scenarios = 0;
};

/// Sum over every scenario of probability times objective. Scenarios are
/// enumerated lexicographically over the random variables in declaration
/// order. Throws LimitExceeded past `scenario_limit`.
ExactResult exact_eval_detail(const Model& model, std::span<const Assignment> decisions,
                              std::uint64_t scenario_limit = kDefaultScenarioLimit);
double exact_eval(const Model& model, std::span<const Assignment> decisions,
                  std::uint64_t scenario_limit = kDefaultScenarioLimit);

struct McResult {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::uint64_t samples = 0;
};

McResult mc_eval(const Model& model, std::span<const Assignment> decisions, std::uint64_t samples,
                 std::uint64_t seed);

/// Expected objective of the artificial benchmark for permutation `d`:
/// sum_i (N - i) (N - d_i + 1) / N.
double closed_form_artificial(int n, std::span<const int> d);

struct OptimumResult {
  Plan plan;
  double value = 0.0;
  std::uint64_t feasible_plans = 0;
};

struct EnumerationLimits {
  std::uint64_t assignments = kDefaultAssignmentLimit;
  std::uint64_t scenarios = kDefaultScenarioLimit;
};

/// Exact optimum over every hard-feasible decision assignment; ties go to
/// the lexicographically first assignment.
OptimumResult exhaustive_opt(const Model& model, EnumerationLimits limits = {});

}  // namespace tdcp
