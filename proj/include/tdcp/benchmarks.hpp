#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tdcp/model.hpp"
#include "tdcp/network.hpp"

namespace tdcp {

/// N decisions and N uniform random variables over {1..N}; alldifferent on
/// the decisions; maximise sum_{i<j} E[reify(d_i <= r_j)].
Model build_artificial(int n);

enum class PenaltyLevel : std::uint8_t { low, high };

struct DisasterOptions {
  /// Exactly one of budget_level (1..3) or budget.
  std::optional<int> budget_level = 1;
  std::optional<long long> budget;
  /// Exactly one of penalty_level or penalty.
  std::optional<PenaltyLevel> penalty_level = PenaltyLevel::low;
  std::optional<double> penalty;
  bool maximality = false;
  std::optional<std::uint64_t> permutation_seed;

  long long resolved_budget(const Network& net) const;
  double resolved_penalty(const Network& net) const;
};

/// Two-stage pre-disaster investment model: y_e (invest), r_e (survives,
/// endogenous pmf), budget, optional maximality guard, and the suspended
/// shortest-path recourse writing z. Minimises E[z].
Model build_disaster(const Network& net, const DisasterOptions& options);

/// Non-fatal remarks about the options (e.g. a penalty below a feasible
/// path length).
std::vector<std::string> disaster_warnings(const Network& net, const DisasterOptions& options);

/// Reads the structured text network format (YAML; JSON is accepted).
/// Errors name the field and line, or the offending link id.
Network load_network(const std::filesystem::path& path);
Network parse_network(const std::string& text);
std::string network_to_string(const Network& net);
void save_network(const Network& net, const std::filesystem::path& path);

/// Seeded connected network with n nodes and m links (m >= n - 1).
Network gen_network(int n, int m, std::uint64_t seed);

}  // namespace tdcp
