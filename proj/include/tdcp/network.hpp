#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tdcp {

/// Undirected transport link. `p` is the survival probability without
/// investment, `q` with investment.
struct Link {
  int id = 0;
  int from = 0;
  int to = 0;
  double length = 0.0;
  long long cost = 0;
  double p = 0.0;
  double q = 0.0;

  friend bool operator==(const Link&, const Link&) = default;
};

struct OdPair {
  int from = 0;
  int to = 0;

  friend bool operator==(const OdPair&, const OdPair&) = default;
};

struct Penalties {
  double low = 0.0;
  double high = 0.0;

  friend bool operator==(const Penalties&, const Penalties&) = default;
};

struct Network {
  std::vector<int> nodes;
  std::vector<Link> links;
  std::vector<OdPair> od_pairs;
  std::array<long long, 3> budgets{};
  Penalties penalties;

  double total_length() const;
  long long total_cost() const;
  std::size_t link_position(int link_id) const;

  friend bool operator==(const Network&, const Network&) = default;
};

/// Throws tdcp::Error naming the offending link or field.
void validate(const Network& net);

/// Dijkstra over surviving links, summed over every OD pair; a disconnected
/// pair contributes `penalty` instead of a path length.
class ShortestPathEvaluator {
 public:
  explicit ShortestPathEvaluator(const Network& net);

  /// `alive[k]` refers to net.links[k].
  double total_cost(std::span<const std::uint8_t> alive, double penalty) const;

  /// Distance from OD source to sink, or nullopt-like infinity when cut off.
  double distance(int from_node, int to_node, std::span<const std::uint8_t> alive) const;

 private:
  struct Arc {
    std::size_t to;
    std::size_t link;
    double length;
  };
  std::size_t node_index(int node) const;
  void run(std::size_t source, std::span<const std::uint8_t> alive, std::vector<double>& dist) const;

  std::vector<int> nodes_;
  std::vector<std::vector<Arc>> adjacency_;
  std::vector<std::pair<std::size_t, std::size_t>> od_;
};

double shortest_path_cost(const Network& net, std::span<const std::uint8_t> alive, double penalty);

}  // namespace tdcp
