#include "tdcp/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <set>

#include "tdcp/error.hpp"

namespace tdcp {

double Network::total_length() const {
  double s = 0.0;
  for (const auto& l : links) s += l.length;
  return s;
}

long long Network::total_cost() const {
  long long s = 0;
  for (const auto& l : links) s += l.cost;
  return s;
}

std::size_t Network::link_position(int link_id) const {
  for (std::size_t k = 0; k < links.size(); ++k) {
    if (links[k].id == link_id) return k;
  }
  throw Error("unknown link id " + std::to_string(link_id));
}

void validate(const Network& net) {
  std::set<int> nodes(net.nodes.begin(), net.nodes.end());
  if (nodes.size() != net.nodes.size()) throw Error("nodes: duplicate node id");
  if (net.links.empty()) throw Error("links: at least one link required");
  std::set<int> ids;
  for (const auto& l : net.links) {
    const std::string tag = "link " + std::to_string(l.id) + ": ";
    if (!ids.insert(l.id).second) throw Error(tag + "duplicate id");
    if (!nodes.count(l.from) || !nodes.count(l.to)) throw Error(tag + "endpoint is not a declared node");
    if (!(l.length >= 0.0)) throw Error(tag + "negative length t");
    if (l.cost < 0) throw Error(tag + "negative cost c");
    if (!(l.p >= 0.0 && l.p <= 1.0)) throw Error(tag + "p outside [0,1]");
    if (!(l.q >= 0.0 && l.q <= 1.0)) throw Error(tag + "q outside [0,1]");
    if (l.q < l.p) throw Error(tag + "q < p (investment cannot reduce survival)");
  }
  if (net.od_pairs.empty()) throw Error("od_pairs: at least one pair required");
  for (std::size_t i = 0; i < net.od_pairs.size(); ++i) {
    const auto& od = net.od_pairs[i];
    if (!nodes.count(od.from) || !nodes.count(od.to)) {
      throw Error("od_pairs[" + std::to_string(i) + "]: endpoint is not a declared node");
    }
  }
  if (!(net.budgets[0] < net.budgets[1] && net.budgets[1] < net.budgets[2])) {
    throw Error("budgets: must be strictly ascending");
  }
  if (net.budgets[0] <= 0) throw Error("budgets: must be positive");
  if (!(net.penalties.low > 0.0 && net.penalties.low < net.penalties.high)) {
    throw Error("penalties: need 0 < low < high");
  }
}

ShortestPathEvaluator::ShortestPathEvaluator(const Network& net) : nodes_(net.nodes) {
  std::sort(nodes_.begin(), nodes_.end());
  adjacency_.resize(nodes_.size());
  for (std::size_t k = 0; k < net.links.size(); ++k) {
    const auto& l = net.links[k];
    const auto a = node_index(l.from);
    const auto b = node_index(l.to);
    adjacency_[a].push_back({b, k, l.length});
    adjacency_[b].push_back({a, k, l.length});
  }
  for (const auto& od : net.od_pairs) od_.emplace_back(node_index(od.from), node_index(od.to));
}

std::size_t ShortestPathEvaluator::node_index(int node) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
  if (it == nodes_.end() || *it != node) throw Error("unknown node " + std::to_string(node));
  return static_cast<std::size_t>(it - nodes_.begin());
}

void ShortestPathEvaluator::run(std::size_t source, std::span<const std::uint8_t> alive,
                                std::vector<double>& dist) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  dist.assign(nodes_.size(), inf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& arc : adjacency_[u]) {
      if (!alive[arc.link]) continue;
      const double nd = d + arc.length;
      if (nd < dist[arc.to]) {
        dist[arc.to] = nd;
        heap.emplace(nd, arc.to);
      }
    }
  }
}

double ShortestPathEvaluator::total_cost(std::span<const std::uint8_t> alive, double penalty) const {
  std::vector<double> dist;
  std::size_t last_source = static_cast<std::size_t>(-1);
  double total = 0.0;
  for (const auto& [s, t] : od_) {
    if (s != last_source) {
      run(s, alive, dist);
      last_source = s;
    }
    total += std::isinf(dist[t]) ? penalty : dist[t];
  }
  return total;
}

double ShortestPathEvaluator::distance(int from_node, int to_node,
                                       std::span<const std::uint8_t> alive) const {
  std::vector<double> dist;
  run(node_index(from_node), alive, dist);
  return dist[node_index(to_node)];
}

double shortest_path_cost(const Network& net, std::span<const std::uint8_t> alive, double penalty) {
  if (alive.size() != net.links.size()) {
    throw ContractViolation("scenario must assign every link");
  }
  return ShortestPathEvaluator(net).total_cost(alive, penalty);
}

}  // namespace tdcp
