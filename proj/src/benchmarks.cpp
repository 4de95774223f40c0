#include "tdcp/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "tdcp/error.hpp"
#include "tdcp/model_io.hpp"
#include "tdcp/rng.hpp"

namespace tdcp {

Model build_artificial(int n) {
  if (n < 2) throw Error("artificial benchmark needs N >= 2");
  ModelBuilder b;
  const Domain dom = Domain::range(1, n);
  Pmf uniform;
  for (int v = 1; v <= n; ++v) uniform.pairs.emplace_back(v, 1.0 / n);

  Stage stage;
  for (int i = 1; i <= n; ++i) stage.decisions.push_back(b.add_decision("d" + std::to_string(i), dom));
  for (int i = 1; i <= n; ++i) stage.randoms.push_back(b.add_random("r" + std::to_string(i), dom, uniform));
  b.add_constraint(AllDifferent{stage.decisions});

  Expectation e;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      e.terms.push_back({1.0, {ReifiedLe{stage.decisions[static_cast<std::size_t>(i)],
                                         stage.randoms[static_cast<std::size_t>(j)]}}});
    }
  }
  b.set_objective({Sense::maximize, std::move(e)});
  b.add_stage(std::move(stage));
  b.set_objective_bound(static_cast<double>(n) * (n - 1) / 2.0);
  return std::move(b).build();
}

long long DisasterOptions::resolved_budget(const Network& net) const {
  if (budget_level.has_value() == budget.has_value()) throw Error("disaster options: give exactly one budget");
  if (budget_level) {
    if (*budget_level < 1 || *budget_level > 3) throw Error("disaster options: budget level must be 1, 2 or 3");
    return net.budgets[static_cast<std::size_t>(*budget_level - 1)];
  }
  if (*budget <= 0) throw Error("disaster options: explicit budget must be positive");
  return *budget;
}

double DisasterOptions::resolved_penalty(const Network& net) const {
  if (penalty_level.has_value() == penalty.has_value()) throw Error("disaster options: give exactly one penalty");
  if (penalty_level) return *penalty_level == PenaltyLevel::low ? net.penalties.low : net.penalties.high;
  if (!(*penalty > 0.0)) throw Error("disaster options: explicit penalty must be positive");
  return *penalty;
}

Model build_disaster(const Network& net, const DisasterOptions& options) {
  validate(net);
  const long long budget = options.resolved_budget(net);
  const double penalty = options.resolved_penalty(net);

  ModelBuilder b;
  const Domain binary{0, 1};
  Stage stage;
  std::vector<long long> costs;
  for (const auto& l : net.links) {
    stage.decisions.push_back(b.add_decision("y" + std::to_string(l.id), binary));
    costs.push_back(l.cost);
  }
  for (std::size_t k = 0; k < net.links.size(); ++k) {
    const auto& l = net.links[k];
    // P(r_e = 0) = f_e = y_e (1 - q_e) + (1 - y_e)(1 - p_e)
    EndogenousPmf law{stage.decisions[k],
                      {{0, Pmf{{{0, 1.0 - l.p}, {1, l.p}}}}, {1, Pmf{{{0, 1.0 - l.q}, {1, l.q}}}}}};
    stage.randoms.push_back(b.add_random("r" + std::to_string(l.id), binary, std::move(law)));
  }
  const std::size_t z = b.add_output("z");

  b.add_constraint(LinearLe{costs, stage.decisions, budget});
  if (options.maximality) b.add_constraint(MaximalityGuard{costs, stage.decisions, budget});
  b.add_constraint(ShortestPathCost{std::make_shared<const Network>(net), penalty, stage.randoms, z});

  b.set_objective({Sense::minimize, Expectation{{Term{1.0, {OutputFactor{z}}}}}});
  if (options.permutation_seed) {
    Rng rng(mix_seed(*options.permutation_seed, 0x9e2));
    auto& dec = stage.decisions;
    for (std::size_t i = dec.size(); i > 1; --i) std::swap(dec[i - 1], dec[rng.below(i)]);
  }
  b.add_stage(std::move(stage));
  b.set_objective_bound(static_cast<double>(net.od_pairs.size()) * std::max(penalty, net.total_length()));
  return std::move(b).build();
}

std::vector<std::string> disaster_warnings(const Network& net, const DisasterOptions& options) {
  std::vector<std::string> out;
  const double penalty = options.resolved_penalty(net);
  if (penalty <= net.total_length()) {
    std::ostringstream os;
    os << "penalty M=" << penalty << " does not exceed the total link length " << net.total_length()
       << "; a connected pair may cost more than a disconnected one";
    out.push_back(os.str());
  }
  return out;
}

namespace {

[[noreturn]] void yaml_fail(const YAML::Node& node, const std::string& what) {
  const auto mark = node.Mark();
  if (mark.line >= 0) throw Error("network: " + what + " (line " + std::to_string(mark.line + 1) + ")");
  throw Error("network: " + what);
}

const YAML::Node require(const YAML::Node& parent, const char* key, const std::string& where) {
  if (!parent.IsMap()) yaml_fail(parent, where + " must be a mapping");
  const YAML::Node n = parent[key];
  if (!n) yaml_fail(parent, "missing field '" + std::string(key) + "' in " + where);
  return n;
}

template <class T>
T scalar(const YAML::Node& parent, const char* key, const std::string& where) {
  const YAML::Node n = require(parent, key, where);
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    yaml_fail(n, "field '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

Network network_from_yaml(const YAML::Node& root) {
  if (!root.IsMap()) throw Error("network: document must be a mapping");
  if (root["version"]) {
    const int version = scalar<int>(root, "version", "network");
    if (version != kNetworkFormatVersion) yaml_fail(root["version"], "unsupported version " + std::to_string(version));
  }
  Network net;
  const YAML::Node nodes = require(root, "nodes", "network");
  if (!nodes.IsSequence()) yaml_fail(nodes, "field 'nodes' must be a list");
  for (const auto& n : nodes) {
    try {
      net.nodes.push_back(n.as<int>());
    } catch (const YAML::Exception&) {
      yaml_fail(n, "field 'nodes' entries must be integers");
    }
  }
  const YAML::Node links = require(root, "links", "network");
  if (!links.IsSequence()) yaml_fail(links, "field 'links' must be a list");
  for (const auto& l : links) {
    net.links.push_back({scalar<int>(l, "id", "link"), scalar<int>(l, "from", "link"), scalar<int>(l, "to", "link"),
                         scalar<double>(l, "t", "link"), scalar<long long>(l, "c", "link"),
                         scalar<double>(l, "p", "link"), scalar<double>(l, "q", "link")});
  }
  const YAML::Node ods = require(root, "od_pairs", "network");
  if (!ods.IsSequence()) yaml_fail(ods, "field 'od_pairs' must be a list");
  for (const auto& od : ods) net.od_pairs.push_back({scalar<int>(od, "from", "od_pair"), scalar<int>(od, "to", "od_pair")});
  const YAML::Node budgets = require(root, "budgets", "network");
  if (!budgets.IsSequence() || budgets.size() != 3) yaml_fail(budgets, "field 'budgets' must list three levels");
  for (std::size_t i = 0; i < 3; ++i) {
    try {
      net.budgets[i] = budgets[i].as<long long>();
    } catch (const YAML::Exception&) {
      yaml_fail(budgets[i], "field 'budgets' entries must be integers");
    }
  }
  const YAML::Node pen = require(root, "penalties", "network");
  net.penalties = {scalar<double>(pen, "low", "penalties"), scalar<double>(pen, "high", "penalties")};
  validate(net);
  return net;
}

}  // namespace

Network parse_network(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error("network: syntax error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  return network_from_yaml(root);
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open network file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

std::string network_to_string(const Network& net) { return network_to_json(net).dump(2) + "\n"; }

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write network file " + path.string());
  out << network_to_string(net);
}

Network gen_network(int n, int m, std::uint64_t seed) {
  if (n < 2) throw Error("gen_network: need at least two nodes");
  if (m < n - 1) throw Error("gen_network: need m >= n - 1 links for connectivity");
  if (static_cast<long long>(m) > static_cast<long long>(n) * (n - 1) / 2) {
    throw Error("gen_network: too many links for a simple graph");
  }
  Rng rng(mix_seed(seed, 0x6e7));
  Network net;
  for (int v = 1; v <= n; ++v) net.nodes.push_back(v);

  std::set<std::pair<int, int>> used;
  auto add = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    if (!used.insert({a, b}).second) return false;
    Link l;
    l.id = static_cast<int>(net.links.size()) + 1;
    l.from = a;
    l.to = b;
    l.length = static_cast<double>(1 + rng.below(10));
    l.cost = static_cast<long long>(1 + rng.below(10));
    l.p = 0.30 + 0.05 * static_cast<double>(rng.below(11));  // 0.30 .. 0.80
    l.q = std::min(0.99, l.p + 0.10 + 0.05 * static_cast<double>(rng.below(5)));
    net.links.push_back(l);
    return true;
  };
  // Random spanning tree first, then extra links.
  for (int v = 2; v <= n; ++v) add(v, 1 + static_cast<int>(rng.below(static_cast<std::size_t>(v - 1))));
  while (static_cast<int>(net.links.size()) < m) {
    const int a = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(n)));
    const int b = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(n)));
    if (a != b) add(a, b);
  }

  const int pairs = std::min(5, n * (n - 1) / 2);
  std::set<std::pair<int, int>> ods;
  while (static_cast<int>(ods.size()) < pairs) {
    const int a = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(n)));
    const int b = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(n)));
    if (a == b || ods.count({b, a})) continue;
    if (ods.insert({a, b}).second) net.od_pairs.push_back({a, b});
  }

  const long long total = net.total_cost();
  net.budgets = {std::max(1LL, total / 4), std::max(2LL, total / 2), std::max(3LL, 3 * total / 4)};
  for (std::size_t i = 1; i < 3; ++i) net.budgets[i] = std::max(net.budgets[i], net.budgets[i - 1] + 1);
  const double low = std::ceil(net.total_length()) + 1.0;
  net.penalties = {low, 3.0 * low};
  validate(net);
  return net;
}

}  // namespace tdcp
