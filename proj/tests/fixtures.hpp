#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tdcp/benchmarks.hpp"
#include "tdcp/model.hpp"
#include "tdcp/network.hpp"
#include "tdcp/solver.hpp"

namespace fixtures {

using namespace tdcp;

inline std::shared_ptr<const VariableSet> decisions(std::vector<Domain> doms) {
  std::vector<VariableDecl> decls;
  for (std::size_t i = 0; i < doms.size(); ++i) {
    decls.push_back({"x" + std::to_string(i), VarKind::decision, std::move(doms[i])});
  }
  return std::make_shared<const VariableSet>(std::move(decls));
}

inline VarId dv(std::uint32_t i) { return {i, VarKind::decision}; }

/// Two parallel links between nodes 1 and 2: t=(1,2), c=(1,1),
/// p=(0.5,0.5), q=(0.9,0.9), one OD pair, B1=1, M_low=10.
inline Network toy_network() {
  Network net;
  net.nodes = {1, 2};
  net.links = {{1, 1, 2, 1.0, 1, 0.5, 0.9}, {2, 1, 2, 2.0, 1, 0.5, 0.9}};
  net.od_pairs = {{1, 2}};
  net.budgets = {1, 2, 3};
  net.penalties = {10.0, 30.0};
  return net;
}

inline Model toy_model(bool maximal = false) {
  DisasterOptions o;
  o.maximality = maximal;
  return build_disaster(toy_network(), o);
}

/// Decision `a` in {1}, `b` in {1} under AllDifferent, plus one random
/// variable: every episode wipes out on its first assignment.
inline Model doomed_model() {
  ModelBuilder b;
  const VarId a = b.add_decision("a", Domain{1});
  const VarId c = b.add_decision("b", Domain{1});
  const VarId r = b.add_random("r", Domain{0, 1}, Pmf{{{0, 0.5}, {1, 0.5}}});
  b.add_constraint(AllDifferent{{a, c}});
  b.set_objective({Sense::maximize, Expectation{{{1.0, {VarFactor{r}}}}}});
  b.add_stage({{a, c}, {r}});
  b.set_objective_bound(1.0);
  return std::move(b).build();
}

/// x in {0,1}, r in {0,1} with x + r <= 1: choosing x=1 prunes r before it
/// is sampled.
inline Model integrity_model() {
  ModelBuilder b;
  const VarId x = b.add_decision("x", Domain{0, 1});
  const VarId r = b.add_random("r", Domain{0, 1}, Pmf{{{0, 0.5}, {1, 0.5}}});
  b.add_constraint(LinearLe{{1, 1}, {x, r}, 1});
  b.set_objective({Sense::maximize, Expectation{{{1.0, {VarFactor{r}}}}}});
  b.add_stage({{x}, {r}});
  b.set_objective_bound(1.0);
  return std::move(b).build();
}

}  // namespace fixtures
