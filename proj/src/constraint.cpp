#include "tdcp/constraint.hpp"

#include <set>

namespace tdcp {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
}  // namespace

std::string kind_name(const ConstraintSpec& c) {
  return std::visit(overloaded{
                        [](const AllDifferent&) { return std::string("alldifferent"); },
                        [](const LinearLe&) { return std::string("linear_le"); },
                        [](const ReifiedLe&) { return std::string("reified_le"); },
                        [](const MaximalityGuard&) { return std::string("maximality_guard"); },
                        [](const ShortestPathCost&) { return std::string("shortest_path_cost"); },
                    },
                    c);
}

std::vector<VarId> scope(const ConstraintSpec& c) {
  return std::visit(overloaded{
                        [](const AllDifferent& a) { return a.vars; },
                        [](const LinearLe& l) { return l.vars; },
                        [](const ReifiedLe& r) { return std::vector<VarId>{r.lhs, r.rhs}; },
                        [](const MaximalityGuard& g) { return g.vars; },
                        [](const ShortestPathCost& s) { return s.links; },
                    },
                    c);
}

bool holds(const ConstraintSpec& c, std::span<const int> values) {
  return std::visit(
      overloaded{
          [&](const AllDifferent& a) {
            std::set<int> seen;
            for (auto v : a.vars) {
              if (!seen.insert(values[v.index]).second) return false;
            }
            return true;
          },
          [&](const LinearLe& l) {
            long long s = 0;
            for (std::size_t i = 0; i < l.vars.size(); ++i) s += l.coeffs[i] * values[l.vars[i].index];
            return s <= l.bound;
          },
          [&](const ReifiedLe& r) { return values[r.lhs.index] <= values[r.rhs.index]; },
          [&](const MaximalityGuard& g) {
            long long spent = 0;
            for (std::size_t i = 0; i < g.vars.size(); ++i) spent += g.costs[i] * values[g.vars[i].index];
            for (std::size_t i = 0; i < g.vars.size(); ++i) {
              if (values[g.vars[i].index] == 0 && spent + g.costs[i] <= g.budget) return false;
            }
            return true;
          },
          [](const ShortestPathCost&) { return true; },
      },
      c);
}

}  // namespace tdcp
