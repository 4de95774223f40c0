#include "tdcp/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tdcp/error.hpp"
#include "tdcp/rng.hpp"

namespace tdcp {

namespace {

std::vector<int> decision_values(const Model& model, std::span<const Assignment> decisions) {
  const auto& vars = model.variables();
  std::vector<int> values(vars.size(), 0);
  std::vector<std::uint8_t> seen(vars.size(), 0);
  for (const auto& a : decisions) {
    if (a.var.index >= vars.size() || vars.decl(a.var).kind != VarKind::decision) {
      throw ContractViolation("plan assigns a non-decision variable");
    }
    if (!vars.original(a.var).contains(a.value)) {
      throw ContractViolation("plan value " + std::to_string(a.value) + " outside the domain of '" +
                              vars.decl(a.var).name + "'");
    }
    values[a.var.index] = a.value;
    seen[a.var.index] = 1;
  }
  for (VarId d : model.decision_vars()) {
    if (!seen[d.index]) throw ContractViolation("plan leaves decision variable '" + vars.decl(d).name + "' unset");
  }
  return values;
}

bool outputs_depend_on_randoms_only(const Model& model) {
  for (const auto& c : model.constraints()) {
    if (const auto* sp = std::get_if<ShortestPathCost>(&c)) {
      for (VarId v : sp->links) {
        if (v.kind != VarKind::random) return false;
      }
    }
  }
  return true;
}

void require_scenario_limit(const Model& model, std::uint64_t limit) {
  const auto count = model.scenario_count();
  if (count > limit) {
    throw LimitExceeded("scenario count " + std::to_string(count) + " exceeds the exact-evaluation limit " +
                            std::to_string(limit) + "; use Monte Carlo evaluation instead",
                        count, limit);
  }
}

/// Walks every scenario in lexicographic order, writing random values into
/// `values` and calling f(scenario_index).
template <class F>
void for_each_scenario(const Model& model, std::vector<int>& values, F&& f) {
  const auto randoms = model.random_vars();
  const auto& vars = model.variables();
  std::vector<std::size_t> digit(randoms.size(), 0);
  for (VarId r : randoms) values[r.index] = vars.value_at(r, 0);
  const std::uint64_t count = model.scenario_count();
  for (std::uint64_t s = 0; s < count; ++s) {
    f(s);
    for (std::size_t k = randoms.size(); k-- > 0;) {
      const VarId r = randoms[k];
      if (++digit[k] < vars.original(r).size()) {
        values[r.index] = vars.value_at(r, digit[k]);
        break;
      }
      digit[k] = 0;
      values[r.index] = vars.value_at(r, 0);
    }
  }
}

std::vector<double> output_cache(const Model& model) {
  const std::size_t n_out = model.outputs().size();
  std::vector<double> cache;
  if (n_out == 0 || !outputs_depend_on_randoms_only(model)) return cache;
  cache.resize(model.scenario_count() * n_out);
  std::vector<int> values(model.variables().size(), 0);
  for_each_scenario(model, values, [&](std::uint64_t s) {
    const auto out = compute_outputs(model, values);
    std::copy(out.begin(), out.end(), cache.begin() + static_cast<std::ptrdiff_t>(s * n_out));
  });
  return cache;
}

ExactResult exact_impl(const Model& model, std::vector<int> values, const std::vector<double>& cache) {
  const auto randoms = model.random_vars();
  const auto& vars = model.variables();
  const std::size_t n_out = model.outputs().size();

  // Endogenous pmfs depend only on first-stage decisions: resolve once.
  std::vector<std::vector<double>> prob(randoms.size());
  for (std::size_t k = 0; k < randoms.size(); ++k) {
    const Pmf& pmf = model.resolve_pmf(randoms[k], values);
    for (int x : vars.original(randoms[k]).values()) prob[k].push_back(pmf.probability(x));
  }

  ExactResult res;
  std::vector<double> outputs(n_out, 0.0);
  std::vector<std::size_t> digit(randoms.size(), 0);
  for_each_scenario(model, values, [&](std::uint64_t s) {
    double p = 1.0;
    for (std::size_t k = 0; k < randoms.size(); ++k) {
      p *= prob[k][*vars.index_of(randoms[k], values[randoms[k].index])];
    }
    res.probability_mass += p;
    ++res.scenarios;
    if (p == 0.0) return;
    if (!cache.empty()) {
      std::copy(cache.begin() + static_cast<std::ptrdiff_t>(s * n_out),
                cache.begin() + static_cast<std::ptrdiff_t>((s + 1) * n_out), outputs.begin());
    } else if (n_out) {
      outputs = compute_outputs(model, values);
    }
    res.value += p * objective_value(model, values, outputs);
  });
  return res;
}

bool better(const Model& model, double candidate, double incumbent) {
  const auto& obj = model.objective();
  const bool maximize =
      std::holds_alternative<SatisfactionProbability>(obj.mode) || obj.sense == Sense::maximize;
  return maximize ? candidate > incumbent : candidate < incumbent;
}

}  // namespace

std::vector<std::string> check_plan(const Model& model, std::span<const Assignment> decisions) {
  const auto& vars = model.variables();
  std::vector<std::string> problems;
  std::vector<int> values(vars.size(), 0);
  std::vector<std::uint8_t> seen(vars.size(), 0);
  for (const auto& a : decisions) {
    if (a.var.index >= vars.size() || vars.decl(a.var).kind != VarKind::decision) {
      problems.push_back("plan assigns a non-decision variable");
      continue;
    }
    if (!vars.original(a.var).contains(a.value)) {
      problems.push_back("value " + std::to_string(a.value) + " outside the domain of '" + vars.decl(a.var).name +
                         "'");
    }
    values[a.var.index] = a.value;
    seen[a.var.index] = 1;
  }
  for (VarId d : model.decision_vars()) {
    if (!seen[d.index]) problems.push_back("decision variable '" + vars.decl(d).name + "' is unset");
  }
  if (!problems.empty()) return problems;
  const auto cs = model.constraints();
  for (std::size_t c = 0; c < cs.size(); ++c) {
    const auto sc = scope(cs[c]);
    const bool decisions_only =
        std::all_of(sc.begin(), sc.end(), [](VarId v) { return v.kind == VarKind::decision; });
    if (decisions_only && !holds(cs[c], values)) {
      problems.push_back("constraint " + std::to_string(c) + " (" + kind_name(cs[c]) + ") is violated");
    }
  }
  return problems;
}

ExactResult exact_eval_detail(const Model& model, std::span<const Assignment> decisions,
                              std::uint64_t scenario_limit) {
  require_scenario_limit(model, scenario_limit);
  auto values = decision_values(model, decisions);
  return exact_impl(model, std::move(values), {});
}

double exact_eval(const Model& model, std::span<const Assignment> decisions, std::uint64_t scenario_limit) {
  return exact_eval_detail(model, decisions, scenario_limit).value;
}

McResult mc_eval(const Model& model, std::span<const Assignment> decisions, std::uint64_t samples,
                 std::uint64_t seed) {
  if (samples < 2) throw ContractViolation("mc_eval needs at least two samples");
  auto values = decision_values(model, decisions);
  const auto randoms = model.random_vars();
  std::vector<const Pmf*> pmfs;
  for (VarId r : randoms) pmfs.push_back(&model.resolve_pmf(r, values));

  Rng rng(mix_seed(seed, 0x3ca1));
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    for (std::size_t k = 0; k < randoms.size(); ++k) {
      const double u = rng.uniform();
      double cum = 0.0;
      int value = pmfs[k]->pairs.back().first;
      for (const auto& [x, p] : pmfs[k]->pairs) {
        cum += p;
        if (u < cum) {
          value = x;
          break;
        }
      }
      values[randoms[k].index] = value;
    }
    const auto outputs = compute_outputs(model, values);
    const double y = objective_value(model, values, outputs);
    const double delta = y - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (y - mean);
  }
  const double n = static_cast<double>(samples);
  return {mean, std::sqrt(m2 / (n - 1.0) / n), samples};
}

double closed_form_artificial(int n, std::span<const int> d) {
  if (n < 1 || d.size() != static_cast<std::size_t>(n)) throw Error("closed form: need a permutation of 1..N");
  std::vector<int> sorted(d.begin(), d.end());
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < n; ++i) {
    if (sorted[static_cast<std::size_t>(i)] != i + 1) throw Error("closed form: input is not a permutation of 1..N");
  }
  double total = 0.0;
  for (int i = 1; i <= n; ++i) {
    total += static_cast<double>(n - i) * static_cast<double>(n - d[static_cast<std::size_t>(i - 1)] + 1) / n;
  }
  return total;
}

OptimumResult exhaustive_opt(const Model& model, EnumerationLimits limits) {
  const auto& vars = model.variables();
  const auto decisions = model.decision_vars();
  std::uint64_t space = 1;
  for (VarId d : decisions) {
    const std::uint64_t k = vars.original(d).size();
    if (space > limits.assignments / k + 1) {
      space = limits.assignments + 1;
      break;
    }
    space *= k;
  }
  if (space > limits.assignments) {
    throw LimitExceeded("decision assignment space exceeds the enumeration limit " +
                            std::to_string(limits.assignments),
                        space, limits.assignments);
  }
  require_scenario_limit(model, limits.scenarios);

  const auto cache = output_cache(model);
  const Solver solver = make_solver(model);

  OptimumResult best;
  bool found = false;
  std::vector<Assignment> current;
  std::vector<std::size_t> idx;

  std::function<void(std::size_t, const SearchState&)> dfs = [&](std::size_t depth, const SearchState& state) {
    if (depth == decisions.size()) {
      if (!check_plan(model, current).empty()) return;
      ++best.feasible_plans;
      auto values = decision_values(model, current);
      const double v = exact_impl(model, std::move(values), cache).value;
      if (!found || better(model, v, best.value)) {
        found = true;
        best.value = v;
        best.plan.decisions = current;
      }
      return;
    }
    const VarId var = decisions[depth];
    std::vector<std::size_t> cand;
    state.indices_into(var, cand);
    for (std::size_t c : cand) {
      SearchState next = state;
      const int value = vars.value_at(var, c);
      solver.assign_in_place(next, var, value);
      if (next.wiped()) continue;
      current.push_back({var, value});
      dfs(depth + 1, next);
      current.pop_back();
    }
  };
  dfs(0, solver.initial_state());

  if (!found) throw Error("no feasible decision assignment exists");
  best.plan.estimated = best.value;
  best.plan.exact = best.value;
  return best;
}

}  // namespace tdcp
