#include "tdcp/model.hpp"

#include <cmath>
#include <set>

#include "tdcp/error.hpp"
#include "tdcp/rng.hpp"

namespace tdcp {

namespace {

constexpr double kPmfTolerance = 1e-9;

void check_pmf(const Pmf& pmf, const Domain& domain, const std::string& who) {
  std::set<int> seen;
  for (const auto& [value, prob] : pmf.pairs) {
    if (!seen.insert(value).second) throw Error(who + ": pmf lists value " + std::to_string(value) + " twice");
    if (!domain.contains(value)) throw Error(who + ": pmf value " + std::to_string(value) + " not in domain");
    if (!(prob >= 0.0 && prob <= 1.0)) throw Error(who + ": pmf probability outside [0,1]");
  }
  if (std::abs(pmf.total() - 1.0) > kPmfTolerance) {
    throw Error(who + ": pmf sums to " + std::to_string(pmf.total()) + ", expected 1");
  }
}

bool mentions_decision(const std::vector<VarId>& vars) {
  for (VarId v : vars) {
    if (v.kind == VarKind::decision) return true;
  }
  return false;
}

}  // namespace

double Pmf::probability(int value) const {
  for (const auto& [v, p] : pairs) {
    if (v == value) return p;
  }
  return 0.0;
}

double Pmf::total() const {
  double s = 0.0;
  for (const auto& kv : pairs) s += kv.second;
  return s;
}

const Pmf& EndogenousPmf::resolve(int governor_value) const {
  for (const auto& [v, pmf] : cases) {
    if (v == governor_value) return pmf;
  }
  throw ContractViolation("endogenous pmf has no case for governor value " + std::to_string(governor_value));
}

const RandomLaw& Model::law(VarId r) const {
  const auto& l = laws_.at(r.index);
  if (!l) throw ContractViolation("variable '" + vars_->decl(r).name + "' has no distribution");
  return *l;
}

std::size_t Model::output_index(std::string_view name) const {
  for (std::size_t i = 0; i < outputs_.size(); ++i) {
    if (outputs_[i] == name) return i;
  }
  throw Error("unknown output '" + std::string(name) + "'");
}

const Pmf& Model::resolve_pmf(VarId r, std::span<const int> values) const {
  const auto& l = law(r);
  if (const auto* p = std::get_if<Pmf>(&l)) return *p;
  const auto& e = std::get<EndogenousPmf>(l);
  return e.resolve(values[e.governor.index]);
}

const Pmf& Model::resolve_pmf(VarId r, const SearchState& state) const {
  const auto& l = law(r);
  if (const auto* p = std::get_if<Pmf>(&l)) return *p;
  const auto& e = std::get<EndogenousPmf>(l);
  const auto g = state.value(e.governor);
  if (!g) {
    throw ContractViolation("pmf of '" + vars_->decl(r).name + "' depends on unassigned '" +
                            vars_->decl(e.governor).name + "'");
  }
  return e.resolve(*g);
}

std::uint64_t Model::scenario_count() const {
  std::uint64_t n = 1;
  constexpr std::uint64_t cap = std::uint64_t{1} << 63;
  for (VarId r : random_vars_) {
    const std::uint64_t d = vars_->original(r).size();
    if (n > cap / d) return cap;
    n *= d;
  }
  return n;
}

void Model::validate() const {
  const auto& vars = *vars_;
  const auto declared = [&](VarId v) {
    if (v.index >= vars.size() || vars.decl(v).kind != v.kind) {
      throw Error("reference to undeclared variable index " + std::to_string(v.index));
    }
  };

  for (std::size_t i = 0; i < vars.size(); ++i) {
    const VarId v = vars.id(i);
    const auto& d = vars.decl(v);
    const auto& law = laws_[i];
    if (d.kind == VarKind::decision) {
      if (law) throw Error("decision variable '" + d.name + "' must not carry a distribution");
      continue;
    }
    if (!law) throw Error("random variable '" + d.name + "' has no distribution");
    if (const auto* p = std::get_if<Pmf>(&*law)) {
      check_pmf(*p, d.domain, d.name);
    } else {
      const auto& e = std::get<EndogenousPmf>(*law);
      declared(e.governor);
      if (e.governor.kind != VarKind::decision) {
        throw Error(d.name + ": endogenous pmf must be governed by a decision variable");
      }
      for (int gv : vars.original(e.governor).values()) {
        bool found = false;
        for (const auto& [cv, pmf] : e.cases) {
          if (cv == gv) {
            if (found) throw Error(d.name + ": duplicate endogenous case");
            found = true;
            check_pmf(pmf, d.domain, d.name);
          }
        }
        if (!found) throw Error(d.name + ": endogenous pmf misses governor value " + std::to_string(gv));
      }
    }
  }

  for (std::size_t c = 0; c < constraints_.size(); ++c) {
    const auto& spec = constraints_[c];
    const std::string tag = "constraint " + std::to_string(c) + " (" + kind_name(spec) + ")";
    auto sc = scope(spec);
    for (VarId v : sc) declared(v);
    if (std::holds_alternative<ReifiedLe>(spec)) throw Error(tag + ": reified_le is only allowed in objectives");
    if (const auto* l = std::get_if<LinearLe>(&spec)) {
      if (l->coeffs.size() != l->vars.size()) throw Error(tag + ": coefficient/variable count mismatch");
    }
    if (const auto* g = std::get_if<MaximalityGuard>(&spec)) {
      if (g->costs.size() != g->vars.size()) throw Error(tag + ": cost/variable count mismatch");
      for (VarId v : g->vars) {
        for (int x : vars.original(v).values()) {
          if (x != 0 && x != 1) throw Error(tag + ": variables must be 0/1");
        }
      }
    }
    if (const auto* sp = std::get_if<ShortestPathCost>(&spec)) {
      if (!sp->network) throw Error(tag + ": missing network");
      tdcp::validate(*sp->network);
      if (sp->links.size() != sp->network->links.size()) throw Error(tag + ": one variable per link required");
      if (sp->output >= outputs_.size()) throw Error(tag + ": undeclared output");
      for (VarId v : sp->links) {
        for (int x : vars.original(v).values()) {
          if (x != 0 && x != 1) throw Error(tag + ": link variables must be 0/1");
        }
      }
      // The computed output is the second-stage decision.
      continue;
    }
    if (!mentions_decision(sc)) throw Error(tag + ": must contain at least one decision variable");
  }

  if (const auto* e = std::get_if<Expectation>(&objective_.mode)) {
    for (const auto& t : e->terms) {
      for (const auto& f : t.factors) {
        if (const auto* vf = std::get_if<VarFactor>(&f)) declared(vf->var);
        if (const auto* r = std::get_if<ReifiedLe>(&f)) {
          declared(r->lhs);
          declared(r->rhs);
        }
        if (const auto* o = std::get_if<OutputFactor>(&f)) {
          if (o->output >= outputs_.size()) throw Error("objective references an undeclared output");
        }
      }
    }
  } else {
    const auto& sp = std::get<SatisfactionProbability>(objective_.mode);
    if (!(sp.threshold > 0.0 && sp.threshold <= 1.0)) throw Error("objective: threshold must lie in (0,1]");
    if (std::holds_alternative<ShortestPathCost>(sp.constraint)) {
      throw Error("objective: shortest_path_cost cannot be a chance constraint");
    }
    const auto sc = scope(sp.constraint);
    for (VarId v : sc) declared(v);
    if (!mentions_decision(sc)) throw Error("objective: chance constraint needs a decision variable");
  }

  std::vector<int> seen(vars.size(), 0);
  for (const auto& st : stages_) {
    for (VarId v : st.decisions) {
      declared(v);
      if (v.kind != VarKind::decision) throw Error("stage lists random variable among decisions");
      ++seen[v.index];
    }
    for (VarId v : st.randoms) {
      declared(v);
      if (v.kind != VarKind::random) throw Error("stage lists decision variable among randoms");
      ++seen[v.index];
    }
  }
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (seen[i] != 1) {
      throw Error("stage structure must list variable '" + vars.decl(i).name + "' exactly once");
    }
  }
  if (objective_bound_ && !(*objective_bound_ >= 0.0)) throw Error("objective_bound must be nonnegative");
}

VarId ModelBuilder::add_decision(std::string name, Domain domain) {
  decls_.push_back({std::move(name), VarKind::decision, std::move(domain)});
  laws_.emplace_back();
  return {static_cast<std::uint32_t>(decls_.size() - 1), VarKind::decision};
}

VarId ModelBuilder::add_random(std::string name, Domain domain, RandomLaw law) {
  decls_.push_back({std::move(name), VarKind::random, std::move(domain)});
  laws_.emplace_back(std::move(law));
  return {static_cast<std::uint32_t>(decls_.size() - 1), VarKind::random};
}

std::size_t ModelBuilder::add_output(std::string name) {
  outputs_.push_back(std::move(name));
  return outputs_.size() - 1;
}

void ModelBuilder::add_constraint(ConstraintSpec c) { constraints_.push_back(std::move(c)); }
void ModelBuilder::set_objective(Objective obj) { objective_ = std::move(obj); }
void ModelBuilder::add_stage(Stage stage) { stages_.push_back(std::move(stage)); }
void ModelBuilder::set_objective_bound(double bound) { bound_ = bound; }

Model ModelBuilder::build() && {
  if (!objective_) throw Error("model has no objective");
  Model m;
  m.vars_ = std::make_shared<const VariableSet>(std::move(decls_));
  m.outputs_ = std::move(outputs_);
  m.laws_ = std::move(laws_);
  m.constraints_ = std::move(constraints_);
  m.objective_ = std::move(*objective_);
  m.stages_ = std::move(stages_);
  m.objective_bound_ = bound_;
  m.random_vars_ = m.vars_->random_vars();
  m.decision_vars_ = m.vars_->decision_vars();
  m.validate();
  return m;
}

double scenario_probability(const Model& model, std::span<const int> scenario,
                            std::span<const Assignment> decisions) {
  const auto randoms = model.random_vars();
  if (scenario.size() != randoms.size()) {
    throw ContractViolation("scenario must assign every random variable");
  }
  std::vector<int> values(model.variables().size(), 0);
  for (const auto& a : decisions) values[a.var.index] = a.value;
  for (std::size_t k = 0; k < randoms.size(); ++k) {
    if (!model.variables().original(randoms[k]).contains(scenario[k])) {
      throw ContractViolation("scenario value outside the domain of '" + model.variables().decl(randoms[k]).name +
                              "'");
    }
    values[randoms[k].index] = scenario[k];
  }
  double p = 1.0;
  for (std::size_t k = 0; k < randoms.size(); ++k) {
    const auto& law = model.law(randoms[k]);
    if (const auto* e = std::get_if<EndogenousPmf>(&law)) {
      bool fixed = false;
      for (const auto& a : decisions) fixed = fixed || a.var == e->governor;
      if (!fixed) throw ContractViolation("scenario_probability: endogenous governor is not fixed");
    }
    p *= model.resolve_pmf(randoms[k], values).probability(scenario[k]);
  }
  return p;
}

std::vector<double> compute_outputs(const Model& model, std::span<const int> values) {
  std::vector<double> out(model.outputs().size(), 0.0);
  std::vector<std::uint8_t> alive;
  for (const auto& c : model.constraints()) {
    const auto* sp = std::get_if<ShortestPathCost>(&c);
    if (!sp) continue;
    alive.resize(sp->links.size());
    for (std::size_t k = 0; k < sp->links.size(); ++k) alive[k] = values[sp->links[k].index] != 0;
    out[sp->output] = shortest_path_cost(*sp->network, alive, sp->penalty);
  }
  return out;
}

double objective_value(const Model& model, std::span<const int> values, std::span<const double> outputs) {
  const auto& obj = model.objective();
  if (const auto* sp = std::get_if<SatisfactionProbability>(&obj.mode)) {
    return holds(sp->constraint, values) ? 1.0 : 0.0;
  }
  double total = 0.0;
  for (const auto& t : std::get<Expectation>(obj.mode).terms) {
    double prod = t.coeff;
    for (const auto& f : t.factors) {
      if (const auto* vf = std::get_if<VarFactor>(&f)) {
        prod *= values[vf->var.index];
      } else if (const auto* r = std::get_if<ReifiedLe>(&f)) {
        prod *= values[r->lhs.index] <= values[r->rhs.index] ? 1.0 : 0.0;
      } else {
        prod *= outputs[std::get<OutputFactor>(f).output];
      }
    }
    total += prod;
  }
  return total;
}

double objective_value(const Model& model, const SearchState& terminal) {
  const auto& vars = model.variables();
  std::vector<int> values(vars.size(), 0);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto v = terminal.value(vars.id(i));
    if (!v) throw ContractViolation("objective_value: variable '" + vars.decl(i).name + "' is unassigned");
    values[i] = *v;
  }
  std::vector<double> outputs(model.outputs().size(), 0.0);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto o = terminal.output(i);
    if (!o) throw ContractViolation("objective_value: output '" + model.outputs()[i] + "' was never computed");
    outputs[i] = *o;
  }
  return objective_value(model, values, outputs);
}

Solver make_solver(const Model& model, SolverFingerprint fingerprint) {
  return Solver(model.variables_ptr(), {model.constraints().begin(), model.constraints().end()},
                model.outputs().size(), std::move(fingerprint));
}

std::vector<VarId> stage_variable_order(const Model& model, std::optional<std::uint64_t> seed) {
  std::vector<VarId> order;
  std::optional<Rng> rng;
  if (seed) rng.emplace(mix_seed(*seed, 0x0de7));
  for (const auto& st : model.stages()) {
    std::vector<VarId> dec = st.decisions;
    if (rng) {
      for (std::size_t i = dec.size(); i > 1; --i) std::swap(dec[i - 1], dec[rng->below(i)]);
    }
    order.insert(order.end(), dec.begin(), dec.end());
    order.insert(order.end(), st.randoms.begin(), st.randoms.end());
  }
  return order;
}

}  // namespace tdcp
