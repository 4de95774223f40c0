#include "tdcp/model_io.hpp"

#include <fstream>
#include <sstream>

#include "tdcp/error.hpp"

namespace tdcp {

using nlohmann::json;

namespace {

template <class T>
T field(const json& j, const char* name, const std::string& where) {
  if (!j.is_object() || !j.contains(name)) throw Error(where + ": missing field '" + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw Error(where + ": field '" + name + "' has the wrong type");
  }
}

const json& child(const json& j, const char* name, const std::string& where) {
  if (!j.is_object() || !j.contains(name)) throw Error(where + ": missing field '" + name + "'");
  return j.at(name);
}

std::string kind_str(VarKind k) { return k == VarKind::decision ? "decision" : "random"; }

json names(const VariableSet& vars, const std::vector<VarId>& ids) {
  json a = json::array();
  for (VarId v : ids) a.push_back(vars.decl(v).name);
  return a;
}

std::vector<VarId> ids(const VariableSet& vars, const json& j, const std::string& where) {
  if (!j.is_array()) throw Error(where + ": expected a list of variable names");
  std::vector<VarId> out;
  for (const auto& n : j) {
    if (!n.is_string()) throw Error(where + ": variable references must be names");
    auto v = vars.find(n.get<std::string>());
    if (!v) throw Error(where + ": unknown variable '" + n.get<std::string>() + "'");
    out.push_back(*v);
  }
  return out;
}

json pmf_to_json(const Pmf& p) {
  json a = json::array();
  for (const auto& [v, prob] : p.pairs) a.push_back(json::array({v, prob}));
  return a;
}

Pmf pmf_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw Error(where + ": pmf must be a list of [value, probability]");
  Pmf p;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number()) {
      throw Error(where + ": pmf entries must be [integer, number]");
    }
    p.pairs.emplace_back(e[0].get<int>(), e[1].get<double>());
  }
  return p;
}

json constraint_to_json(const VariableSet& vars, std::span<const std::string> outputs, const ConstraintSpec& c) {
  json j;
  j["type"] = kind_name(c);
  if (const auto* a = std::get_if<AllDifferent>(&c)) {
    j["vars"] = names(vars, a->vars);
  } else if (const auto* l = std::get_if<LinearLe>(&c)) {
    j["coeffs"] = l->coeffs;
    j["vars"] = names(vars, l->vars);
    j["bound"] = l->bound;
  } else if (const auto* r = std::get_if<ReifiedLe>(&c)) {
    j["lhs"] = vars.decl(r->lhs).name;
    j["rhs"] = vars.decl(r->rhs).name;
  } else if (const auto* g = std::get_if<MaximalityGuard>(&c)) {
    j["costs"] = g->costs;
    j["vars"] = names(vars, g->vars);
    j["budget"] = g->budget;
  } else if (const auto* sp = std::get_if<ShortestPathCost>(&c)) {
    j["network"] = network_to_json(*sp->network);
    j["penalty"] = sp->penalty;
    j["links"] = names(vars, sp->links);
    j["output"] = outputs[sp->output];
  }
  return j;
}

ConstraintSpec constraint_from_json(const VariableSet& vars, const std::vector<std::string>& outputs, const json& j,
                                    const std::string& where) {
  const auto type = field<std::string>(j, "type", where);
  if (type == "alldifferent") return AllDifferent{ids(vars, child(j, "vars", where), where)};
  if (type == "linear_le") {
    return LinearLe{field<std::vector<long long>>(j, "coeffs", where), ids(vars, child(j, "vars", where), where),
                    field<long long>(j, "bound", where)};
  }
  if (type == "reified_le") {
    return ReifiedLe{vars.require(field<std::string>(j, "lhs", where)),
                     vars.require(field<std::string>(j, "rhs", where))};
  }
  if (type == "maximality_guard") {
    return MaximalityGuard{field<std::vector<long long>>(j, "costs", where),
                           ids(vars, child(j, "vars", where), where), field<long long>(j, "budget", where)};
  }
  if (type == "shortest_path_cost") {
    ShortestPathCost sp;
    sp.network = std::make_shared<const Network>(network_from_json(child(j, "network", where)));
    sp.penalty = field<double>(j, "penalty", where);
    sp.links = ids(vars, child(j, "links", where), where);
    const auto out = field<std::string>(j, "output", where);
    auto it = std::find(outputs.begin(), outputs.end(), out);
    if (it == outputs.end()) throw Error(where + ": unknown output '" + out + "'");
    sp.output = static_cast<std::size_t>(it - outputs.begin());
    return sp;
  }
  throw Error(where + ": unknown constraint type '" + type + "'");
}

}  // namespace

json network_to_json(const Network& net) {
  json j;
  j["version"] = kNetworkFormatVersion;
  j["nodes"] = net.nodes;
  j["links"] = json::array();
  for (const auto& l : net.links) {
    j["links"].push_back({{"id", l.id}, {"from", l.from}, {"to", l.to}, {"t", l.length}, {"c", l.cost},
                          {"p", l.p}, {"q", l.q}});
  }
  j["od_pairs"] = json::array();
  for (const auto& od : net.od_pairs) j["od_pairs"].push_back({{"from", od.from}, {"to", od.to}});
  j["budgets"] = net.budgets;
  j["penalties"] = {{"low", net.penalties.low}, {"high", net.penalties.high}};
  return j;
}

Network network_from_json(const json& j) {
  const std::string where = "network";
  Network net;
  net.nodes = field<std::vector<int>>(j, "nodes", where);
  for (const auto& l : child(j, "links", where)) {
    net.links.push_back({field<int>(l, "id", "link"), field<int>(l, "from", "link"), field<int>(l, "to", "link"),
                         field<double>(l, "t", "link"), field<long long>(l, "c", "link"),
                         field<double>(l, "p", "link"), field<double>(l, "q", "link")});
  }
  for (const auto& od : child(j, "od_pairs", where)) {
    net.od_pairs.push_back({field<int>(od, "from", "od_pair"), field<int>(od, "to", "od_pair")});
  }
  const auto budgets = field<std::vector<long long>>(j, "budgets", where);
  if (budgets.size() != 3) throw Error("network: budgets must list exactly three levels");
  std::copy(budgets.begin(), budgets.end(), net.budgets.begin());
  const auto& pen = child(j, "penalties", where);
  net.penalties = {field<double>(pen, "low", "penalties"), field<double>(pen, "high", "penalties")};
  validate(net);
  return net;
}

json model_to_json(const Model& model) {
  const auto& vars = model.variables();
  json j;
  j["format"] = "tdcp-model";
  j["version"] = kModelFormatVersion;
  j["variables"] = json::array();
  for (const auto& d : vars.decls()) {
    j["variables"].push_back(
        {{"name", d.name}, {"kind", kind_str(d.kind)}, {"domain", std::vector<int>(d.domain.values().begin(), d.domain.values().end())}});
  }
  j["outputs"] = std::vector<std::string>(model.outputs().begin(), model.outputs().end());
  j["random_laws"] = json::array();
  for (VarId r : model.random_vars()) {
    json law;
    law["var"] = vars.decl(r).name;
    if (const auto* p = std::get_if<Pmf>(&model.law(r))) {
      law["pmf"] = pmf_to_json(*p);
    } else {
      const auto& e = std::get<EndogenousPmf>(model.law(r));
      law["governor"] = vars.decl(e.governor).name;
      law["cases"] = json::array();
      for (const auto& [gv, pmf] : e.cases) law["cases"].push_back({{"when", gv}, {"pmf", pmf_to_json(pmf)}});
    }
    j["random_laws"].push_back(law);
  }
  j["constraints"] = json::array();
  for (const auto& c : model.constraints()) j["constraints"].push_back(constraint_to_json(vars, model.outputs(), c));

  const auto& obj = model.objective();
  json o;
  o["sense"] = obj.sense == Sense::maximize ? "maximize" : "minimize";
  if (const auto* e = std::get_if<Expectation>(&obj.mode)) {
    o["mode"] = "expectation";
    o["terms"] = json::array();
    for (const auto& t : e->terms) {
      json term;
      term["coeff"] = t.coeff;
      term["factors"] = json::array();
      for (const auto& f : t.factors) {
        if (const auto* vf = std::get_if<VarFactor>(&f)) {
          term["factors"].push_back({{"var", vars.decl(vf->var).name}});
        } else if (const auto* r = std::get_if<ReifiedLe>(&f)) {
          term["factors"].push_back({{"reify_le", {vars.decl(r->lhs).name, vars.decl(r->rhs).name}}});
        } else {
          term["factors"].push_back({{"output", model.outputs()[std::get<OutputFactor>(f).output]}});
        }
      }
      o["terms"].push_back(term);
    }
  } else {
    const auto& sp = std::get<SatisfactionProbability>(obj.mode);
    o["mode"] = "satisfaction_probability";
    o["constraint"] = constraint_to_json(vars, model.outputs(), sp.constraint);
    o["threshold"] = sp.threshold;
  }
  j["objective"] = o;

  j["stages"] = json::array();
  for (const auto& st : model.stages()) {
    j["stages"].push_back({{"decisions", names(vars, st.decisions)}, {"randoms", names(vars, st.randoms)}});
  }
  if (model.objective_bound()) j["objective_bound"] = *model.objective_bound();
  return j;
}

Model model_from_json(const json& j) {
  const std::string where = "model";
  if (field<std::string>(j, "format", where) != "tdcp-model") throw Error("model: not a tdcp-model document");
  const int version = field<int>(j, "version", where);
  if (version != kModelFormatVersion) throw Error("model: unsupported version " + std::to_string(version));

  // First pass: names and domains, so references can be resolved.
  std::vector<VariableDecl> decls;
  for (const auto& v : child(j, "variables", where)) {
    const auto kind = field<std::string>(v, "kind", "variable");
    if (kind != "decision" && kind != "random") throw Error("variable: kind must be decision or random");
    decls.push_back({field<std::string>(v, "name", "variable"), kind == "decision" ? VarKind::decision : VarKind::random,
                     Domain(field<std::vector<int>>(v, "domain", "variable"))});
  }
  const VariableSet vars(decls);
  const auto outputs = j.contains("outputs") ? field<std::vector<std::string>>(j, "outputs", where)
                                             : std::vector<std::string>{};

  std::vector<std::optional<RandomLaw>> laws(decls.size());
  for (const auto& l : child(j, "random_laws", where)) {
    const auto name = field<std::string>(l, "var", "random_laws");
    const VarId r = vars.require(name);
    const std::string lw = "random law of '" + name + "'";
    if (laws[r.index]) throw Error(lw + ": declared twice");
    if (l.contains("pmf")) {
      laws[r.index] = pmf_from_json(l.at("pmf"), lw);
    } else {
      EndogenousPmf e;
      e.governor = vars.require(field<std::string>(l, "governor", lw));
      for (const auto& c : child(l, "cases", lw)) {
        e.cases.emplace_back(field<int>(c, "when", lw), pmf_from_json(child(c, "pmf", lw), lw));
      }
      laws[r.index] = std::move(e);
    }
  }

  ModelBuilder b;
  for (std::size_t i = 0; i < decls.size(); ++i) {
    if (decls[i].kind == VarKind::decision) {
      b.add_decision(decls[i].name, decls[i].domain);
    } else {
      if (!laws[i]) throw Error("random variable '" + decls[i].name + "' has no distribution");
      b.add_random(decls[i].name, decls[i].domain, *laws[i]);
    }
  }
  for (const auto& o : outputs) b.add_output(o);
  std::size_t ci = 0;
  for (const auto& c : child(j, "constraints", where)) {
    b.add_constraint(constraint_from_json(vars, outputs, c, "constraints[" + std::to_string(ci++) + "]"));
  }

  const auto& o = child(j, "objective", where);
  Objective obj;
  const auto sense = field<std::string>(o, "sense", "objective");
  if (sense != "maximize" && sense != "minimize") throw Error("objective: sense must be maximize or minimize");
  obj.sense = sense == "maximize" ? Sense::maximize : Sense::minimize;
  const auto mode = field<std::string>(o, "mode", "objective");
  if (mode == "expectation") {
    Expectation e;
    for (const auto& t : child(o, "terms", "objective")) {
      Term term;
      term.coeff = field<double>(t, "coeff", "objective term");
      for (const auto& f : child(t, "factors", "objective term")) {
        if (f.contains("var")) {
          term.factors.push_back(VarFactor{vars.require(field<std::string>(f, "var", "factor"))});
        } else if (f.contains("reify_le")) {
          const auto pair = field<std::vector<std::string>>(f, "reify_le", "factor");
          if (pair.size() != 2) throw Error("factor: reify_le needs two variable names");
          term.factors.push_back(ReifiedLe{vars.require(pair[0]), vars.require(pair[1])});
        } else if (f.contains("output")) {
          const auto out = field<std::string>(f, "output", "factor");
          auto it = std::find(outputs.begin(), outputs.end(), out);
          if (it == outputs.end()) throw Error("factor: unknown output '" + out + "'");
          term.factors.push_back(OutputFactor{static_cast<std::size_t>(it - outputs.begin())});
        } else {
          throw Error("factor: expected one of var, reify_le, output");
        }
      }
      e.terms.push_back(std::move(term));
    }
    obj.mode = std::move(e);
  } else if (mode == "satisfaction_probability") {
    obj.mode = SatisfactionProbability{constraint_from_json(vars, outputs, child(o, "constraint", "objective"),
                                                            "objective.constraint"),
                                       field<double>(o, "threshold", "objective")};
  } else {
    throw Error("objective: unknown mode '" + mode + "'");
  }
  b.set_objective(std::move(obj));

  for (const auto& st : child(j, "stages", where)) {
    b.add_stage({ids(vars, child(st, "decisions", "stage"), "stage"), ids(vars, child(st, "randoms", "stage"), "stage")});
  }
  if (j.contains("objective_bound")) b.set_objective_bound(field<double>(j, "objective_bound", where));
  return std::move(b).build();
}

std::string model_to_string(const Model& model) { return model_to_json(model).dump(2) + "\n"; }

Model model_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("model: JSON syntax error: ") + e.what());
  }
  return model_from_json(j);
}

Model read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_string(ss.str());
}

void write_model_file(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file " + path.string());
  out << model_to_string(model);
}

}  // namespace tdcp
