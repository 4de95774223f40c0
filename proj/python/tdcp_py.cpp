#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

#include "tdcp/benchmarks.hpp"
#include "tdcp/cli.hpp"
#include "tdcp/evaluate.hpp"
#include "tdcp/learner.hpp"
#include "tdcp/model_io.hpp"

namespace py = pybind11;
using namespace tdcp;

namespace {

using Decisions = std::map<std::string, int>;

std::vector<Assignment> to_assignments(const Model& m, const Decisions& d) {
  std::vector<Assignment> out;
  for (const auto& [name, value] : d) out.push_back({m.variables().require(name), value});
  std::sort(out.begin(), out.end(), [](const Assignment& a, const Assignment& b) { return a.var.index < b.var.index; });
  return out;
}

Decisions to_dict(const Model& m, const std::vector<Assignment>& as) {
  Decisions out;
  for (const auto& a : as) out[m.variables().decl(a.var).name] = a.value;
  return out;
}

py::dict plan_dict(const Model& m, const Plan& p) {
  py::dict d;
  d["decisions"] = to_dict(m, p.decisions);
  d["display"] = plan_to_string(m, p);
  d["estimated"] = p.estimated;
  d["estimate_stderr"] = p.estimate_stderr;
  return d;
}

LearnerConfig make_config(std::uint64_t episodes, double alpha, double epsilon_start, double epsilon_end,
                          std::size_t hash_size, std::array<std::uint64_t, 3> seeds, std::size_t eval_rollouts,
                          std::vector<std::uint64_t> checkpoints, std::optional<double> k_reward) {
  LearnerConfig c;
  c.episodes = episodes;
  c.alpha = alpha;
  c.epsilon.start = epsilon_start;
  c.epsilon.end = epsilon_end;
  c.hash_size = hash_size;
  c.seeds = {seeds[0], seeds[1], seeds[2]};
  c.eval_rollouts = eval_rollouts;
  c.checkpoints = std::move(checkpoints);
  c.k_reward = k_reward;
  return c;
}

}  // namespace

PYBIND11_MODULE(_tdcp, m) {
  m.doc() = "Temporal-difference constraint programming for two-stage stochastic problems";

  py::register_exception<Error>(m, "TdcpError", PyExc_ValueError);
  py::register_exception<LimitExceeded>(m, "LimitExceeded", PyExc_ValueError);
  py::register_exception<FingerprintMismatch>(m, "FingerprintMismatch", PyExc_ValueError);

  py::class_<Model>(m, "Model")
      .def_static("from_json", &model_from_string, py::arg("text"))
      .def_static("load", [](const std::string& path) { return read_model_file(path); }, py::arg("path"))
      .def("to_json", &model_to_string)
      .def("save", [](const Model& self, const std::string& path) { write_model_file(self, path); }, py::arg("path"))
      .def_property_readonly("decision_names",
                             [](const Model& self) {
                               std::vector<std::string> out;
                               for (VarId v : self.decision_vars()) out.push_back(self.variables().decl(v).name);
                               return out;
                             })
      .def_property_readonly("scenario_count", &Model::scenario_count);

  py::class_<Network>(m, "Network")
      .def_static("load", [](const std::string& path) { return load_network(path); }, py::arg("path"))
      .def_static("parse", &parse_network, py::arg("text"))
      .def("to_json", &network_to_string)
      .def("save", [](const Network& self, const std::string& path) { save_network(self, path); }, py::arg("path"))
      .def_property_readonly("link_count", [](const Network& self) { return self.links.size(); });

  m.def("gen_network", &gen_network, py::arg("nodes"), py::arg("links"), py::arg("seed"));
  m.def("build_artificial", &build_artificial, py::arg("n"));
  m.def(
      "build_disaster",
      [](const Network& net, int budget_level, const std::string& penalty, bool maximal,
         std::optional<std::uint64_t> permutation_seed) {
        DisasterOptions o;
        o.budget_level = budget_level;
        if (penalty == "low") {
          o.penalty_level = PenaltyLevel::low;
        } else if (penalty == "high") {
          o.penalty_level = PenaltyLevel::high;
        } else {
          throw Error("penalty must be 'low' or 'high'");
        }
        o.maximality = maximal;
        o.permutation_seed = permutation_seed;
        return build_disaster(net, o);
      },
      py::arg("network"), py::arg("budget_level") = 1, py::arg("penalty") = "low", py::arg("maximal") = false,
      py::arg("permutation_seed") = py::none());

  m.def(
      "train",
      [](const Model& model, std::uint64_t episodes, double alpha, double epsilon_start, double epsilon_end,
         std::size_t hash_size, std::array<std::uint64_t, 3> seeds, std::size_t eval_rollouts,
         std::vector<std::uint64_t> checkpoints, std::optional<double> k_reward) {
        const auto cfg = make_config(episodes, alpha, epsilon_start, epsilon_end, hash_size, seeds, eval_rollouts,
                                     std::move(checkpoints), k_reward);
        cfg.validate(model);
        const TrainResult r = [&] {
          py::gil_scoped_release release;
          return train(model, {}, cfg);
        }();
        const auto ex = extract_plan(model, {}, r.values, cfg);
        py::dict out;
        out["plan"] = ex.plan ? py::object(plan_dict(model, *ex.plan)) : py::none();
        out["rollouts_completed"] = ex.completed;
        out["rollouts_truncated"] = ex.truncated;
        py::list curve;
        for (const auto& p : r.curve) curve.append(py::make_tuple(p.episode, p.estimate));
        out["curve"] = curve;
        py::dict stats;
        stats["completed"] = r.stats.completed;
        stats["wipe_outs"] = r.stats.wipe_outs;
        stats["integrity_halts"] = r.stats.integrity_halts;
        out["stats"] = stats;
        return out;
      },
      py::arg("model"), py::arg("episodes") = 100000, py::arg("alpha") = 0.1, py::arg("epsilon_start") = 0.2,
      py::arg("epsilon_end") = 0.01, py::arg("hash_size") = 100000,
      py::arg("seeds") = std::array<std::uint64_t, 3>{1, 2, 3}, py::arg("eval_rollouts") = 1000,
      py::arg("checkpoints") = std::vector<std::uint64_t>{}, py::arg("k_reward") = py::none(),
      "Train a value table and extract the greedy plan.");

  m.def(
      "check_plan", [](const Model& model, const Decisions& d) { return check_plan(model, to_assignments(model, d)); },
      py::arg("model"), py::arg("decisions"));
  m.def(
      "exact_eval",
      [](const Model& model, const Decisions& d, std::uint64_t limit) {
        return exact_eval(model, to_assignments(model, d), limit);
      },
      py::arg("model"), py::arg("decisions"), py::arg("scenario_limit") = kDefaultScenarioLimit);
  m.def(
      "mc_eval",
      [](const Model& model, const Decisions& d, std::uint64_t samples, std::uint64_t seed) {
        const auto r = mc_eval(model, to_assignments(model, d), samples, seed);
        return py::make_tuple(r.mean, r.stderr_, r.samples);
      },
      py::arg("model"), py::arg("decisions"), py::arg("samples"), py::arg("seed") = 1,
      "Returns (mean, stderr, samples).");
  m.def(
      "closed_form_artificial", [](int n, std::vector<int> d) { return closed_form_artificial(n, d); }, py::arg("n"),
      py::arg("permutation"));
  m.def(
      "exhaustive_opt",
      [](const Model& model, std::uint64_t max_plans, std::uint64_t max_scenarios) {
        const auto r = exhaustive_opt(model, {max_plans, max_scenarios});
        py::dict out;
        out["decisions"] = to_dict(model, r.plan.decisions);
        out["display"] = plan_to_string(model, r.plan);
        out["value"] = r.value;
        out["feasible_plans"] = r.feasible_plans;
        return out;
      },
      py::arg("model"), py::arg("max_plans") = kDefaultAssignmentLimit,
      py::arg("max_scenarios") = kDefaultScenarioLimit);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line tool in-process. Returns (exit_code, stdout, stderr).");
}
