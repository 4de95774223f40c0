// Acceptance run: one PASS/FAIL line per criterion with the measured numbers.
//
//   acceptance [--only 1,4] [--known-failures 2,3]
//
// Exit status is 0 when every failing criterion is listed as known.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fixtures.hpp"
#include "tdcp/cli.hpp"
#include "tdcp/error.hpp"
#include "tdcp/evaluate.hpp"
#include "tdcp/learner.hpp"
#include "tdcp/model_io.hpp"

using namespace tdcp;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Assignment> perm_plan(const Model& m, const std::vector<int>& d) {
  std::vector<Assignment> out;
  for (std::size_t i = 0; i < d.size(); ++i) out.push_back({m.variables().require("d" + std::to_string(i + 1)), d[i]});
  return out;
}

std::vector<int> ascending(int n) {
  std::vector<int> d(static_cast<std::size_t>(n));
  std::iota(d.begin(), d.end(), 1);
  return d;
}

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stdev(const std::vector<double>& xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

LearnerConfig seeded(LearnerConfig cfg, std::size_t run) {
  cfg.seeds = cli::run_seeds(1, run);
  return cfg;
}

void criterion1(Outcome& o) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t checked = 0;
  bool ascending_opt = true;
  for (int n = 2; n <= 4; ++n) {
    const Model m = build_artificial(n);
    auto d = ascending(n);
    do {
      worst = std::max(worst, std::abs(exact_eval(m, perm_plan(m, d)) - closed_form_artificial(n, d)));
      ++checked;
    } while (std::next_permutation(d.begin(), d.end()));
    ascending_opt = ascending_opt && exhaustive_opt(m).plan.values() == ascending(n);
  }
  const double secs = seconds_since(t0);
  o.detail << checked << " permutations, max |closed - exact| = " << worst << ", optimum ascending for N=2..4: "
           << (ascending_opt ? "yes" : "no") << ", " << secs << " s";
  o.require(worst <= 1e-12, "closed form matches exact to 1e-12");
  o.require(ascending_opt, "exhaustive optimum is the ascending permutation");
  o.require(secs < 10.0, "runtime < 10 s");
}

void criterion2(Outcome& o) {
  const auto t0 = Clock::now();
  const Model m = build_artificial(5);
  const auto opt = exhaustive_opt(m);
  LearnerConfig base;
  base.episodes = 100000;
  base.hash_size = 10000;
  base.alpha = 0.1;
  int optimal = 0;
  int within = 0;
  double best_est = -1e300;
  std::vector<int> best_plan;
  std::ostringstream per_seed;
  for (std::size_t s = 0; s < 10; ++s) {
    const auto cfg = seeded(base, s);
    const auto r = train(m, {}, cfg);
    const auto ex = extract_plan(m, {}, r.values, cfg);
    if (!ex.plan) {
      per_seed << " -";
      continue;
    }
    const auto vals = ex.plan->values();
    optimal += vals == opt.plan.values();
    within += std::abs(ex.plan->estimated - opt.value) <= 0.02 * std::abs(opt.value);
    per_seed << " " << std::setprecision(4) << ex.plan->estimated;
    if (ex.plan->estimated > best_est) {
      best_est = ex.plan->estimated;
      best_plan = vals;
    }
  }
  const double secs = seconds_since(t0);
  o.detail << "optimum " << opt.value << "; seeds at optimum " << optimal << "/10; estimates within 2% " << within
           << "/10; best-of-10 optimal: " << (best_plan == opt.plan.values() ? "yes" : "no") << "; estimates"
           << per_seed.str() << "; " << std::setprecision(3) << secs << " s";
  o.require(best_plan == opt.plan.values(), "best-of-10 plan is the optimum");
  o.require(optimal >= 8, ">= 8/10 seeds reach the optimum");
  o.require(within == 10, "every estimate within 2%");
  o.require(secs < 120.0, "runtime < 2 min");
}

void criterion3(Outcome& o) {
  const auto t0 = Clock::now();
  const Model m = build_artificial(10);
  const double target = closed_form_artificial(10, ascending(10));
  LearnerConfig base;
  base.episodes = 1000000;
  base.hash_size = 100000;
  base.checkpoints = {1000, 10000, 100000, 500000, 1000000};
  std::vector<std::vector<double>> at(base.checkpoints.size());
  for (std::size_t s = 0; s < 10; ++s) {
    const auto r = train(m, {}, seeded(base, s));
    for (std::size_t k = 0; k < r.curve.size(); ++k) {
      if (!std::isnan(r.curve[k].estimate)) at[k].push_back(r.curve[k].estimate);
    }
  }
  const double secs = seconds_since(t0);
  o.detail << std::setprecision(4);
  for (std::size_t k = 0; k < at.size(); ++k) {
    o.detail << "@" << base.checkpoints[k] << " mean " << (at[k].empty() ? NAN : mean(at[k])) << " sd "
             << (at[k].size() < 2 ? NAN : stdev(at[k])) << "; ";
  }
  o.detail << "target " << target << "; " << std::setprecision(3) << secs << " s";
  const bool complete = at.front().size() == 10 && at.back().size() == 10;
  o.require(complete, "every seed has an estimate at the first and last checkpoint");
  if (complete) {
    o.require(stdev(at.back()) < stdev(at.front()), "spread at 1e6 below spread at 1e3");
    o.require(std::abs(mean(at.back()) - target) <= 0.03 * target, "mean at 1e6 within 3% of the optimum");
  }
  o.require(secs < 900.0, "runtime < 15 min");
}

void criterion4(Outcome& o) {
  const auto t0 = Clock::now();
  const Network net = gen_network(8, 12, 2024);
  const Model m = build_disaster(net, {});
  const auto opt = exhaustive_opt(m);
  LearnerConfig base;
  base.episodes = 100000;
  double best_est = 1e300;
  std::optional<Plan> best;
  for (std::size_t s = 0; s < 10; ++s) {
    const auto cfg = seeded(base, s);
    const auto r = train(m, {}, cfg);
    const auto ex = extract_plan(m, {}, r.values, cfg);
    if (ex.plan && ex.plan->estimated < best_est) {
      best_est = ex.plan->estimated;
      best = ex.plan;
    }
  }
  o.require(best.has_value(), "some run produced a plan");
  if (!best) return;
  const double exact = exact_eval(m, best->decisions);
  const auto mc = mc_eval(m, best->decisions, 100000, 99);
  const double gap = (exact - opt.value) / std::abs(opt.value);
  const double secs = seconds_since(t0);
  o.detail << std::setprecision(6) << opt.feasible_plans << " feasible plans, optimum " << opt.value
           << "; best-of-10 exact " << exact << " (gap " << std::setprecision(3) << 100 * gap << "%); mc "
           << std::setprecision(6) << mc.mean << " +- " << mc.stderr_ << " (" << std::setprecision(3)
           << std::abs(mc.mean - exact) / mc.stderr_ << " stderr); " << secs << " s";
  o.require(gap <= 0.05, "best plan within 5% of the optimum");
  o.require(std::abs(mc.mean - exact) <= 4 * mc.stderr_, "mc within 4 stderr of exact");
  o.require(secs < 300.0, "runtime < 5 min");
}

void criterion5(Outcome& o) {
  const auto t0 = Clock::now();
  const fs::path dir = fs::temp_directory_path() / "tdcp_acceptance_table";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string net = (dir / "net30.json").string();
  const std::string report = (dir / "train.json").string();
  const std::string evaluated = (dir / "eval.json").string();
  save_network(gen_network(20, 30, 7), net);
  std::ostringstream out;
  std::ostringstream err;
  const int train_code = cli::run({"train", "--benchmark", "disaster", "--network", net, "--episodes", "20000",
                                   "--runs", "10", "--report-out", report},
                                  out, err);
  const int eval_code = cli::run(
      {"eval", "--benchmark", "disaster", "--network", net, "--plan", report, "--mc", "100000", "--report-out",
       evaluated},
      out, err);
  o.require(train_code == 0, "train exits 0");
  o.require(eval_code == 0, "eval exits 0");
  if (train_code != 0 || eval_code != 0) {
    o.detail << err.str();
    return;
  }
  auto slurp = [](const std::string& p) {
    std::ifstream f(p);
    return nlohmann::json::parse(f);
  };
  const auto tr = slurp(report);
  const auto ev = slurp(evaluated);
  const bool runs_ok = tr["runs"].size() == 10 && std::all_of(tr["runs"].begin(), tr["runs"].end(), [](const auto& r) {
                         return r.contains("plan") && r.contains("estimated");
                       });
  const bool best_ok = tr.contains("best") && tr["best"].contains("decisions") && tr["best"].contains("estimated");
  const bool eval_ok = ev.contains("evaluated") && ev.contains("plan") && ev["method"] == "mc";
  o.detail << "plan " << ev.value("plan", nlohmann::json{}).dump() << ", estimated "
           << tr["best"].value("estimated", NAN) << ", evaluated " << ev.value("evaluated", NAN) << " +- "
           << ev.value("stderr", NAN) << "; " << std::setprecision(3) << seconds_since(t0) << " s";
  o.require(runs_ok, "10 runs with plan and estimate");
  o.require(best_ok, "best plan with estimate");
  o.require(eval_ok, "mc evaluation report");
  fs::remove_all(dir);
}

void criterion6(Outcome& o) {
  const auto t0 = Clock::now();

  bool hash_ok = true;
  {
    const Model m = build_artificial(6);
    const auto& vars = m.variables();
    const ZobristTable z(vars, 99991, 5);
    Rng rng(1234);
    for (int trial = 0; trial < 100000 && hash_ok; ++trial) {
      std::vector<Assignment> set;
      std::uint64_t running = 0;
      for (std::size_t i = 0; i < vars.size(); ++i) {
        if (rng.below(2) == 0) continue;
        const VarId v = vars.id(i);
        const std::size_t idx = rng.below(vars.original(v).size());
        set.push_back({v, vars.value_at(v, idx)});
        running ^= z.code_at(v, idx);
      }
      hash_ok = z.slot(running) == z.state_hash(set);
    }
  }
  o.require(hash_ok, "incremental Zobrist equals recomputation");

  bool rejected = false;
  {
    const fs::path path = fs::temp_directory_path() / "tdcp_acceptance_table.bin";
    ValueTable(512, {}, 1).save(path);
    SolverFingerprint strong;
    strong.alldifferent = AllDifferentStrength::strong;
    try {
      ValueTable::load(path, strong);
    } catch (const FingerprintMismatch&) {
      rejected = true;
    }
    fs::remove(path);
  }
  o.require(rejected, "fingerprint mismatch rejected");

  int halts = 0;
  {
    const Model m = fixtures::integrity_model();
    LearnerConfig cfg;
    cfg.hash_size = 64;
    EpisodeRunner runner(m, {}, cfg);
    const ValueTable values(64, {}, cfg.seeds.zobrist);
    Rng explore(3);
    Rng sample(4);
    for (int i = 0; i < 200; ++i) {
      const auto t = run_episode(runner, values, 1.0, explore, sample);
      halts += t.halt == HaltReason::integrity && t.rewards.size() == 1 && !t.objective;
    }
  }
  o.require(halts > 0, "integrity halt on the pruning model");

  std::uint64_t toy_halts = 1;
  {
    LearnerConfig cfg;
    cfg.episodes = 10000;
    cfg.hash_size = 4096;
    cfg.eval_rollouts = 10;
    toy_halts = train(fixtures::toy_model(), {}, cfg).stats.integrity_halts;
  }
  o.require(toy_halts == 0, "no integrity halts on the disaster toy");

  int maximal = 0;
  {
    DisasterOptions opts;
    opts.maximality = true;
    opts.budget_level = 2;
    const Model m = build_disaster(gen_network(7, 9, 5), opts);
    for (std::size_t s = 0; s < 10; ++s) {
      LearnerConfig cfg;
      cfg.episodes = 3000;
      cfg.hash_size = 8192;
      cfg.eval_rollouts = 50;
      cfg = seeded(cfg, s);
      const auto ex = extract_plan(m, {}, train(m, {}, cfg).values, cfg);
      maximal += ex.plan && check_plan(m, ex.plan->decisions).empty();
    }
  }
  o.require(maximal == 10, "every extracted plan is maximal");

  bool frozen = false;
  bool same_curves = true;
  {
    const Model m = build_artificial(4);
    LearnerConfig cfg;
    cfg.episodes = 5000;
    cfg.hash_size = 10000;
    cfg.eval_rollouts = 200;
    cfg.checkpoints = {100, 1000, 5000};
    auto still = cfg;
    still.alpha = 0.0;
    still.epsilon.start = still.epsilon.end = 1.0;
    frozen = train(m, {}, still).values == ValueTable(cfg.hash_size, {}, cfg.seeds.zobrist);
    const auto a = train(m, {}, cfg);
    const auto b = train(m, {}, cfg);
    same_curves = a.curve.size() == b.curve.size() && a.values == b.values;
    for (std::size_t i = 0; same_curves && i < a.curve.size(); ++i) {
      same_curves = a.curve[i].episode == b.curve[i].episode &&
                    std::memcmp(&a.curve[i].estimate, &b.curve[i].estimate, sizeof(double)) == 0;
    }
  }
  o.require(frozen, "alpha 0 leaves the table unchanged");
  o.require(same_curves, "identical seeds give identical curves");

  const double secs = seconds_since(t0);
  o.detail << "zobrist " << (hash_ok ? "ok" : "mismatch") << ", mismatch load " << (rejected ? "rejected" : "accepted")
           << ", integrity halts " << halts << "/200, toy halts " << toy_halts << "/10000, maximal plans " << maximal
           << "/10, alpha=0 " << (frozen ? "unchanged" : "changed") << ", curves "
           << (same_curves ? "identical" : "differ") << "; " << std::setprecision(3) << secs << " s";
  o.require(secs < 60.0, "runtime < 1 min");
}

void criterion7(Outcome& o) {
  const Model up = build_artificial(4);
  auto j = model_to_json(up);
  j["objective"]["sense"] = "minimize";
  for (auto& t : j["objective"]["terms"]) t["coeff"] = -t["coeff"].get<double>();
  const Model down = model_from_json(j);
  int same = 0;
  for (std::size_t s = 0; s < 5; ++s) {
    LearnerConfig cfg;
    cfg.episodes = 20000;
    cfg.hash_size = 10000;
    cfg.eval_rollouts = 200;
    cfg = seeded(cfg, s);
    auto cfg_down = cfg;
    cfg_down.k_reward = cfg.step_reward(up);
    const auto pa = extract_plan(up, {}, train(up, {}, cfg).values, cfg);
    const auto pb = extract_plan(down, {}, train(down, {}, cfg_down).values, cfg_down);
    same += pa.plan && pb.plan && pa.plan->decisions == pb.plan->decisions;
  }
  o.detail << "identical greedy plans in " << same << "/5 seeds";
  o.require(same == 5, "plans agree for every seed");
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(std::stoi(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--known-failures" && i + 1 < argc) {
      known = parse_list(argv[++i]);
    } else if (a == "--only" && i + 1 < argc) {
      only = parse_list(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--only LIST] [--known-failures LIST]\n";
      return 2;
    }
  }

  const std::vector<std::function<void(Outcome&)>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                            criterion5, criterion6, criterion7};
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      criteria[i](o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::string status = o.pass ? "PASS" : "FAIL";
    if (!o.pass && known.count(id)) status += " (known)";
    if (!o.pass && !known.count(id)) ++unexpected;
    std::cout << "criterion " << id << ": " << status << "  " << o.detail.str() << std::endl;
  }
  return unexpected == 0 ? 0 : 1;
}
