#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <map>

#include "fixtures.hpp"
#include "tdcp/error.hpp"
#include "tdcp/evaluate.hpp"
#include "tdcp/learner.hpp"
#include "tdcp/model_io.hpp"

using namespace tdcp;

namespace {

LearnerConfig small_config(std::uint64_t episodes, std::size_t h = 10000) {
  LearnerConfig c;
  c.episodes = episodes;
  c.hash_size = h;
  c.eval_rollouts = 200;
  return c;
}

Model negated(const Model& m) {
  auto j = model_to_json(m);
  j["objective"]["sense"] = "minimize";
  for (auto& t : j["objective"]["terms"]) t["coeff"] = -t["coeff"].get<double>();
  return model_from_json(j);
}

}  // namespace

TEST_SUITE("td-learner") {

TEST_CASE("state hash basics") {
  const Model m = build_artificial(4);
  const ZobristTable z(m.variables(), 1000, 17);
  CHECK(z.state_hash({}) == 0);
  const VarId d2 = m.variables().require("d2");
  const std::vector<Assignment> one{{d2, 3}};
  CHECK(z.state_hash(one) == z.code(d2, 3) % 1000);
  std::vector<Assignment> set{{d2, 3}, {m.variables().require("r1"), 4}, {m.variables().require("d4"), 1}};
  const auto h = z.state_hash(set);
  std::reverse(set.begin(), set.end());
  CHECK(z.state_hash(set) == h);
  std::swap(set[0], set[1]);
  CHECK(z.state_hash(set) == h);
  CHECK_THROWS_AS(z.code(d2, 9), ContractViolation);
}

TEST_CASE("incremental hash equals recomputation") {
  const Model m = build_artificial(6);
  const auto& vars = m.variables();
  const ZobristTable z(vars, 99991, 5);
  Rng rng(1234);
  for (int trial = 0; trial < 100000; ++trial) {
    std::vector<Assignment> set;
    std::uint64_t running = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (rng.below(2) == 0) continue;
      const VarId v = vars.id(i);
      const std::size_t idx = rng.below(vars.original(v).size());
      set.push_back({v, vars.value_at(v, idx)});
      running ^= z.code_at(v, idx);
    }
    REQUIRE(z.slot(running) == z.state_hash(set));
    REQUIRE(running == z.raw_hash(set));
  }
}

TEST_CASE("a complete artificial N=2 episode makes four assignments") {
  const Model m = build_artificial(2);
  const auto cfg = small_config(1);
  EpisodeRunner runner(m, {}, cfg);
  const ValueTable values(cfg.hash_size, {}, cfg.seeds.zobrist);
  Rng explore(1);
  Rng sample(2);
  const auto trace = run_episode(runner, values, 0.5, explore, sample);
  CHECK_FALSE(trace.truncated);
  CHECK(trace.states.size() == 5);
  REQUIRE(trace.rewards.size() == 4);
  const double k = runner.step_reward();
  CHECK(k == 2.0);  // bound 1 + 1
  double total = 0.0;
  for (double r : trace.rewards) total += r;
  CHECK(total == 4 * k);
  REQUIRE(trace.objective.has_value());
  CHECK(trace.terminal_reward == *trace.objective);
}

TEST_CASE("forced wipe-out truncates after one assignment") {
  const Model m = fixtures::doomed_model();
  const auto cfg = small_config(1, 64);
  EpisodeRunner runner(m, {}, cfg);
  const ValueTable values(64, {}, cfg.seeds.zobrist);
  Rng explore(1);
  Rng sample(2);
  for (int i = 0; i < 20; ++i) {
    const auto trace = run_episode(runner, values, 0.3, explore, sample);
    CHECK(trace.truncated);
    CHECK(trace.halt == HaltReason::wipe_out);
    CHECK_FALSE(trace.objective.has_value());
    REQUIRE(trace.rewards.size() == 1);
    CHECK(trace.rewards[0] == runner.step_reward());
    CHECK(trace.terminal_reward == 0.0);
  }
}

TEST_CASE("integrity failure halts the episode before the random assignment") {
  const Model m = fixtures::integrity_model();
  const auto cfg = small_config(1, 64);
  EpisodeRunner runner(m, {}, cfg);
  const ValueTable values(64, {}, cfg.seeds.zobrist);
  Rng explore(3);
  Rng sample(4);
  int halts = 0;
  int completed = 0;
  for (int i = 0; i < 200; ++i) {
    const auto trace = run_episode(runner, values, 1.0, explore, sample);
    if (trace.halt == HaltReason::integrity) {
      ++halts;
      CHECK(trace.truncated);
      CHECK(trace.rewards.size() == 1);  // only x was assigned
      CHECK_FALSE(trace.objective.has_value());
    } else {
      ++completed;
      CHECK(trace.rewards.size() == 2);
    }
  }
  CHECK(halts > 50);
  CHECK(completed > 50);
}

TEST_CASE("alpha zero leaves the table bitwise unchanged") {
  const Model m = build_artificial(3);
  auto cfg = small_config(2000);
  cfg.alpha = 0.0;
  cfg.epsilon.start = cfg.epsilon.end = 1.0;
  const auto r = train(m, {}, cfg);
  const ValueTable zero(cfg.hash_size, {}, cfg.seeds.zobrist);
  CHECK(r.values == zero);
}

TEST_CASE("td_update worked examples") {
  ValueTable v(8, {}, 1);
  EpisodeTrace single;
  single.states = {3};
  single.terminal_reward = 7.5;
  td_update(v, single, 0.0);
  CHECK(v[3] == 0.0);
  td_update(v, single, 1.0);
  CHECK(v[3] == 7.5);

  // Reverse order: the terminal state is updated first and s_0 bootstraps
  // from its new value.
  ValueTable w(8, {}, 1);
  const double k = 5.0;
  EpisodeTrace two;
  two.states = {1, 2};
  two.rewards = {k};
  two.terminal_reward = 2.0;
  td_update(w, two, 0.5);
  CHECK(w[2] == 1.0);
  CHECK(w[1] == (k + 1.0) / 2.0);
}

TEST_CASE("zero episodes give an all-zero table and an empty curve") {
  const Model m = build_artificial(3);
  auto cfg = small_config(0);
  const auto r = train(m, {}, cfg);
  CHECK(r.curve.empty());
  CHECK(std::all_of(r.values.values().begin(), r.values.values().end(), [](double x) { return x == 0.0; }));
  const auto ex = extract_plan(m, {}, r.values, cfg);
  REQUIRE(ex.plan);
  CHECK(ex.plan->values() == std::vector<int>{1, 2, 3});
}

TEST_CASE("identical seeds give identical curves and tables") {
  const Model m = build_artificial(4);
  auto cfg = small_config(5000);
  cfg.checkpoints = {100, 1000, 5000};
  const auto a = train(m, {}, cfg);
  const auto b = train(m, {}, cfg);
  REQUIRE(a.curve.size() == 3);
  CHECK(a.values == b.values);
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    CHECK(a.curve[i].episode == b.curve[i].episode);
    CHECK(std::memcmp(&a.curve[i].estimate, &b.curve[i].estimate, sizeof(double)) == 0);
  }
  cfg.seeds.exploration = 77;
  const auto c = train(m, {}, cfg);
  CHECK_FALSE(c.values == a.values);
}

TEST_CASE("artificial N=3 training reaches the optimum in most seeds") {
  const Model m = build_artificial(3);
  const auto opt = exhaustive_opt(m);
  int hits = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto cfg = small_config(50000);
    cfg.seeds = {10 + s, 20 + s, 30 + s};
    const auto r = train(m, {}, cfg);
    const auto ex = extract_plan(m, {}, r.values, cfg);
    REQUIRE(ex.plan);
    hits += ex.plan->decisions == opt.plan.decisions;
  }
  CHECK(hits >= 8);
}

TEST_CASE("artificial N=2 plan and estimate") {
  const Model m = build_artificial(2);
  auto cfg = small_config(5000);
  cfg.eval_rollouts = 1000;
  const auto r = train(m, {}, cfg);
  const auto ex = extract_plan(m, {}, r.values, cfg);
  REQUIRE(ex.plan);
  CHECK(ex.plan->values() == std::vector<int>{1, 2});
  CHECK(ex.plan->estimated == doctest::Approx(1.0));
}

TEST_CASE("disaster toy estimate agrees with exact evaluation") {
  const Model m = fixtures::toy_model();
  auto cfg = small_config(20000);
  cfg.eval_rollouts = 4000;
  const auto r = train(m, {}, cfg);
  const auto ex = extract_plan(m, {}, r.values, cfg);
  REQUIRE(ex.plan);
  const double exact = exact_eval(m, ex.plan->decisions);
  CHECK(std::abs(ex.plan->estimated - exact) <= 3.0 * ex.plan->estimate_stderr);
}

TEST_CASE("exploration with epsilon one is uniform over the filtered domain") {
  ModelBuilder b;
  const VarId x = b.add_decision("x", Domain{1, 2, 3, 4});
  const VarId r = b.add_random("r", Domain{0, 1}, Pmf{{{0, 0.5}, {1, 0.5}}});
  b.set_objective({Sense::maximize, Expectation{{{1.0, {VarFactor{r}}}}}});
  b.add_stage({{x}, {r}});
  b.set_objective_bound(1.0);
  const Model m = std::move(b).build();
  const auto cfg = small_config(1, 128);
  EpisodeRunner runner(m, {}, cfg);
  ValueTable values(128, {}, cfg.seeds.zobrist);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i);  // strong greedy bias
  Rng explore(8);
  Rng sample(9);
  std::map<int, int> counts;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto t = run_episode(runner, values, 1.0, explore, sample);
    ++counts[t.first_stage.at(0).value];
  }
  const double p = 0.25;
  const double sigma = std::sqrt(n * p * (1 - p));
  for (int v = 1; v <= 4; ++v) CHECK(std::abs(counts[v] - n * p) < 5 * sigma);
}

TEST_CASE("completed episodes out-earn shorter truncated ones") {
  ModelBuilder b;
  const VarId a = b.add_decision("a", Domain{1, 2, 3});
  const VarId c = b.add_decision("b", Domain{1, 2, 3});
  const VarId d = b.add_decision("c", Domain{1, 2});
  const VarId r = b.add_random("r", Domain{0, 1, 2, 3}, Pmf{{{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}}});
  b.add_constraint(AllDifferent{{a, c, d}});
  b.set_objective({Sense::maximize, Expectation{{{1.0, {VarFactor{r}}}}}});
  b.add_stage({{a, c, d}, {r}});
  b.set_objective_bound(3.0);
  const Model m = std::move(b).build();
  const auto cfg = small_config(1, 256);
  EpisodeRunner runner(m, {}, cfg);
  const ValueTable values(256, {}, cfg.seeds.zobrist);
  Rng explore(5);
  Rng sample(6);
  double min_complete = 1e300;
  std::map<std::size_t, double> max_truncated;
  for (int i = 0; i < 5000; ++i) {
    const auto t = run_episode(runner, values, 1.0, explore, sample);
    double total = t.terminal_reward;
    for (double x : t.rewards) total += x;
    if (t.truncated) {
      auto& mx = max_truncated[t.rewards.size()];
      mx = std::max(mx, total);
    } else {
      min_complete = std::min(min_complete, total);
    }
  }
  REQUIRE_FALSE(max_truncated.empty());
  REQUIRE(min_complete < 1e300);
  for (const auto& [n, total] : max_truncated) {
    CHECK(n < 4);
    CHECK(min_complete > total);
  }
}

TEST_CASE("step reward must exceed the objective bound") {
  const Model m = build_artificial(3);
  LearnerConfig cfg;
  cfg.k_reward = 3.0;  // bound is 3
  CHECK_THROWS_AS(cfg.validate(m), Error);
  cfg.k_reward = 3.5;
  CHECK_NOTHROW(cfg.validate(m));
  cfg.k_reward.reset();
  CHECK(cfg.step_reward(m) == 4.0);
  cfg.alpha = 1.5;
  CHECK_THROWS_AS(cfg.validate(m), Error);
}

TEST_CASE("epsilon schedule") {
  EpsilonSchedule e;
  CHECK(e.at(0, 100) == doctest::Approx(0.2));
  CHECK(e.at(40, 100) == doctest::Approx(0.105));
  CHECK(e.at(80, 100) == doctest::Approx(0.01));
  CHECK(e.at(99, 100) == doctest::Approx(0.01));
  e.shape = DecayShape::exponential;
  CHECK(e.at(40, 100) == doctest::Approx(0.2 * std::pow(0.05, 0.5)));
  e.shape = DecayShape::constant;
  CHECK(e.at(90, 100) == 0.2);
}

TEST_CASE("value tables refuse a different solver configuration") {
  const auto dir = std::filesystem::temp_directory_path() / "tdcp_vt_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "table.bin";
  const Model m = build_artificial(3);
  auto cfg = small_config(500, 512);
  const auto r = train(m, {}, cfg);
  r.values.save(path);
  const auto back = ValueTable::load(path, SolverFingerprint{});
  CHECK(back == r.values);
  SolverFingerprint strong;
  strong.alldifferent = AllDifferentStrength::strong;
  CHECK_THROWS_AS(ValueTable::load(path, strong), FingerprintMismatch);

  EpisodeRunner runner(m, strong, cfg);
  Rng e(1);
  Rng s(2);
  CHECK_THROWS_AS(run_episode(runner, r.values, 0.0, e, s), ContractViolation);
  std::filesystem::remove_all(dir);
}

TEST_CASE("completed artificial episodes assign permutations") {
  const Model m = build_artificial(5);
  const auto cfg = small_config(1);
  EpisodeRunner runner(m, {}, cfg);
  const ValueTable values(cfg.hash_size, {}, cfg.seeds.zobrist);
  Rng explore(11);
  Rng sample(12);
  for (int i = 0; i < 500; ++i) {
    const auto t = run_episode(runner, values, 1.0, explore, sample);
    REQUIRE_FALSE(t.truncated);
    std::vector<int> d;
    for (const auto& a : t.first_stage) d.push_back(a.value);
    std::sort(d.begin(), d.end());
    CHECK(d == std::vector<int>{1, 2, 3, 4, 5});
  }
}

TEST_CASE("identical streams reproduce traces") {
  const Model m = fixtures::toy_model();
  const auto cfg = small_config(1, 1024);
  EpisodeRunner r1(m, {}, cfg);
  EpisodeRunner r2(m, {}, cfg);
  const ValueTable values(1024, {}, cfg.seeds.zobrist);
  Rng e1(4), s1(5), e2(4), s2(5);
  for (int i = 0; i < 100; ++i) {
    const auto a = run_episode(r1, values, 0.5, e1, s1);
    const auto b = run_episode(r2, values, 0.5, e2, s2);
    CHECK(a.states == b.states);
    CHECK(a.objective == b.objective);
  }
}

TEST_CASE("maximize f and minimize -f learn the same plan") {
  const Model up = build_artificial(4);
  const Model down = negated(up);
  auto cfg = small_config(20000);
  const auto a = train(up, {}, cfg);
  auto cfg_down = cfg;
  cfg_down.k_reward = cfg.step_reward(up);
  const auto b = train(down, {}, cfg_down);
  CHECK(a.values == b.values);
  const auto pa = extract_plan(up, {}, a.values, cfg);
  const auto pb = extract_plan(down, {}, b.values, cfg_down);
  REQUIRE(pa.plan);
  REQUIRE(pb.plan);
  CHECK(pa.plan->decisions == pb.plan->decisions);
  CHECK(pa.plan->estimated == doctest::Approx(-pb.plan->estimated));
}

}  // TEST_SUITE
