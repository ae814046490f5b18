// One PASS/FAIL line per headline criterion. Exit status is nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "synthsoc/harness/client.h"
#include "synthsoc/harness/runner.h"
#include "synthsoc/harness/server.h"
#include "synthsoc/metrics.h"
#include "synthsoc/oracle.h"
#include "synthsoc/scenarios.h"
#include "synthsoc/social.h"
#include "test_support.h"

using namespace synthsoc;
using namespace synthsoc::testing;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<Action> random_joint(const std::vector<Observation>& obs, const ContentRegistry& reg, Rng& rng) {
  std::vector<Action> out;
  for (const auto& o : obs) out.push_back(instantiate_template(o.legal[rng.below(o.legal.size())], reg, rng));
  return out;
}

Verdict fairness_suite() {
  Verdict v;
  const auto t0 = Clock::now();
  if (*fairness(std::vector<double>{5, 5, 5, 5}) != 1.0) v.fail("(5,5,5,5)");
  if (std::fabs(*fairness(std::vector<double>{1, 0}) - 0.5) > 1e-12) v.fail("(1,0)");
  if (std::fabs(*fairness(std::vector<double>{3, 1}) - 0.75) > 1e-12) v.fail("(3,1)");
  Rng rng(1);
  for (int k = 0; k < 1000 && v.ok; ++k) {
    std::vector<double> r(1 + rng.below(12));
    for (auto& x : r) x = 0.001 + rng.unit() * 50;
    const double f = *fairness(r);
    auto s = r;
    const double alpha = 0.01 + rng.unit() * 100;
    for (auto& x : s) x *= alpha;
    auto p = r;
    rng.shuffle(std::span<double>(p));
    if (std::fabs(*fairness(s) - f) > 1e-9) v.fail("scale, vector " + std::to_string(k));
    if (std::fabs(*fairness(p) - f) > 1e-9) v.fail("permutation, vector " + std::to_string(k));
  }
  const double secs = seconds_since(t0);
  if (secs >= 1.0) v.fail("took " + std::to_string(secs) + " s");
  if (v.ok) v.detail = "worked values exact; 1000 vectors invariant; " + std::to_string(secs) + " s";
  return v;
}

Verdict reward_formula() {
  Verdict v;
  auto doc = blank_doc({agent_at("carpenter", 3, 3, {{"inventory", {{"wood", 1}, {"stone", 1}}}}),
                        agent_at("miner", 0, 0,
                                 {{"capacity", {{"wood", 0}, {"stone", 0}}},
                                  {"preference", {{"hammer", 2}}},
                                  {"inventory", {{"hammer", 3}}}})},
                       2);
  doc["events"]["HammerCraft"]["sites"] = {{3, 3}};
  const auto spec = spec_from(doc);
  Engine e(spec);
  e.reset(1);
  const auto& reg = e.registry();
  const auto miner = valuation(reg, e.world().agent(1));
  if (miner != Rational(30)) v.fail("miner valuation " + miner.to_string());
  const auto r = e.step(std::vector<Action>{Action::synthesize(), Action::noop()});
  if (r.raw[0] != Rational(3)) v.fail("HammerCraft delta " + r.raw[0].to_string());
  if (r.raw[1] != Rational(0)) v.fail("idle miner delta " + r.raw[1].to_string());
  if (v.ok) v.detail = "miner 3 hammers = 30; HammerCraft delta = +3";
  return v;
}

Verdict oracle_correctness() {
  Verdict v;
  const auto t0 = Clock::now();
  const auto& reg = builtin_registry();
  auto only = [&](std::set<std::string> names) {
    std::vector<bool> p(static_cast<std::size_t>(reg.event_count()), false);
    for (const auto& n : names) p[static_cast<std::size_t>(reg.event_id(n))] = true;
    return p;
  };
  const auto six = make_instance(reg, {{"wood", 2}, {"stone", 1}}, {}, only({"HammerCraft"}));
  const auto twenty_six =
      make_instance(reg, {{"wood", 3}, {"stone", 1}, {"coal", 1}}, {}, only({"HammerCraft", "TorchCraft"}));
  if (solve(six).objective != Rational(6) || brute_force(six).objective != Rational(6)) v.fail("worked instance 6");
  if (solve(twenty_six).objective != Rational(26) || brute_force(twenty_six).objective != Rational(26))
    v.fail("worked instance 26");
  Rng rng(2026);
  for (int k = 0; k < 200 && v.ok; ++k) {
    const auto inst = random_instance(rng, 4, 5);
    const auto s = solve(inst);
    const auto b = brute_force(inst);
    if (s.objective != b.objective)
      v.fail("instance " + std::to_string(k) + ": " + s.objective.to_string() + " vs " + b.objective.to_string());
  }
  const double secs = seconds_since(t0);
  if (secs >= 60) v.fail("took " + std::to_string(secs) + " s");
  if (v.ok) v.detail = "6, 26 and 200 random instances agree; " + std::to_string(secs) + " s";
  return v;
}

Verdict negotiation_algebra() {
  Verdict v;
  const auto w = merge_weights({{0, 0.6}, {1, 0.4}}, 2, 0.5, 0.5);
  if (std::fabs(w.at(0) - 0.3) > 1e-12 || std::fabs(w.at(1) - 0.2) > 1e-12 || std::fabs(w.at(2) - 0.5) > 1e-12)
    v.fail("worked merge");
  Rng rng(5);
  for (int seq = 0; seq < 10000 && v.ok; ++seq) {
    std::map<AgentId, double> g{{0, 1.0}};
    AgentId next = 1;
    const int merges = 1 + static_cast<int>(rng.below(10));
    for (int k = 0; k < merges && v.ok; ++k) {
      const double s = rng.unit();
      if (rng.below(3) == 0) {
        const double a = rng.unit();
        g = merge_sides(g, {{next, a}, {next + 1, 1 - a}}, s);
        next += 2;
      } else {
        g = merge_weights(g, next++, s, 1 - s);
      }
      double sum = 0;
      for (const auto& [id, x] : g) {
        sum += x;
        if (x < 0) v.fail("negative weight in sequence " + std::to_string(seq));
      }
      if (std::fabs(sum - 1) > 1e-9) v.fail("sum " + std::to_string(sum) + " in sequence " + std::to_string(seq));
    }
  }
  if (v.ok) v.detail = "{0.3,0.2,0.5}; 10000 sequences sum to 1";
  return v;
}

Verdict conservation() {
  Verdict v;
  Rng rng(7);
  for (int trial = 0; trial < 10000 && v.ok; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(10));
    const int groups = static_cast<int>(rng.below(5));
    SocialGraph g(n, groups);
    for (int k = 0; k < groups; ++k) {
      std::vector<AgentId> m;
      for (int a = 0; a < n; ++a)
        if (rng.below(2) == 0) m.push_back(a);
      const bool weighted = !m.empty() && rng.below(2) == 0;
      g.set_weighted(k, weighted);
      std::vector<double> w(m.size(), 0.0);
      if (weighted) {
        double s = 0;
        for (auto& x : w) s += (x = rng.unit() + 1e-3);
        for (auto& x : w) x /= s;
      }
      for (std::size_t i = 0; i < m.size(); ++i) g.join(m[i], k, w[i]);
    }
    std::vector<double> raw(static_cast<std::size_t>(n));
    for (auto& r : raw) r = (rng.unit() - 0.4) * 100;
    const auto out = redistribute(raw, g);
    const double a = std::accumulate(raw.begin(), raw.end(), 0.0), b = std::accumulate(out.begin(), out.end(), 0.0);
    if (std::fabs(a - b) > 1e-9) v.fail("graph " + std::to_string(trial));
  }
  const char* presets[] = {"easy:inequality", "easy:overlapping", "easy:contract", "easy:negotiation", "hard:dynamic"};
  std::int64_t steps = 0;
  for (int ep = 0; ep < 100 && v.ok; ++ep) {
    Engine e(preset(presets[ep % 5]));
    Rng pick(static_cast<std::uint64_t>(ep) + 100);
    auto obs = e.reset(static_cast<std::uint64_t>(ep));
    while (!e.done() && v.ok) {
      const auto r = e.step(random_joint(obs, e.registry(), pick));
      double raw = 0, shared = 0;
      for (const auto& x : r.raw) raw += x.to_double();
      for (double x : r.shared) shared += x;
      if (std::fabs(raw - shared) > 1e-9) v.fail(std::string(presets[ep % 5]) + " t=" + std::to_string(r.t));
      obs = std::move(r.observations);
      ++steps;
    }
  }
  if (v.ok) v.detail = "10000 graphs; 100 episodes, " + std::to_string(steps) + " steps";
  return v;
}

Verdict monotonicity() {
  Verdict v;
  const auto spec = preset("hard");
  std::int64_t violations = 0;
  for (std::uint64_t ep = 0; ep < 100; ++ep) {
    Engine e(spec);
    Rng rng(ep * 31 + 1);
    auto obs = e.reset(ep);
    const int n = e.agent_count();
    std::vector<std::set<std::string>> legal(static_cast<std::size_t>(n));
    std::vector<std::vector<bool>> res(static_cast<std::size_t>(n)), ev(static_cast<std::size_t>(n));
    while (true) {
      for (AgentId a = 0; a < n; ++a) {
        const auto i = static_cast<std::size_t>(a);
        const std::set<std::string> now(obs[i].legal.begin(), obs[i].legal.end());
        if (!std::includes(now.begin(), now.end(), legal[i].begin(), legal[i].end())) ++violations;
        const auto& r = e.discovered_resources(a);
        const auto& x = e.discovered_events(a);
        for (std::size_t k = 0; k < res[i].size(); ++k)
          if (res[i][k] && !r[k]) ++violations;
        for (std::size_t k = 0; k < ev[i].size(); ++k)
          if (ev[i][k] && !x[k]) ++violations;
        legal[i] = now;
        res[i] = r;
        ev[i] = x;
      }
      if (e.done()) break;
      obs = e.step(random_joint(obs, e.registry(), rng)).observations;
    }
  }
  if (violations != 0) v.fail(std::to_string(violations) + " violations");
  else v.detail = "100 Hard episodes, zero violations";
  return v;
}

std::string loopback_trace(const ScenarioSpec& spec, PolicyKind kind, std::uint64_t seed) {
  std::ostringstream record;
  ServeOptions opt;
  opt.seed = seed;
  opt.action_timeout = 0;
  opt.record = &record;
  Server server(spec, opt);
  std::thread st([&] { server.run(); });
  std::vector<std::thread> clients;
  for (AgentId a = 0; a < spec.agent_count(); ++a) {
    clients.emplace_back([&, a] {
      Client c("127.0.0.1", server.port(), a);
      auto p = make_policy(kind, c.spec(), a);
      run_client(c, *p);
    });
  }
  for (auto& t : clients) t.join();
  st.join();
  return record.str();
}

Verdict determinism_and_replay() {
  Verdict v;
  const char* presets[] = {"easy:contract", "easy:negotiation", "hard:dynamic", "easy:inequality", "exploration"};
  for (int ep = 0; ep < 20 && v.ok; ++ep) {
    const auto spec = preset(presets[ep % 5]);
    const auto kind = ep % 2 == 0 ? PolicyKind::random : PolicyKind::greedy;
    const auto seed = static_cast<std::uint64_t>(1000 + ep);
    auto a = make_policies({kind}, spec);
    auto b = make_policies({kind}, spec);
    const auto first = run_episode(spec, a, seed, true).trace_text;
    const auto second = run_episode(spec, b, seed, true).trace_text;
    const auto remote = loopback_trace(spec, kind, seed);
    if (first != second) v.fail("in-process rerun differs, episode " + std::to_string(ep));
    if (first != remote) v.fail("loopback differs, episode " + std::to_string(ep));
    std::istringstream in(remote);
    const auto tr = read_trace(in);
    const auto ra = replay_actions(tr);
    const auto rd = replay_deltas(tr);
    if (!ra.ok) v.fail("action replay, episode " + std::to_string(ep) + ": " + ra.message);
    if (!rd.ok) v.fail("delta replay, episode " + std::to_string(ep) + ": " + rd.message);
  }
  if (v.ok) v.detail = "20 episodes byte-identical in-process and over loopback; replay matches every step";
  return v;
}

Verdict protocol_conformance() {
  Verdict v;
  std::set<std::vector<AgentId>> orders;
  for (int rounds : {1, 2, 3}) {
    auto doc = preset_json("easy:contract");
    doc["scenario"]["rounds"] = rounds;
    const auto spec = spec_from(doc);
    const int n = spec.agent_count();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Engine e(spec);
      e.reset(seed);
      const auto& sc = e.scenario();
      const auto order = sc.contract_order();
      orders.insert(order);
      if (std::set<AgentId>(order.begin(), order.end()).size() != static_cast<std::size_t>(n))
        v.fail("order is not a permutation");
      if (sc.formation_steps() != static_cast<std::int64_t>(rounds) * n) v.fail("formation length");
      for (std::int64_t t = 0; t < sc.formation_steps(); ++t) {
        if (sc.phase(t) != Phase::formation || sc.selector(t) != order[static_cast<std::size_t>(t % n)])
          v.fail("selector at t=" + std::to_string(t));
      }
      if (sc.phase(sc.formation_steps()) != Phase::physical) v.fail("physical phase start");
      // drive it: only the selector's choice lands
      while (e.t() < sc.formation_steps()) {
        const AgentId sel = *sc.selector(e.t());
        std::vector<Action> joint(static_cast<std::size_t>(n), Action::with_target(ActionKind::select_group, 0));
        const auto r = e.step(joint);
        for (AgentId a = 0; a < n; ++a)
          if (a != sel && r.outcome[static_cast<std::size_t>(a)] != "out_of_turn") v.fail("out-of-turn select accepted");
      }
    }
  }
  if (orders.size() < 2) v.fail("round-robin order never varies with the seed");

  const auto spec = preset("easy:dynamic");
  Engine e(spec);
  e.reset(3);
  std::vector<std::pair<std::int64_t, StructureCategory>> switches;
  auto cat = classify_structure(e.graph());
  switches.emplace_back(0, cat);
  while (!e.done()) {
    e.step(noops(e.agent_count()));
    const auto now = classify_structure(e.graph());
    if (now != cat) switches.emplace_back(e.t(), now);
    cat = now;
  }
  const std::vector<std::pair<std::int64_t, StructureCategory>> want{
      {0, StructureCategory::inequality}, {30, StructureCategory::independent_group},
      {60, StructureCategory::overlapping_group}};
  if (switches != want) v.fail("dynamic schedule switched at unexpected steps");
  if (v.ok) v.detail = "cN formation with seeded order; Inequality@0 -> IndependentGroup@30 -> OverlappingGroup@60";
  return v;
}

Verdict random_baseline() {
  Verdict v;
  const auto spec = preset("easy:contract");
  const auto sol = solve(build_instance(spec));
  if (!sol.proven || sol.objective <= Rational(0)) {
    v.fail("oracle objective unusable");
    return v;
  }
  double sum = 0;
  int count = 0;
  for (const auto& s : run_batch(spec, {PolicyKind::random}, 4242, 100, &sol))
    for (const auto& n : s.normalized) {
      sum += *n;
      ++count;
    }
  const double mean = sum / count;
  char buf[96];
  std::snprintf(buf, sizeof buf, "mean normalized reward %.5f over 100 episodes", mean);
  v.detail = buf;
  if (!(mean > 0 && mean < 0.05)) v.ok = false;
  return v;
}

Verdict throughput() {
  Verdict v;
  const auto r = measure_throughput(preset("exploration"), PolicyKind::greedy, 1, 10);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.0f steps/s (greedy, 4 agents, Exploration)", r.steps_per_second());
  v.detail = buf;
  if (r.steps_per_second() < 500) v.ok = false;
  return v;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> checks[] = {
      {"fairness-formula", fairness_suite},
      {"reward-formula", reward_formula},
      {"oracle-correctness", oracle_correctness},
      {"negotiation-algebra", negotiation_algebra},
      {"conservation", conservation},
      {"growing-monotonicity", monotonicity},
      {"determinism-replay", determinism_and_replay},
      {"protocol-conformance", protocol_conformance},
      {"random-baseline", random_baseline},
      {"throughput", throughput},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.fail(std::string("threw: ") + e.what());
    }
    std::printf("%s %s: %s\n", v.ok ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
    if (!v.ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
