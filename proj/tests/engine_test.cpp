#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "synthsoc/engine.h"
#include "synthsoc/harness/policy.h"
#include "test_support.h"

using namespace synthsoc;
using namespace synthsoc::testing;

namespace {

std::set<std::string> known_names(const Engine& e, AgentId a) {
  std::set<std::string> out;
  const auto& reg = e.registry();
  const auto& res = e.discovered_resources(a);
  for (std::size_t r = 0; r < res.size(); ++r)
    if (res[r]) out.insert(reg.resource(static_cast<ResourceId>(r)).name);
  const auto& ev = e.discovered_events(a);
  for (std::size_t k = 0; k < ev.size(); ++k)
    if (ev[k]) out.insert(reg.event(static_cast<EventId>(k)).name);
  return out;
}

std::set<std::string> pick_templates(const std::vector<std::string>& legal) {
  std::set<std::string> out;
  for (const auto& t : legal)
    if (t.rfind("pick:", 0) == 0) out.insert(t.substr(5));
  return out;
}

// Two carpenters in one equal group; a0 stands on a HammerCraft site holding
// wood and stone.
ScenarioSpec crafting_pair() {
  auto doc = blank_doc({agent_at("carpenter", 3, 3, {{"inventory", {{"wood", 1}, {"stone", 1}}}}),
                        agent_at("carpenter", 0, 0)});
  doc["events"]["HammerCraft"]["sites"] = {{3, 3}};
  doc["scenario"]["graph"] = {{"groups", {{{"members", {"a0", "a1"}}}}}};
  return spec_from(doc);
}

ScenarioSpec messaging(bool linked) {
  auto doc = blank_doc({agent_at("x", 0, 0), agent_at("x", 6, 6), agent_at("x", 0, 6)});
  if (linked) {
    doc["scenario"]["graph"] = {{"links", {{{"from", "a0"}, {"to", "a1"}}, {{"from", "a2"}, {"to", "a1"}}}}};
  }
  return spec_from(doc);
}

std::vector<Action> random_joint(const std::vector<Observation>& obs, const ContentRegistry& reg, Rng& rng) {
  std::vector<Action> joint;
  for (const auto& o : obs) {
    const auto& t = o.legal[static_cast<std::size_t>(rng.below(o.legal.size()))];
    joint.push_back(instantiate_template(t, reg, rng));
  }
  return joint;
}

}  // namespace

TEST(Reset, Deterministic) {
  Engine a(preset("easy"));
  Engine b(preset("easy"));
  const auto oa = a.reset(7);
  const auto ob = b.reset(7);
  EXPECT_EQ(a.world(), b.world());
  EXPECT_EQ(a.state_hash(), b.state_hash());
  EXPECT_EQ(a.rng_hash(), b.rng_hash());
  EXPECT_EQ(oa, ob);
  a.reset(7);
  EXPECT_EQ(a.world(), b.world());
}

TEST(Reset, DifferentSeedsUsuallyDiffer) {
  // Not asserted: two seeds can in principle yield the same placement.
  Engine a(preset("easy"));
  Engine b(preset("easy"));
  a.reset(7);
  b.reset(8);
  if (a.world() == b.world()) GTEST_SKIP() << "seeds 7 and 8 collided";
  SUCCEED();
}

TEST(Reset, EasyDiscoversOnlyRequirementFreeKinds) {
  Engine e(preset("easy"));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    e.reset(seed);
    std::set<std::string> all;
    for (AgentId a = 0; a < 4; ++a) {
      const auto k = known_names(e, a);
      all.insert(k.begin(), k.end());
    }
    EXPECT_EQ(all, (std::set<std::string>{"wood", "stone", "HammerCraft"})) << "seed " << seed;
  }
}

TEST(Reset, EasyPickTemplatesAreWoodAndStone) {
  Engine e(preset("easy"));
  const auto obs = e.reset(1);
  const std::set<std::string> natural{"wood", "stone"};
  for (const auto& o : obs) {
    const auto picks = pick_templates(o.legal);
    EXPECT_TRUE(std::includes(natural.begin(), natural.end(), picks.begin(), picks.end()));
    EXPECT_EQ(picks.count("hammer"), 0u);
  }
}

TEST(Step, AllNoopChangesOnlyTime) {
  Engine e(preset("easy:isolation"));
  e.reset(3);
  const auto world = e.world();
  const auto graph = e.graph();
  const auto r = e.step(noops(4));
  EXPECT_EQ(e.world(), world);
  EXPECT_EQ(e.graph(), graph);
  EXPECT_EQ(e.t(), 1);
  for (const auto& x : r.raw) EXPECT_EQ(x, Rational(0));
  for (double x : r.shared) EXPECT_EQ(x, 0.0);
  EXPECT_TRUE(r.delta.piles.empty() && r.delta.inventories.empty() && r.delta.positions.empty());
}

TEST(Step, ContestedLastUnit) {
  auto doc = blank_doc({agent_at("x", 2, 2), agent_at("x", 2, 2)});
  doc["resources"]["wood"] = {{"piles", {{2, 2}}}, {"amount", 1}};
  const auto spec = spec_from(doc);
  const auto wood = spec.registry.resource_id("wood");
  std::set<AgentId> winners;
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    Engine e(spec);
    e.reset(seed);
    const std::vector<Action> joint{Action::pick(wood), Action::pick(wood)};
    const auto r = e.step(joint);
    const int ok = (r.outcome[0] == "ok") + (r.outcome[1] == "ok");
    ASSERT_EQ(ok, 1);
    const AgentId winner = r.outcome[0] == "ok" ? 0 : 1;
    EXPECT_EQ(r.outcome[static_cast<std::size_t>(1 - winner)], "contested");
    EXPECT_EQ(e.world().agent(winner).inventory.count(wood), 1);
    EXPECT_EQ(e.world().pile({2, 2}, wood), 0);
    winners.insert(winner);

    Engine again(spec);
    again.reset(seed);
    EXPECT_EQ(again.step(joint).outcome, r.outcome);
  }
  EXPECT_EQ(winners.size(), 2u);
}

TEST(Step, SharedHammerRewardSplitsEvenly) {
  Engine e(crafting_pair());
  e.reset(1);
  std::vector<Action> joint{Action::synthesize(), Action::noop()};
  const auto r = e.step(joint);
  EXPECT_EQ(r.outcome[0], "ok");
  EXPECT_EQ(r.raw[0], Rational(3));
  EXPECT_EQ(r.raw[1], Rational(0));
  EXPECT_DOUBLE_EQ(r.shared[0], 1.5);
  EXPECT_DOUBLE_EQ(r.shared[1], 1.5);
  ASSERT_EQ(r.executions.size(), 1u);
  EXPECT_EQ(e.executions()[static_cast<std::size_t>(e.registry().event_id("HammerCraft"))], 1);
}

TEST(Step, MissingInputReported) {
  Engine e(crafting_pair());
  e.reset(1);
  e.step(std::vector<Action>{Action::synthesize(), Action::noop()});
  const auto r = e.step(std::vector<Action>{Action::synthesize(), Action::noop()});
  EXPECT_EQ(r.outcome[0], "missing:wood");
}

TEST(Step, CoalTemplateAppearsAfterHammer) {
  auto doc = blank_doc({agent_at("carpenter", 3, 3, {{"inventory", {{"wood", 1}, {"stone", 1}}}})});
  doc["resources"]["coal"] = {{"piles", {{3, 4}}}, {"amount", 2}};
  doc["events"]["HammerCraft"]["sites"] = {{3, 3}};
  Engine e(spec_from(doc));
  const auto obs = e.reset(1);
  EXPECT_EQ(pick_templates(obs[0].legal).count("coal"), 0u);
  const auto r = e.step(std::vector<Action>{Action::synthesize()});
  EXPECT_EQ(pick_templates(r.observations[0].legal).count("coal"), 1u);
  EXPECT_EQ(pick_templates(r.observations[0].legal).count("hammer"), 1u);

  // Dumping the hammer hides the pile again, but the template stays.
  const auto r2 = e.step(std::vector<Action>{Action::dump(e.registry().resource_id("hammer"))});
  EXPECT_EQ(pick_templates(r2.observations[0].legal).count("coal"), 1u);
}

TEST(Step, TemplatesAndDiscoveryNeverShrink) {
  const auto spec = preset("hard");
  Rng rng(17);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Engine e(spec);
    auto obs = e.reset(seed);
    std::vector<std::set<std::string>> legal(4), known(4);
    while (!e.done()) {
      for (AgentId a = 0; a < 4; ++a) {
        const std::set<std::string> now(obs[static_cast<std::size_t>(a)].legal.begin(),
                                        obs[static_cast<std::size_t>(a)].legal.end());
        const auto k = known_names(e, a);
        ASSERT_TRUE(std::includes(now.begin(), now.end(), legal[static_cast<std::size_t>(a)].begin(),
                                  legal[static_cast<std::size_t>(a)].end()));
        ASSERT_TRUE(std::includes(k.begin(), k.end(), known[static_cast<std::size_t>(a)].begin(),
                                  known[static_cast<std::size_t>(a)].end()));
        legal[static_cast<std::size_t>(a)] = now;
        known[static_cast<std::size_t>(a)] = k;
      }
      obs = e.step(random_joint(obs, e.registry(), rng)).observations;
    }
  }
}

TEST(Step, SharedSumsToRawEveryStep) {
  for (const char* name : {"easy:inequality", "easy:overlapping", "hard:contract", "easy:negotiation"}) {
    Engine e(preset(name));
    Rng rng(3);
    auto obs = e.reset(11);
    while (!e.done()) {
      const auto r = e.step(random_joint(obs, e.registry(), rng));
      double raw = 0, shared = 0;
      for (const auto& x : r.raw) raw += x.to_double();
      for (double x : r.shared) shared += x;
      ASSERT_NEAR(raw, shared, 1e-9) << name << " t=" << r.t;
      obs = r.observations;
    }
  }
}

TEST(Step, DeltasRebuildTheWorld) {
  Engine e(preset("hard:contract"));
  Rng rng(8);
  auto obs = e.reset(21);
  WorldState shadow = e.world();
  while (!e.done()) {
    const auto r = e.step(random_joint(obs, e.registry(), rng));
    apply_delta(shadow, r.delta);
    ASSERT_EQ(shadow, e.world()) << "t=" << r.t;
    obs = r.observations;
  }
}

TEST(Messages, DeliveredAlongEdge) {
  Engine e(messaging(true));
  e.reset(1);
  const std::vector<Action> joint{Action::message(1, "x"), Action::noop(), Action::noop()};
  const auto r = e.step(joint);
  EXPECT_EQ(r.outcome[0], "ok");
  EXPECT_EQ(r.observations[1].inbox, (std::vector<Message>{{0, "x"}}));
  EXPECT_TRUE(r.observations[0].inbox.empty());
  // Inbox holds only the previous step's messages.
  EXPECT_TRUE(e.step(noops(3)).observations[1].inbox.empty());
}

TEST(Messages, DroppedWithoutChannel) {
  Engine e(messaging(false));
  e.reset(1);
  const auto r = e.step(std::vector<Action>{Action::message(1, "x"), Action::noop(), Action::noop()});
  EXPECT_EQ(r.outcome[0], "dropped");
  EXPECT_TRUE(r.observations[1].inbox.empty());
}

TEST(Messages, SenderIdOrder) {
  Engine e(messaging(true));
  e.reset(1);
  const auto r = e.step(std::vector<Action>{Action::message(1, "first"), Action::noop(), Action::message(1, "second")});
  EXPECT_EQ(r.observations[1].inbox, (std::vector<Message>{{0, "first"}, {2, "second"}}));
}

TEST(Messages, PayloadLimit) {
  Engine e(messaging(true));
  e.reset(1);
  const auto r = e.step(
      std::vector<Action>{Action::message(1, std::string(kMaxMessageBytes + 1, 'z')), Action::noop(), Action::noop()});
  EXPECT_EQ(r.outcome[0], "payload_too_large");
  EXPECT_TRUE(r.observations[1].inbox.empty());
  const auto ok = e.step(
      std::vector<Action>{Action::message(1, std::string(kMaxMessageBytes, 'z')), Action::noop(), Action::noop()});
  EXPECT_EQ(ok.outcome[0], "ok");
}

TEST(Step, IllegalActionBecomesNoop) {
  Engine e(preset("easy"));
  e.reset(1);
  // hammer has not been discovered by anyone at the start
  const auto hammer = e.registry().resource_id("hammer");
  auto joint = noops(4);
  joint[0] = Action::pick(hammer);
  joint[1] = Action::message(9, "x");
  const auto r = e.step(joint);
  EXPECT_EQ(r.outcome[0], "illegal");
  EXPECT_EQ(r.outcome[1], "illegal");
  EXPECT_EQ(r.actions[0], Action::noop());
  EXPECT_EQ(r.submitted[0], Action::pick(hammer));
}

TEST(Step, PhysicalBlockedDuringFormation) {
  Engine e(preset("easy:contract"));
  e.reset(1);
  const auto r = e.step(std::vector<Action>(4, Action::move(Direction::east)));
  for (const auto& o : r.outcome) EXPECT_EQ(o, "phase");
}

TEST(Step, Errors) {
  Engine e(preset("easy:isolation"));
  e.reset(1);
  EXPECT_THROW(e.step(noops(3)), std::invalid_argument);
  while (!e.done()) e.step(noops(4));
  EXPECT_EQ(e.t(), 100);
  EXPECT_THROW(e.step(noops(4)), std::logic_error);
}

TEST(Step, DoneFlagOnLastStep) {
  auto doc = blank_doc({agent_at("x", 0, 0)}, 3);
  Engine e(spec_from(doc));
  e.reset(0);
  EXPECT_FALSE(e.step(noops(1)).done);
  EXPECT_FALSE(e.step(noops(1)).done);
  const auto r = e.step(noops(1));
  EXPECT_TRUE(r.done);
  EXPECT_TRUE(r.observations[0].done);
}

TEST(Actions, TextRoundTrip) {
  const auto& reg = builtin_registry();
  const std::vector<Action> all{Action::noop(),
                                Action::move(Direction::west),
                                Action::pick(reg.resource_id("gem_mine")),
                                Action::dump(reg.resource_id("wood")),
                                Action::synthesize(),
                                Action::message(2, "hello: world"),
                                Action::with_target(ActionKind::select_group, 1),
                                Action::with_target(ActionKind::request, 3),
                                Action::propose(0.35),
                                Action::accept(),
                                Action::decline(),
                                Action::with_target(ActionKind::connect, 0),
                                Action::with_target(ActionKind::disconnect, 0),
                                Action::with_target(ActionKind::join, 2),
                                Action::with_target(ActionKind::leave, 2)};
  for (const auto& a : all) {
    const auto text = encode_action(a, reg);
    const auto back = parse_action(text, reg);
    ASSERT_TRUE(back.has_value()) << text;
    EXPECT_EQ(*back, a) << text;
  }
  EXPECT_FALSE(parse_action("pick:obsidian", reg).has_value());
  EXPECT_FALSE(parse_action("move:up", reg).has_value());
  EXPECT_FALSE(parse_action("", reg).has_value());
  EXPECT_EQ(action_template(Action::propose(0.35), reg), "propose");
  EXPECT_EQ(action_template(Action::message(2, "x"), reg), "message:a2");
}
