#include <gtest/gtest.h>

#include <map>
#include <queue>
#include <set>

#include "synthsoc/config.h"
#include "test_support.h"

using namespace synthsoc;
using namespace synthsoc::testing;

TEST(Registry, TotemIsSynthesizedAndWorth1000) {
  const auto& reg = builtin_registry();
  const auto& totem = reg.resource(reg.resource_id("Totem"));
  EXPECT_EQ(totem.objective_reward, Rational(1000));
  EXPECT_TRUE(totem.synthesized);
}

TEST(Registry, TorchCraftShape) {
  const auto& reg = builtin_registry();
  const auto& ev = reg.event(reg.event_id("TorchCraft"));
  const std::vector<ItemCount> inputs{{"wood", 1}, {"coal", 1}};
  const std::vector<ItemCount> outputs{{"torch", 1}};
  EXPECT_EQ(ev.inputs, inputs);
  EXPECT_EQ(ev.outputs, outputs);
  EXPECT_EQ(ev.requirement, std::vector<std::string>{"coal"});
}

TEST(Registry, WoodHasNoRequirement) {
  const auto& reg = builtin_registry();
  EXPECT_TRUE(reg.resource(reg.resource_id("Wood")).requirement.empty());
}

TEST(Registry, NameNormalization) {
  const auto& reg = builtin_registry();
  EXPECT_EQ(reg.resource_id("GemMine"), reg.resource_id("gem_mine"));
  EXPECT_EQ(reg.resource_id("gem mine"), reg.resource_id("gem_mine"));
  EXPECT_EQ(reg.event_id("hammer_craft"), reg.event_id("HammerCraft"));
}

TEST(Registry, FifteenResourcesNineEvents) {
  EXPECT_EQ(builtin_registry().resource_count(), 15);
  EXPECT_EQ(builtin_registry().event_count(), 9);
}

// Kahn's algorithm over resources, events as edges input -> output, with
// requirements as extra edges. Written independently of validate_registry.
TEST(Registry, BuiltinIsAcyclic) {
  const auto& reg = builtin_registry();
  const int n = reg.resource_count();
  std::vector<std::set<int>> out(static_cast<std::size_t>(n));
  for (const auto& ev : reg.events()) {
    const int o = reg.resource_id(ev.outputs.at(0).resource);
    for (const auto& in : ev.inputs) out[static_cast<std::size_t>(reg.resource_id(in.resource))].insert(o);
    for (const auto& q : ev.requirement) out[static_cast<std::size_t>(reg.resource_id(q))].insert(o);
  }
  std::vector<int> indeg(static_cast<std::size_t>(n), 0);
  for (const auto& s : out)
    for (int t : s) ++indeg[static_cast<std::size_t>(t)];
  std::queue<int> q;
  for (int i = 0; i < n; ++i)
    if (indeg[static_cast<std::size_t>(i)] == 0) q.push(i);
  int seen = 0;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    ++seen;
    for (int t : out[static_cast<std::size_t>(v)])
      if (--indeg[static_cast<std::size_t>(t)] == 0) q.push(t);
  }
  EXPECT_EQ(seen, n);
  EXPECT_TRUE(validate_registry(reg.resources(), reg.events()).empty());
}

TEST(Registry, CycleIsReported) {
  std::vector<ResourceKind> res{{"a", {}, Rational(1), true}, {"b", {}, Rational(1), true}};
  std::vector<EventKind> evs{{"MakeA", {{"b", 1}}, {{"a", 1}}, {}}, {"MakeB", {{"a", 1}}, {{"b", 1}}, {}}};
  const auto issues = validate_registry(res, evs);
  ASSERT_FALSE(issues.empty());
  bool cycle = false;
  for (const auto& i : issues) cycle = cycle || i.find("cycle") != std::string::npos;
  EXPECT_TRUE(cycle);
}

TEST(Presets, EasyMapIs7x7) {
  const auto s = preset("easy");
  EXPECT_EQ(s.height, 7);
  EXPECT_EQ(s.width, 7);
}

TEST(Presets, HardMinerCannotHoldIron) {
  const auto s = preset("hard");
  bool found = false;
  for (const auto& a : s.agents) {
    if (a.role != "miner") continue;
    found = true;
    EXPECT_EQ(a.capacity.at("iron"), 0);
  }
  EXPECT_TRUE(found);
}

TEST(Presets, ExplorationHasTenTotemSites) {
  EXPECT_EQ(preset("exploration").event_sites.at("TotemMaking").cells(), 10);
}

TEST(Presets, EveryPresetRoundTrips) {
  for (const auto& name : preset_names()) {
    const auto spec = preset(name);
    const auto parsed = parse_and_validate(serialize_scenario(spec));
    ASSERT_TRUE(parsed.ok()) << name;
    EXPECT_EQ(*parsed.spec, spec) << name;
    const auto again = parse_and_validate(preset_document(name));
    ASSERT_TRUE(again.ok()) << name;
    EXPECT_EQ(*again.spec, spec) << name;
  }
}

TEST(Presets, UnknownNameThrows) { EXPECT_ANY_THROW(preset("medium")); }

TEST(Validation, UnknownInputResource) {
  auto doc = preset_json("easy");
  doc["resources"]["blade"] = {{"reward", 9}, {"synthesized", true}};
  doc["events"]["BladeCraft"] = {{"inputs", {{"obsidian", 1}, {"wood", 1}}}, {"outputs", {{"blade", 1}}}, {"sites", 1}};
  const auto r = parse_and_validate(doc.dump());
  ASSERT_FALSE(r.ok());
  bool hit = false;
  for (const auto& v : r.violations) hit = hit || v.message.find("unknown resource") != std::string::npos;
  EXPECT_TRUE(hit);
}

TEST(Validation, PlacementExceedsCells) {
  auto doc = preset_json("easy");
  doc["resources"]["wood"]["piles"] = 100;  // 100 > 7*7
  const auto r = parse_and_validate(doc.dump());
  ASSERT_FALSE(r.ok());
  bool hit = false;
  for (const auto& v : r.violations) hit = hit || v.message.find("placement exceeds cells") != std::string::npos;
  EXPECT_TRUE(hit);
}

TEST(Validation, UnknownKeyAndBadJson) {
  auto doc = preset_json("easy");
  doc["colour"] = "blue";
  EXPECT_FALSE(parse_and_validate(doc.dump()).ok());
  EXPECT_FALSE(parse_and_validate("{not json").ok());
}

TEST(Validation, ReportsEveryViolation) {
  auto doc = preset_json("easy");
  doc["resources"]["wood"]["piles"] = 100;
  doc["colour"] = "blue";
  const auto r = parse_and_validate(doc.dump());
  EXPECT_GE(r.violations.size(), 2u);
}

TEST(Names, AgentAndGroupIds) {
  EXPECT_EQ(agent_name(3), "a3");
  EXPECT_EQ(parse_agent_name("a12"), 12);
  EXPECT_FALSE(parse_agent_name("b1").has_value());
  EXPECT_FALSE(parse_agent_name("a").has_value());
  EXPECT_EQ(group_name(0), "g0");
  EXPECT_EQ(parse_group_name("g7"), 7);
}
