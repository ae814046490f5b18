#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "synthsoc/engine.h"
#include "synthsoc/scenarios.h"
#include "test_support.h"

using namespace synthsoc;
using namespace synthsoc::testing;

namespace {

using Weights = std::map<AgentId, double>;

double sum(const Weights& w) {
  double s = 0;
  for (const auto& [k, v] : w) s += v;
  return s;
}

ScenarioSpec contract_spec(int rounds, std::int64_t physical = 10) {
  auto doc = preset_json("easy");
  doc["scenario"] = {{"kind", "contract"}, {"rounds", rounds}, {"physical_steps", physical}};
  return spec_from(doc);
}

std::vector<Action> with(int n, AgentId a, Action act) {
  auto v = noops(n);
  v[static_cast<std::size_t>(a)] = std::move(act);
  return v;
}

Action select(int g) { return Action::with_target(ActionKind::select_group, g); }
Action request(AgentId j) { return Action::with_target(ActionKind::request, j); }

}  // namespace

TEST(Merge, WorkedInstance) {
  const auto w = merge_weights({{0, 0.6}, {1, 0.4}}, 2, 0.5, 0.5);
  EXPECT_NEAR(w.at(0), 0.3, 1e-12);
  EXPECT_NEAR(w.at(1), 0.2, 1e-12);
  EXPECT_NEAR(w.at(2), 0.5, 1e-12);
}

TEST(Merge, SingleMember) {
  const auto w = merge_weights({{0, 1.0}}, 1, 0.5, 0.5);
  EXPECT_EQ(w, (Weights{{0, 0.5}, {1, 0.5}}));
}

TEST(Merge, RejectsBadSplits) {
  EXPECT_THROW(merge_weights({{0, 1.0}}, 1, 0.7, 0.7), std::invalid_argument);
  EXPECT_THROW(merge_weights({{0, 1.0}}, 1, -0.1, 1.1), std::invalid_argument);
  EXPECT_THROW(merge_weights({{0, 1.0}}, 0, 0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(merge_sides({{0, 1.0}}, {{0, 1.0}}, 0.5), std::invalid_argument);
}

TEST(Merge, SumsStayOneProperty) {
  Rng rng(11);
  for (int seq = 0; seq < 2000; ++seq) {
    Weights g{{0, 1.0}};
    AgentId next = 1;
    const int merges = 1 + static_cast<int>(rng.below(12));
    for (int k = 0; k < merges; ++k) {
      const double s = static_cast<double>(rng.below(11)) / 10.0;
      if (rng.below(3) == 0) {
        Weights other{{next, 0.25}, {next + 1, 0.75}};
        next += 2;
        g = merge_sides(g, other, s);
      } else {
        g = merge_weights(g, next++, s, 1.0 - s);
      }
      ASSERT_NEAR(sum(g), 1.0, 1e-9);
      for (const auto& [id, w] : g) ASSERT_GE(w, 0.0);
    }
  }
}

TEST(SplitRatio, Cases) {
  const std::vector<std::string> roles{"carpenter", "carpenter", "miner", "miner"};
  SocialGraph g(4, 1);
  g.set_weighted(0, true);
  g.join(0, 0, 0.3), g.join(1, 0, 0.3), g.join(2, 0, 0.2), g.join(3, 0, 0.2);
  EXPECT_NEAR(*split_ratio(g, roles), 1.5, 1e-12);

  SocialGraph sym(4, 1);
  for (int a = 0; a < 4; ++a) sym.join(a, 0);
  EXPECT_NEAR(*split_ratio(sym, roles), 1.0, 1e-12);

  SocialGraph carp(4, 1);
  carp.join(0, 0), carp.join(1, 0);
  EXPECT_FALSE(split_ratio(carp, roles).has_value());
}

TEST(Negotiation, RoundPairsMutualRequests) {
  using R = std::vector<std::optional<AgentId>>;
  using P = std::vector<std::pair<AgentId, AgentId>>;
  EXPECT_EQ(negotiation_round(R{1, 0}), (P{{0, 1}}));
  EXPECT_EQ(negotiation_round(R{1, std::nullopt}), P{});
  EXPECT_EQ(negotiation_round(R{1, 2, 1}), (P{{1, 2}}));
  EXPECT_EQ(negotiation_round(R{0, std::nullopt}), P{});
}

TEST(Bargain, ProposeThenAccept) {
  auto s = open_session(3, 1);
  EXPECT_EQ(s.turn, 1);
  EXPECT_EQ(bargain_act(s, 3, Action::propose(0.6), 6), BargainResult::out_of_turn);
  EXPECT_EQ(bargain_act(s, 1, Action::accept(), 6), BargainResult::empty_table);
  EXPECT_EQ(bargain_act(s, 1, Action::propose(0.6), 6), BargainResult::ok);
  EXPECT_EQ(bargain_act(s, 3, Action::accept(), 6), BargainResult::ok);
  EXPECT_EQ(s.status, BargainSession::Status::accepted);
  EXPECT_NEAR(*s.share_of(1), 0.6, 1e-12);
  EXPECT_NEAR(*s.share_of(3), 0.4, 1e-12);
  EXPECT_EQ(bargain_act(s, 1, Action::decline(), 6), BargainResult::closed);
}

TEST(Bargain, CounterProposalWins) {
  auto s = open_session(0, 1);
  ASSERT_EQ(bargain_act(s, 0, Action::propose(0.7), 6), BargainResult::ok);
  ASSERT_EQ(bargain_act(s, 1, Action::propose(0.5), 6), BargainResult::ok);
  ASSERT_EQ(bargain_act(s, 0, Action::accept(), 6), BargainResult::ok);
  EXPECT_NEAR(*s.share_of(0), 0.5, 1e-12);
}

TEST(Bargain, CapDeclines) {
  auto s = open_session(0, 1);
  for (int k = 0; k < 2; ++k) ASSERT_EQ(bargain_act(s, s.turn, Action::propose(0.9), 2), BargainResult::ok);
  EXPECT_EQ(s.status, BargainSession::Status::open);
  ASSERT_EQ(bargain_act(s, s.turn, Action::propose(0.9), 2), BargainResult::ok);
  EXPECT_EQ(s.status, BargainSession::Status::declined);
  EXPECT_EQ(bargain_act(s, 0, Action::propose(2.0), 2), BargainResult::closed);
  auto t = open_session(0, 1);
  EXPECT_EQ(bargain_act(t, 0, Action::propose(1.5), 2), BargainResult::invalid_share);
}

TEST(Bargain, TurnsAlternateProperty) {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    auto s = open_session(0, 1);
    for (int k = 0; k < 20 && s.status == BargainSession::Status::open; ++k) {
      const AgentId actor = static_cast<AgentId>(rng.below(2));
      const auto pick = rng.below(5);
      const Action act = pick < 3 ? Action::propose(static_cast<double>(rng.below(11)) / 10)
                                  : (pick == 3 ? Action::accept() : Action::decline());
      bargain_act(s, actor, act, 6);
    }
    for (std::size_t k = 1; k < s.actors.size(); ++k) ASSERT_NE(s.actors[k], s.actors[k - 1]);
    if (s.table) {
      ASSERT_GE(*s.table, 0.0);
      ASSERT_LE(*s.table, 1.0);
    }
  }
}

TEST(Negotiation, EngineAcceptFormsWeightedGroup) {
  Engine e(preset("easy:negotiation"));
  e.reset(3);
  auto joint = noops(4);
  joint[0] = request(1);
  joint[1] = request(0);
  e.step(joint);
  ASSERT_NE(e.scenario().session_of(0), nullptr);
  e.step(with(4, 0, Action::propose(0.6)));
  e.step(with(4, 1, Action::accept()));
  const auto& g = e.graph();
  ASSERT_EQ(g.groups_of(0).size(), 1u);
  const int grp = g.groups_of(0).front();
  EXPECT_EQ(g.members(grp), (std::vector<AgentId>{0, 1}));
  const auto w = g.member_weights(grp);
  EXPECT_NEAR(w[0], 0.6, 1e-12);
  EXPECT_NEAR(w[1], 0.4, 1e-12);
  EXPECT_EQ(classify_structure(g), StructureCategory::inequality);
}

TEST(Negotiation, DeclineLeavesNoEdge) {
  Engine e(preset("easy:negotiation"));
  e.reset(3);
  auto joint = noops(4);
  joint[2] = request(3);
  joint[3] = request(2);
  e.step(joint);
  e.step(with(4, 2, Action::decline()));
  EXPECT_TRUE(e.graph().edges().empty());
  EXPECT_EQ(e.scenario().session_of(2), nullptr);
}

TEST(Negotiation, GroupMergesThirdAgent) {
  Engine e(preset("easy:negotiation"));
  e.reset(4);
  auto joint = noops(4);
  joint[0] = request(1), joint[1] = request(0);
  e.step(joint);
  e.step(with(4, 0, Action::propose(0.6)));
  e.step(with(4, 1, Action::accept()));
  joint = noops(4);
  joint[1] = request(2), joint[2] = request(1);
  e.step(joint);
  e.step(with(4, 1, Action::propose(0.5)));
  e.step(with(4, 2, Action::accept()));
  const auto& g = e.graph();
  const int grp = g.groups_of(0).front();
  EXPECT_EQ(g.members(grp), (std::vector<AgentId>{0, 1, 2}));
  const auto w = g.member_weights(grp);
  EXPECT_NEAR(w[0], 0.3, 1e-12);
  EXPECT_NEAR(w[1], 0.2, 1e-12);
  EXPECT_NEAR(w[2], 0.5, 1e-12);
}

TEST(Negotiation, SameGroupRequestRejected) {
  Engine e(preset("easy:negotiation"));
  e.reset(4);
  auto joint = noops(4);
  joint[0] = request(1), joint[1] = request(0);
  e.step(joint);
  e.step(with(4, 0, Action::propose(0.5)));
  e.step(with(4, 1, Action::accept()));
  joint = noops(4);
  joint[0] = request(1), joint[1] = request(0);
  const auto r = e.step(joint);
  EXPECT_EQ(r.outcome[0], "same_group");
  EXPECT_EQ(e.scenario().session_of(0), nullptr);
}

TEST(Negotiation, SessionsCloseWhenStageEnds) {
  const auto spec = preset("easy:negotiation");
  Engine e(spec);
  e.reset(1);
  auto joint = noops(4);
  joint[0] = request(1), joint[1] = request(0);
  e.step(joint);
  while (e.t() < spec.scenario.negotiation_steps) e.step(noops(4));
  EXPECT_EQ(e.scenario().session_of(0), nullptr);
  EXPECT_EQ(e.scenario().phase(e.t()), Phase::physical);
  const auto r = e.step(with(4, 0, request(1)));
  EXPECT_EQ(r.outcome[0], "phase");
}

TEST(Contract, FormationLastsRoundsTimesAgents) {
  const auto spec = contract_spec(2);
  Engine e(spec);
  e.reset(9);
  const auto& sc = e.scenario();
  EXPECT_EQ(sc.formation_steps(), 8);
  const auto order = sc.contract_order();
  EXPECT_EQ(std::set<AgentId>(order.begin(), order.end()), (std::set<AgentId>{0, 1, 2, 3}));
  std::map<AgentId, int> turns;
  for (std::int64_t t = 0; t < 8; ++t) {
    EXPECT_EQ(sc.phase(t), Phase::formation);
    ASSERT_TRUE(sc.selector(t).has_value());
    EXPECT_EQ(*sc.selector(t), order[static_cast<std::size_t>(t % 4)]);
    ++turns[*sc.selector(t)];
  }
  for (const auto& [a, n] : turns) EXPECT_EQ(n, 2);
  EXPECT_EQ(sc.phase(8), Phase::physical);
  EXPECT_FALSE(sc.selector(8).has_value());
  EXPECT_EQ(spec.episode_length, 8 + 10);
}

TEST(Contract, SecondChoiceOverridesAndOneEdgeMax) {
  Engine e(contract_spec(2));
  e.reset(9);
  for (std::int64_t t = 0; t < 8; ++t) {
    const AgentId sel = *e.scenario().selector(t);
    e.step(with(4, sel, select(t < 4 ? 0 : 1)));
    for (AgentId a = 0; a < 4; ++a) ASSERT_LE(e.graph().groups_of(a).size(), 1u);
  }
  for (AgentId a = 0; a < 4; ++a) EXPECT_EQ(e.graph().groups_of(a), std::vector<int>{1});
  const auto frozen = e.graph();
  const auto r = e.step(with(4, 0, select(2)));
  EXPECT_EQ(r.outcome[0], "phase");
  EXPECT_EQ(e.graph(), frozen);
}

TEST(Contract, OutOfTurnIsFlagged) {
  Engine e(contract_spec(1));
  e.reset(2);
  const AgentId sel = *e.scenario().selector(0);
  const AgentId other = (sel + 1) % 4;
  const auto r = e.step(with(4, other, select(0)));
  EXPECT_EQ(r.outcome[static_cast<std::size_t>(other)], "out_of_turn");
  EXPECT_TRUE(e.graph().edges().empty());
}

TEST(Contract, SameNodeSplitsNWays) {
  Engine e(contract_spec(1));
  e.reset(2);
  for (std::int64_t t = 0; t < 4; ++t) e.step(with(4, *e.scenario().selector(t), select(3)));
  EXPECT_EQ(e.graph().members(3), (std::vector<AgentId>{0, 1, 2, 3}));
  const std::vector<double> raw{3, 0, 0, 0};
  EXPECT_EQ(redistribute(raw, e.graph()), (std::vector<double>{0.75, 0.75, 0.75, 0.75}));
}

TEST(Contract, NeverSelectingLeavesUngrouped) {
  Engine e(contract_spec(1));
  e.reset(2);
  for (std::int64_t t = 0; t < 4; ++t) {
    const AgentId sel = *e.scenario().selector(t);
    if (sel != 2) e.step(with(4, sel, select(0)));
    else e.step(noops(4));
  }
  EXPECT_TRUE(e.graph().groups_of(2).empty());
  const std::vector<double> raw{0, 0, 7, 0};
  EXPECT_EQ(redistribute(raw, e.graph())[2], 7);
}

TEST(Structure, DynamicSwitchesAt30And60) {
  const auto spec = preset("easy:dynamic");
  Engine e(spec);
  e.reset(5);
  const auto g0 = graph_from_spec(spec.scenario.initial_graph, 4, spec.group_count());
  const auto g1 = graph_from_spec(spec.scenario.schedule.at(0).graph, 4, spec.group_count());
  const auto g2 = graph_from_spec(spec.scenario.schedule.at(1).graph, 4, spec.group_count());
  while (!e.done()) {
    const auto t = e.t();
    const auto& want = t < 30 ? g0 : (t < 60 ? g1 : g2);
    ASSERT_EQ(e.graph(), want) << "t=" << t;
    const auto cat = classify_structure(e.graph());
    ASSERT_EQ(cat, t < 30   ? StructureCategory::inequality
                   : t < 60 ? StructureCategory::independent_group
                            : StructureCategory::overlapping_group);
    e.step(noops(4));
  }
}

TEST(Structure, EmptyScheduleKeepsGraph) {
  Engine e(preset("easy:overlapping"));
  e.reset(5);
  const auto g = e.graph();
  while (!e.done()) {
    e.step(noops(4));
    ASSERT_EQ(e.graph(), g);
  }
}

TEST(Structure, NoSocialVerbs) {
  Engine e(preset("easy:independent"));
  e.reset(1);
  for (const auto& t : e.legal_actions(0)) {
    EXPECT_EQ(t.rfind("select_group", 0), std::string::npos);
    EXPECT_EQ(t.rfind("request", 0), std::string::npos);
    EXPECT_EQ(t.rfind("connect", 0), std::string::npos);
  }
}

TEST(Exploration, ConnectAndJoin) {
  Engine e(preset("exploration"));
  e.reset(1);
  auto joint = noops(4);
  joint[0] = Action::with_target(ActionKind::connect, 1);
  joint[2] = Action::with_target(ActionKind::join, 0);
  joint[3] = Action::with_target(ActionKind::join, 0);
  const auto r = e.step(joint);
  EXPECT_TRUE(r.graph_changed);
  const auto* edge = e.graph().edge(agent_node(0), agent_node(1));
  ASSERT_NE(edge, nullptr);
  EXPECT_TRUE(edge->share_observation);
  EXPECT_EQ(e.graph().members(0), (std::vector<AgentId>{2, 3}));
  EXPECT_EQ(r.observations[1].shared.size(), 1u);
  EXPECT_EQ(r.observations[1].shared[0].source, 0);

  joint = noops(4);
  joint[0] = Action::with_target(ActionKind::disconnect, 1);
  joint[3] = Action::with_target(ActionKind::leave, 0);
  e.step(joint);
  EXPECT_FALSE(e.graph().has_edge(agent_node(0), agent_node(1)));
  EXPECT_EQ(e.graph().members(0), std::vector<AgentId>{2});
}
