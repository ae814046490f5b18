#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthsoc/action.h"
#include "synthsoc/config.h"
#include "synthsoc/rational.h"
#include "synthsoc/rng.h"
#include "synthsoc/scenarios.h"
#include "synthsoc/social.h"
#include "synthsoc/world.h"

namespace synthsoc {

struct Message {
  AgentId from = 0;
  std::string payload;
  friend bool operator==(const Message&, const Message&) = default;
};

struct SessionView {
  AgentId partner = 0;
  AgentId turn = 0;
  std::optional<double> my_share;  // share offered to the observer's side
  int proposals = 0;
  friend bool operator==(const SessionView&, const SessionView&) = default;
};

struct ScenarioView {
  Phase phase = Phase::physical;
  std::optional<AgentId> selector;      // contract formation
  std::optional<SessionView> session;   // negotiation
  friend bool operator==(const ScenarioView&, const ScenarioView&) = default;
};

// Everything one agent receives at the start of a step.
struct Observation {
  AgentId agent = 0;
  std::int64_t step = 0;
  ObservationWindow own;
  std::vector<SharedWindow> shared;
  SocialGraph graph;
  std::vector<std::string> legal;  // action templates
  std::vector<Message> inbox;
  ScenarioView scenario;
  bool done = false;
  friend bool operator==(const Observation&, const Observation&) = default;
};

struct PileChange {
  GridPos pos;
  ResourceId resource = 0;
  std::int64_t count = 0;  // new count
  friend bool operator==(const PileChange&, const PileChange&) = default;
};

struct InventoryChange {
  AgentId agent = 0;
  ResourceId resource = 0;
  std::int64_t count = 0;  // new count
  friend bool operator==(const InventoryChange&, const InventoryChange&) = default;
};

struct PositionChange {
  AgentId agent = 0;
  GridPos pos;
  friend bool operator==(const PositionChange&, const PositionChange&) = default;
};

struct WorldDelta {
  std::vector<PileChange> piles;
  std::vector<InventoryChange> inventories;
  std::vector<PositionChange> positions;
  friend bool operator==(const WorldDelta&, const WorldDelta&) = default;
};

void apply_delta(WorldState& world, const WorldDelta& delta);

struct StepResult {
  std::int64_t t = 0;  // the step just taken
  std::vector<Action> submitted;  // as received
  std::vector<Action> actions;    // as applied, after legality filtering
  std::vector<Rational> raw;
  std::vector<double> shared;
  std::vector<std::string> outcome;  // per agent: "ok" or the reason the action did nothing
  std::vector<std::pair<AgentId, EventId>> executions;
  WorldDelta delta;
  bool graph_changed = false;
  bool done = false;
  std::vector<Observation> observations;
};

// One episode of the simulation. Not thread-safe; separate instances are
// independent.
class Engine {
 public:
  explicit Engine(ScenarioSpec spec);

  const ScenarioSpec& spec() const { return spec_; }
  const ContentRegistry& registry() const { return *registry_; }
  int agent_count() const { return spec_.agent_count(); }

  // Deterministic in (spec, seed). Throws GenerationError when the map cannot
  // hold the scenario.
  std::vector<Observation> reset(std::uint64_t seed);

  // Actions outside the agent's legal templates, or physical actions outside
  // the physical phase, become no-ops with an outcome flag. Throws
  // std::logic_error once done.
  StepResult step(std::span<const Action> joint);

  std::vector<std::string> legal_actions(AgentId agent) const;
  bool is_legal(AgentId agent, const Action& a) const;
  Observation observe(AgentId agent) const;

  const WorldState& world() const { return world_; }
  const SocialGraph& graph() const { return graph_; }
  const ScenarioRuntime& scenario() const { return scenario_; }
  std::int64_t t() const { return t_; }
  bool done() const { return t_ >= spec_.episode_length; }
  std::uint64_t seed() const { return seed_; }

  const std::vector<bool>& discovered_resources(AgentId a) const { return known_res_[static_cast<std::size_t>(a)]; }
  const std::vector<bool>& discovered_events(AgentId a) const { return known_ev_[static_cast<std::size_t>(a)]; }

  // Digest of world, graph and t.
  std::uint64_t state_hash() const;
  std::uint64_t rng_hash() const { return rng_.state_hash(); }
  static std::uint64_t combine_state_hash(const WorldState& world, const SocialGraph& graph, std::int64_t t);

  // Cumulative valuation deltas and shared rewards since reset.
  const std::vector<Rational>& raw_totals() const { return raw_totals_; }
  const std::vector<double>& shared_totals() const { return shared_totals_; }
  const std::vector<std::int64_t>& executions() const { return exec_counts_; }

 private:
  void discover(AgentId a, const ObservationWindow& win);
  std::vector<ObservationWindow> windows() const;
  Observation assemble(AgentId a, std::span<const ObservationWindow> wins) const;
  bool may_message(AgentId from, AgentId to) const;

  ScenarioSpec spec_;
  std::shared_ptr<const ContentRegistry> registry_;
  std::uint64_t seed_ = 0;
  Rng rng_;
  WorldState world_;
  SocialGraph graph_;
  ScenarioRuntime scenario_;
  std::int64_t t_ = 0;
  std::vector<std::vector<bool>> known_res_, known_ev_;
  std::vector<std::vector<Message>> inbox_;
  std::vector<Rational> raw_totals_;
  std::vector<double> shared_totals_;
  std::vector<std::int64_t> exec_counts_;
};

}  // namespace synthsoc
