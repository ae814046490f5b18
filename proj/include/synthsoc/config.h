#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthsoc/rational.h"

namespace synthsoc {

using ResourceId = int;
using EventId = int;
using AgentId = int;

inline constexpr std::int64_t kUnbounded = INT64_MAX;

struct ItemCount {
  std::string resource;
  std::int64_t count = 0;
  friend bool operator==(const ItemCount&, const ItemCount&) = default;
};

struct ResourceKind {
  std::string name;
  std::vector<std::string> requirement;  // empty: visible to everyone
  Rational objective_reward;
  bool synthesized = false;
  friend bool operator==(const ResourceKind&, const ResourceKind&) = default;
};

struct EventKind {
  std::string name;
  std::vector<ItemCount> inputs;
  std::vector<ItemCount> outputs;
  std::vector<std::string> requirement;
  friend bool operator==(const EventKind&, const EventKind&) = default;
};

// Lower-cases and drops '_', '-' and ' ' so "GemMine", "gem_mine" and
// "gem mine" name the same kind.
std::string normalize_name(std::string_view name);

// Immutable catalog of resource and event kinds with names resolved to dense
// ids. Construction assumes the definitions were validated and throws
// std::invalid_argument on dangling names.
class ContentRegistry {
 public:
  ContentRegistry() = default;
  ContentRegistry(std::vector<ResourceKind> resources, std::vector<EventKind> events);

  const std::vector<ResourceKind>& resources() const { return resources_; }
  const std::vector<EventKind>& events() const { return events_; }
  int resource_count() const { return static_cast<int>(resources_.size()); }
  int event_count() const { return static_cast<int>(events_.size()); }

  std::optional<ResourceId> find_resource(std::string_view name) const;
  std::optional<EventId> find_event(std::string_view name) const;
  ResourceId resource_id(std::string_view name) const;  // throws std::out_of_range
  EventId event_id(std::string_view name) const;

  const ResourceKind& resource(ResourceId id) const { return resources_.at(static_cast<std::size_t>(id)); }
  const EventKind& event(EventId id) const { return events_.at(static_cast<std::size_t>(id)); }

  struct ResolvedEvent {
    std::vector<std::pair<ResourceId, std::int64_t>> inputs;
    std::vector<std::pair<ResourceId, std::int64_t>> outputs;
    std::vector<ResourceId> requirement;
  };
  const ResolvedEvent& resolved(EventId id) const { return resolved_events_.at(static_cast<std::size_t>(id)); }
  const std::vector<ResourceId>& requirement(ResourceId id) const {
    return resource_requirements_.at(static_cast<std::size_t>(id));
  }
  // The event whose outputs include `id`, if any.
  std::optional<EventId> producer(ResourceId id) const;

  friend bool operator==(const ContentRegistry& a, const ContentRegistry& b) {
    return a.resources_ == b.resources_ && a.events_ == b.events_;
  }

 private:
  std::vector<ResourceKind> resources_;
  std::vector<EventKind> events_;
  std::map<std::string, ResourceId, std::less<>> resource_index_;
  std::map<std::string, EventId, std::less<>> event_index_;
  std::vector<std::vector<ResourceId>> resource_requirements_;
  std::vector<ResolvedEvent> resolved_events_;
  std::vector<std::optional<EventId>> producers_;
};

// The fifteen built-in resources and nine built-in events.
const ContentRegistry& builtin_registry();

// Problems in a set of kind definitions: dangling names, bad counts, cycles,
// synthesized kinds without exactly one producer. Empty when valid.
std::vector<std::string> validate_registry(const std::vector<ResourceKind>& resources,
                                           const std::vector<EventKind>& events);

struct GridPos {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const GridPos&, const GridPos&) = default;
};

// Either `count` cells drawn at random or an explicit position list.
struct Placement {
  std::int64_t count = 0;
  std::vector<GridPos> positions;
  std::int64_t amount = 1;  // units per pile; unused for event sites and blocks
  bool explicit_positions() const { return !positions.empty(); }
  std::int64_t cells() const { return explicit_positions() ? static_cast<std::int64_t>(positions.size()) : count; }
  friend bool operator==(const Placement&, const Placement&) = default;
};

struct AgentSpec {
  std::string role;
  int count = 1;
  std::map<std::string, std::int64_t> capacity;  // unlisted: unbounded
  std::map<std::string, Rational> preference;    // unlisted: 1
  std::map<std::string, std::int64_t> initial_inventory;
  std::optional<GridPos> position;  // nullopt: random
  friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

enum class ScenarioKind { social_structure, contract, negotiation, exploration };

std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view text);

struct GroupSpec {
  std::vector<std::string> members;  // agent ids "a0", "a1", ...
  std::vector<double> weights;       // empty: equal split
  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

struct LinkSpec {
  std::string from;
  std::string to;
  bool share_observation = true;
  friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

struct GraphSpec {
  std::vector<GroupSpec> groups;
  std::vector<LinkSpec> links;
  friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

struct ScheduleEntry {
  std::int64_t step = 0;
  GraphSpec graph;
  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

struct ScenarioParams {
  ScenarioKind kind = ScenarioKind::exploration;
  // contract: formation lasts rounds * N steps, then physical_steps.
  int rounds = 1;
  std::int64_t physical_steps = 0;
  // contract and exploration: number of group nodes; 0 means one per agent.
  int group_count = 0;
  // negotiation
  std::int64_t negotiation_steps = 0;
  int max_proposals = 6;
  // social_structure
  GraphSpec initial_graph;
  std::vector<ScheduleEntry> schedule;
  friend bool operator==(const ScenarioParams&, const ScenarioParams&) = default;
};

struct ScenarioSpec {
  int height = 0;
  int width = 0;
  Placement terrain;
  ContentRegistry registry;
  std::map<std::string, Placement> resources_on_map;  // canonical resource name -> piles
  std::map<std::string, Placement> event_sites;       // canonical event name -> sites
  std::vector<AgentSpec> agents;
  int observation_radius = 3;
  std::int64_t episode_length = 0;
  ScenarioParams scenario;
  std::optional<std::uint64_t> seed;

  int agent_count() const;
  int group_count() const;  // resolved group-node count for the scenario
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

std::string agent_name(AgentId id);
std::optional<AgentId> parse_agent_name(std::string_view name);
std::string group_name(int index);
std::optional<int> parse_group_name(std::string_view name);

struct Violation {
  std::string path;
  std::string message;
  std::string to_string() const { return path.empty() ? message : path + ": " + message; }
};

struct ParseResult {
  std::optional<ScenarioSpec> spec;
  std::vector<Violation> violations;
  bool ok() const { return spec.has_value(); }
};

// Parses a scenario document and applies defaults (capacity unbounded,
// preference 1). On failure `spec` is empty and `violations` lists every
// problem found with a dotted path.
ParseResult parse_and_validate(std::string_view document);

// Canonical document; parse_and_validate(serialize_scenario(s)) yields s.
std::string serialize_scenario(const ScenarioSpec& spec);

// Built-in presets: "easy", "hard", "exploration", and "<easy|hard>:<scenario>"
// with scenario one of contract, negotiation, dynamic, isolation, connection,
// independent, overlapping, inequality. Plain "easy"/"hard" use contract.
// Throws std::invalid_argument for unknown names.
ScenarioSpec preset(std::string_view name);
std::vector<std::string> preset_names();
// Embedded source document for a preset.
std::string preset_document(std::string_view name);

}  // namespace synthsoc
