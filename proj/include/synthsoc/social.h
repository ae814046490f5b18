#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "synthsoc/config.h"
#include "synthsoc/world.h"

namespace synthsoc {

// Layer 0 holds agents, layer 1 groups; higher layers are groups of groups.
struct NodeRef {
  int layer = 0;
  int index = 0;
  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

inline NodeRef agent_node(AgentId a) { return {0, a}; }
inline NodeRef group_node(int g) { return {1, g}; }

// "a3", "g1", and "n2.0" for layers above groups.
std::string node_name(NodeRef n);
std::optional<NodeRef> parse_node_name(std::string_view name);

struct EdgeAttrs {
  bool share_observation = false;
  double reward_weight = 0.0;  // membership share inside a weighted group
  friend bool operator==(const EdgeAttrs&, const EdgeAttrs&) = default;
};

// Directed multilayer graph. An edge i->j within layer 0 means i shares with
// j. An edge from layer c to layer c+1 is membership (agent in group).
class SocialGraph {
 public:
  using EdgeMap = std::map<std::pair<NodeRef, NodeRef>, EdgeAttrs>;

  SocialGraph() = default;
  SocialGraph(int agents, int groups);

  int layer_count() const { return static_cast<int>(layers_.size()); }
  int node_count(int layer) const { return layer < layer_count() ? layers_[static_cast<std::size_t>(layer)] : 0; }
  int agent_count() const { return node_count(0); }
  int group_count() const { return node_count(1); }
  // Appends a layer and returns its index.
  int add_layer(int nodes);
  bool has_node(NodeRef n) const { return n.layer >= 0 && n.layer < layer_count() && n.index >= 0 && n.index < node_count(n.layer); }

  // Throws std::invalid_argument for unknown nodes, self loops, and edges
  // that are neither intra-layer nor between adjacent layers. Replaces the
  // attributes of an existing edge.
  void add_edge(NodeRef from, NodeRef to, EdgeAttrs attrs = {});
  bool remove_edge(NodeRef from, NodeRef to);
  bool has_edge(NodeRef from, NodeRef to) const { return edges_.count({from, to}) > 0; }
  const EdgeAttrs* edge(NodeRef from, NodeRef to) const;
  const EdgeMap& edges() const { return edges_; }

  // Weighted groups split by the reward_weight on each membership edge;
  // unweighted groups split equally among current members.
  bool weighted(int group) const { return weighted_.at(static_cast<std::size_t>(group)); }
  void set_weighted(int group, bool w) { weighted_.at(static_cast<std::size_t>(group)) = w; }

  void join(AgentId agent, int group, double weight = 0.0);
  void leave(AgentId agent, int group) { remove_edge(agent_node(agent), group_node(group)); }
  std::vector<int> groups_of(AgentId agent) const;
  std::vector<AgentId> members(int group) const;
  // Reward shares aligned with members(group).
  std::vector<double> member_weights(int group) const;
  bool has_membership_edges() const;
  bool has_agent_edges() const;

  std::uint64_t hash() const;
  friend bool operator==(const SocialGraph&, const SocialGraph&) = default;

 private:
  std::vector<int> layers_;
  std::vector<bool> weighted_;  // per group node
  EdgeMap edges_;
};

// Builds the graph described by `spec` over `agents` agents and `groups` group
// nodes. Groups listed in the GraphSpec occupy g0, g1, ... in order; links share
// observations when flagged.
SocialGraph graph_from_spec(const GraphSpec& spec, int agents, int groups);

enum class StructureCategory { isolation, connection, independent_group, overlapping_group, inequality, unclassified };
std::string_view to_string(StructureCategory c);

// Inequality wins over the other grouped categories so that a single group
// with unequal weights is reported as such.
StructureCategory classify_structure(const SocialGraph& graph);

// Each agent's raw reward is split equally among its groups, pooled per group
// and paid out by member weight; ungrouped agents keep theirs. Throws
// std::invalid_argument when a weighted group's shares do not sum to 1.
std::vector<double> redistribute(std::span<const double> raw, const SocialGraph& graph);

// Map content forwarded from another agent; never carries an inventory.
struct SharedWindow {
  AgentId source = 0;
  GridPos center;
  int radius = 0;
  std::vector<CellView> cells;
  friend bool operator==(const SharedWindow&, const SharedWindow&) = default;
};

struct CompositeObservation {
  ObservationWindow own;
  std::vector<SharedWindow> shared;  // ordered by source id
  SocialGraph graph;
};

// Own window plus the window of every j with an edge j->agent flagged
// share_observation.
CompositeObservation merged_observation(AgentId agent, const SocialGraph& graph,
                                        std::span<const ObservationWindow> windows);

struct DegreeStats {
  double average_in = 0, average_out = 0;
  int max_in = 0, max_out = 0;
  bool asymmetric = false;  // some node's in-degree differs from its out-degree
};

// Degrees over every edge touching nodes of `layer`. Throws
// std::invalid_argument when the layer has no nodes.
DegreeStats degree_stats(const SocialGraph& graph, int layer);

}  // namespace synthsoc
