#include "synthsoc/social.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "synthsoc/hash.h"

namespace synthsoc {

std::string node_name(NodeRef n) {
  if (n.layer == 0) return agent_name(n.index);
  if (n.layer == 1) return group_name(n.index);
  return "n" + std::to_string(n.layer) + "." + std::to_string(n.index);
}

std::optional<NodeRef> parse_node_name(std::string_view name) {
  if (auto a = parse_agent_name(name)) return agent_node(*a);
  if (auto g = parse_group_name(name)) return group_node(*g);
  if (name.size() < 4 || name[0] != 'n') return std::nullopt;
  const auto dot = name.find('.');
  if (dot == std::string_view::npos || dot < 2 || dot + 1 >= name.size()) return std::nullopt;
  auto digits = [](std::string_view s) -> std::optional<int> {
    if (s.empty() || s.size() > 9 || (s.size() > 1 && s[0] == '0')) return std::nullopt;
    int v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + (c - '0');
    }
    return v;
  };
  auto layer = digits(name.substr(1, dot - 1));
  auto index = digits(name.substr(dot + 1));
  if (!layer || !index || *layer < 2) return std::nullopt;
  return NodeRef{*layer, *index};
}

SocialGraph::SocialGraph(int agents, int groups) : layers_{agents, groups}, weighted_(static_cast<std::size_t>(groups), false) {}

int SocialGraph::add_layer(int nodes) {
  layers_.push_back(nodes);
  if (layers_.size() == 2) weighted_.assign(static_cast<std::size_t>(nodes), false);
  return layer_count() - 1;
}

void SocialGraph::add_edge(NodeRef from, NodeRef to, EdgeAttrs attrs) {
  if (!has_node(from)) throw std::invalid_argument("unknown node " + node_name(from));
  if (!has_node(to)) throw std::invalid_argument("unknown node " + node_name(to));
  if (from == to) throw std::invalid_argument("self loop on " + node_name(from));
  if (std::abs(from.layer - to.layer) > 1) {
    throw std::invalid_argument("edge " + node_name(from) + "->" + node_name(to) + " skips a layer");
  }
  if (!std::isfinite(attrs.reward_weight)) throw std::invalid_argument("non-finite reward weight");
  edges_[{from, to}] = attrs;
}

bool SocialGraph::remove_edge(NodeRef from, NodeRef to) { return edges_.erase({from, to}) > 0; }

const EdgeAttrs* SocialGraph::edge(NodeRef from, NodeRef to) const {
  auto it = edges_.find({from, to});
  return it == edges_.end() ? nullptr : &it->second;
}

void SocialGraph::join(AgentId agent, int group, double weight) {
  add_edge(agent_node(agent), group_node(group), EdgeAttrs{false, weight});
}

std::vector<int> SocialGraph::groups_of(AgentId agent) const {
  std::vector<int> out;
  const NodeRef a = agent_node(agent);
  for (auto it = edges_.lower_bound({a, NodeRef{1, 0}}); it != edges_.end() && it->first.first == a; ++it) {
    if (it->first.second.layer == 1) out.push_back(it->first.second.index);
  }
  return out;
}

std::vector<AgentId> SocialGraph::members(int group) const {
  std::vector<AgentId> out;
  const NodeRef g = group_node(group);
  for (const auto& [key, attrs] : edges_) {
    if (key.first.layer != 0) break;  // agent-sourced edges sort first
    if (key.second == g) out.push_back(key.first.index);
  }
  return out;
}

std::vector<double> SocialGraph::member_weights(int group) const {
  const auto m = members(group);
  if (!weighted(group)) return std::vector<double>(m.size(), m.empty() ? 0.0 : 1.0 / static_cast<double>(m.size()));
  std::vector<double> w;
  w.reserve(m.size());
  for (auto a : m) w.push_back(edge(agent_node(a), group_node(group))->reward_weight);
  return w;
}

bool SocialGraph::has_membership_edges() const {
  return std::any_of(edges_.begin(), edges_.end(),
                     [](const auto& e) { return e.first.first.layer != e.first.second.layer; });
}

bool SocialGraph::has_agent_edges() const {
  return std::any_of(edges_.begin(), edges_.end(),
                     [](const auto& e) { return e.first.first.layer == 0 && e.first.second.layer == 0; });
}

std::uint64_t SocialGraph::hash() const {
  Fnv1a h;
  h.u64(layers_.size());
  for (int n : layers_) h.i64(n);
  for (bool w : weighted_) h.u64(w ? 1 : 0);
  h.u64(edges_.size());
  for (const auto& [key, attrs] : edges_) {
    h.i64(key.first.layer);
    h.i64(key.first.index);
    h.i64(key.second.layer);
    h.i64(key.second.index);
    h.u64(attrs.share_observation ? 1 : 0);
    h.f64(attrs.reward_weight);
  }
  return h.value();
}

SocialGraph graph_from_spec(const GraphSpec& spec, int agents, int groups) {
  SocialGraph g(agents, std::max(groups, static_cast<int>(spec.groups.size())));
  for (std::size_t k = 0; k < spec.groups.size(); ++k) {
    const auto& grp = spec.groups[k];
    const int gi = static_cast<int>(k);
    g.set_weighted(gi, !grp.weights.empty());
    for (std::size_t m = 0; m < grp.members.size(); ++m) {
      auto a = parse_agent_name(grp.members[m]);
      if (!a) throw std::invalid_argument("bad agent id '" + grp.members[m] + "'");
      g.join(*a, gi, grp.weights.empty() ? 0.0 : grp.weights[m]);
    }
  }
  for (const auto& link : spec.links) {
    auto from = parse_agent_name(link.from);
    auto to = parse_agent_name(link.to);
    if (!from || !to) throw std::invalid_argument("bad link " + link.from + "->" + link.to);
    g.add_edge(agent_node(*from), agent_node(*to), EdgeAttrs{link.share_observation, 0.0});
  }
  return g;
}

std::string_view to_string(StructureCategory c) {
  switch (c) {
    case StructureCategory::isolation: return "isolation";
    case StructureCategory::connection: return "connection";
    case StructureCategory::independent_group: return "independent_group";
    case StructureCategory::overlapping_group: return "overlapping_group";
    case StructureCategory::inequality: return "inequality";
    case StructureCategory::unclassified: return "unclassified";
  }
  return "unclassified";
}

StructureCategory classify_structure(const SocialGraph& graph) {
  for (const auto& [key, attrs] : graph.edges()) {
    if (key.first.layer >= 2 || key.second.layer >= 2) return StructureCategory::unclassified;
  }
  if (!graph.has_membership_edges()) {
    return graph.has_agent_edges() ? StructureCategory::connection : StructureCategory::isolation;
  }
  for (int g = 0; g < graph.group_count(); ++g) {
    if (!graph.weighted(g)) continue;
    const auto w = graph.member_weights(g);
    for (double x : w) {
      if (std::abs(x - w.front()) > 1e-12) return StructureCategory::inequality;
    }
  }
  for (AgentId a = 0; a < graph.agent_count(); ++a) {
    if (graph.groups_of(a).size() > 1) return StructureCategory::overlapping_group;
  }
  return StructureCategory::independent_group;
}

std::vector<double> redistribute(std::span<const double> raw, const SocialGraph& graph) {
  const auto n = static_cast<std::size_t>(graph.agent_count());
  if (raw.size() != n) throw std::invalid_argument("reward vector size does not match agent count");
  std::vector<double> out(n, 0.0);
  std::vector<double> pool(static_cast<std::size_t>(graph.group_count()), 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    const auto gs = graph.groups_of(static_cast<AgentId>(a));
    if (gs.empty()) {
      out[a] += raw[a];
      continue;
    }
    const double part = raw[a] / static_cast<double>(gs.size());
    for (int g : gs) pool[static_cast<std::size_t>(g)] += part;
  }
  for (int g = 0; g < graph.group_count(); ++g) {
    const auto m = graph.members(g);
    if (m.empty()) continue;
    const auto w = graph.member_weights(g);
    double sum = 0;
    for (double x : w) {
      if (x < 0) throw std::invalid_argument("negative weight in " + group_name(g));
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("weights of " + group_name(g) + " do not sum to 1");
    for (std::size_t k = 0; k < m.size(); ++k) out[static_cast<std::size_t>(m[k])] += w[k] * pool[static_cast<std::size_t>(g)];
  }
  return out;
}

CompositeObservation merged_observation(AgentId agent, const SocialGraph& graph,
                                        std::span<const ObservationWindow> windows) {
  CompositeObservation c;
  c.own = windows[static_cast<std::size_t>(agent)];
  c.graph = graph;
  for (const auto& win : windows) {
    if (win.observer == agent) continue;
    const auto* e = graph.edge(agent_node(win.observer), agent_node(agent));
    if (e == nullptr || !e->share_observation) continue;
    c.shared.push_back(SharedWindow{win.observer, win.center, win.radius, win.cells});
  }
  return c;
}

DegreeStats degree_stats(const SocialGraph& graph, int layer) {
  const int n = graph.node_count(layer);
  if (n <= 0) throw std::invalid_argument("no nodes in layer " + std::to_string(layer));
  std::vector<int> in(static_cast<std::size_t>(n), 0), out(static_cast<std::size_t>(n), 0);
  for (const auto& [key, attrs] : graph.edges()) {
    if (key.first.layer == layer) ++out[static_cast<std::size_t>(key.first.index)];
    if (key.second.layer == layer) ++in[static_cast<std::size_t>(key.second.index)];
  }
  DegreeStats s;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    s.average_in += in[k];
    s.average_out += out[k];
    s.max_in = std::max(s.max_in, in[k]);
    s.max_out = std::max(s.max_out, out[k]);
    if (in[k] != out[k]) s.asymmetric = true;
  }
  s.average_in /= n;
  s.average_out /= n;
  return s;
}

}  // namespace synthsoc
