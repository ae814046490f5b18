#include "synthsoc/scenarios.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace synthsoc {

std::map<AgentId, double> merge_weights(const std::map<AgentId, double>& existing, AgentId newcomer, double w_rep,
                                        double w_new) {
  if (w_rep < 0 || w_new < 0) throw std::invalid_argument("split component is negative");
  if (std::abs(w_rep + w_new - 1.0) > 1e-9) throw std::invalid_argument("split does not sum to 1");
  if (existing.count(newcomer)) throw std::invalid_argument("newcomer is already a member");
  auto out = existing;
  for (auto& [id, w] : out) w *= w_rep;
  out[newcomer] = w_new;
  return out;
}

std::map<AgentId, double> merge_sides(const std::map<AgentId, double>& a, const std::map<AgentId, double>& b,
                                      double share_a) {
  if (share_a < 0 || share_a > 1) throw std::invalid_argument("share outside [0, 1]");
  std::map<AgentId, double> out;
  for (const auto& [id, w] : a) out[id] = w * share_a;
  for (const auto& [id, w] : b) {
    if (out.count(id)) throw std::invalid_argument("sides overlap");
    out[id] = w * (1.0 - share_a);
  }
  return out;
}

std::optional<double> split_ratio(const SocialGraph& graph, std::span<const std::string> roles,
                                  std::string_view numerator, std::string_view denominator) {
  double num = 0, den = 0;
  for (int g = 0; g < graph.group_count(); ++g) {
    const auto m = graph.members(g);
    const auto w = graph.member_weights(g);
    for (std::size_t k = 0; k < m.size(); ++k) {
      const auto& role = roles[static_cast<std::size_t>(m[k])];
      if (role == numerator) num += w[k];
      if (role == denominator) den += w[k];
    }
  }
  if (den == 0) return std::nullopt;
  return num / den;
}

std::vector<std::pair<AgentId, AgentId>> negotiation_round(std::span<const std::optional<AgentId>> requests) {
  std::vector<std::pair<AgentId, AgentId>> out;
  const auto n = static_cast<AgentId>(requests.size());
  for (AgentId i = 0; i < n; ++i) {
    const auto& r = requests[static_cast<std::size_t>(i)];
    if (!r || *r <= i || *r >= n) continue;
    if (requests[static_cast<std::size_t>(*r)] == i) out.emplace_back(i, *r);
  }
  return out;
}

BargainSession open_session(AgentId a, AgentId b) {
  BargainSession s;
  s.first = std::min(a, b);
  s.second = std::max(a, b);
  s.turn = s.first;
  return s;
}

BargainResult bargain_act(BargainSession& s, AgentId actor, const Action& act, int max_proposals) {
  if (s.status != BargainSession::Status::open) return BargainResult::closed;
  if (actor != s.turn) return BargainResult::out_of_turn;
  switch (act.kind) {
    case ActionKind::propose:
      if (!(act.share >= 0 && act.share <= 1)) return BargainResult::invalid_share;
      s.actors.push_back(actor);
      if (s.proposals >= max_proposals) {
        s.status = BargainSession::Status::declined;
        return BargainResult::ok;
      }
      ++s.proposals;
      s.table = actor == s.first ? act.share : 1.0 - act.share;
      s.turn = s.partner(actor);
      return BargainResult::ok;
    case ActionKind::accept:
      if (!s.table) return BargainResult::empty_table;
      s.actors.push_back(actor);
      s.status = BargainSession::Status::accepted;
      return BargainResult::ok;
    case ActionKind::decline:
      s.actors.push_back(actor);
      s.status = BargainSession::Status::declined;
      return BargainResult::ok;
    default:
      throw std::invalid_argument("not a bargaining act");
  }
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::formation: return "formation";
    case Phase::negotiation: return "negotiation";
    case Phase::physical: return "physical";
  }
  return "physical";
}

ScenarioRuntime::ScenarioRuntime(const ScenarioSpec& spec, Rng& rng)
    : params_(spec.scenario), agents_(spec.agent_count()), groups_(spec.group_count()) {
  if (params_.kind == ScenarioKind::contract) {
    order_.resize(static_cast<std::size_t>(agents_));
    for (AgentId i = 0; i < agents_; ++i) order_[static_cast<std::size_t>(i)] = i;
    rng.shuffle(std::span<AgentId>(order_));
  }
}

SocialGraph ScenarioRuntime::initial_graph() const {
  if (params_.kind == ScenarioKind::social_structure) return graph_from_spec(params_.initial_graph, agents_, groups_);
  SocialGraph g(agents_, groups_);
  if (params_.kind == ScenarioKind::negotiation) {
    for (int k = 0; k < groups_; ++k) g.set_weighted(k, true);
  }
  return g;
}

std::int64_t ScenarioRuntime::formation_steps() const {
  switch (params_.kind) {
    case ScenarioKind::contract: return static_cast<std::int64_t>(params_.rounds) * agents_;
    case ScenarioKind::negotiation: return params_.negotiation_steps;
    default: return 0;
  }
}

Phase ScenarioRuntime::phase(std::int64_t t) const {
  if (t < formation_steps()) return params_.kind == ScenarioKind::contract ? Phase::formation : Phase::negotiation;
  return Phase::physical;
}

std::vector<Action> ScenarioRuntime::social_templates(AgentId agent) const {
  std::vector<Action> out;
  switch (params_.kind) {
    case ScenarioKind::contract:
      for (int g = 0; g < groups_; ++g) out.push_back(Action::with_target(ActionKind::select_group, g));
      break;
    case ScenarioKind::negotiation:
      for (AgentId j = 0; j < agents_; ++j)
        if (j != agent) out.push_back(Action::with_target(ActionKind::request, j));
      out.push_back(Action::propose(0.5));
      out.push_back(Action::accept());
      out.push_back(Action::decline());
      break;
    case ScenarioKind::exploration:
      for (AgentId j = 0; j < agents_; ++j)
        if (j != agent) out.push_back(Action::with_target(ActionKind::connect, j));
      for (AgentId j = 0; j < agents_; ++j)
        if (j != agent) out.push_back(Action::with_target(ActionKind::disconnect, j));
      for (int g = 0; g < groups_; ++g) out.push_back(Action::with_target(ActionKind::join, g));
      for (int g = 0; g < groups_; ++g) out.push_back(Action::with_target(ActionKind::leave, g));
      break;
    case ScenarioKind::social_structure:
      break;  // the schedule owns the graph
  }
  return out;
}

std::optional<AgentId> ScenarioRuntime::selector(std::int64_t t) const {
  if (params_.kind != ScenarioKind::contract || t < 0 || t >= formation_steps() || agents_ == 0) return std::nullopt;
  return order_[static_cast<std::size_t>(t % agents_)];
}

const BargainSession* ScenarioRuntime::session_of(AgentId a) const {
  for (const auto& s : sessions_)
    if (s.involves(a)) return &s;
  return nullptr;
}

bool ScenarioRuntime::in_session_together(AgentId a, AgentId b) const {
  const auto* s = session_of(a);
  return s != nullptr && s->involves(b) && a != b;
}

void ScenarioRuntime::apply_social(std::int64_t t, std::span<const Action> actions, SocialGraph& graph,
                                   std::vector<std::string>& outcome) {
  const Phase ph = phase(t);
  switch (params_.kind) {
    case ScenarioKind::contract: {
      const auto sel = selector(t);
      for (AgentId a = 0; a < agents_; ++a) {
        const auto& act = actions[static_cast<std::size_t>(a)];
        if (act.kind != ActionKind::select_group) continue;
        if (ph != Phase::formation) {
          outcome[static_cast<std::size_t>(a)] = "phase";
        } else if (sel != a) {
          outcome[static_cast<std::size_t>(a)] = "out_of_turn";
        } else {
          for (int g : graph.groups_of(a)) graph.leave(a, g);
          graph.join(a, act.target);
        }
      }
      break;
    }
    case ScenarioKind::negotiation:
      if (ph == Phase::negotiation) {
        apply_negotiation(actions, graph, outcome);
      } else {
        for (AgentId a = 0; a < agents_; ++a)
          if (actions[static_cast<std::size_t>(a)].social()) outcome[static_cast<std::size_t>(a)] = "phase";
      }
      break;
    case ScenarioKind::exploration:
      for (AgentId a = 0; a < agents_; ++a) {
        const auto& act = actions[static_cast<std::size_t>(a)];
        switch (act.kind) {
          case ActionKind::connect: graph.add_edge(agent_node(a), agent_node(act.target), EdgeAttrs{true, 0.0}); break;
          case ActionKind::disconnect: graph.remove_edge(agent_node(a), agent_node(act.target)); break;
          case ActionKind::join: graph.join(a, act.target); break;
          case ActionKind::leave: graph.leave(a, act.target); break;
          default: break;
        }
      }
      break;
    case ScenarioKind::social_structure:
      break;
  }
}

void ScenarioRuntime::apply_negotiation(std::span<const Action> actions, SocialGraph& graph,
                                        std::vector<std::string>& outcome) {
  auto bargaining = [](ActionKind k) {
    return k == ActionKind::propose || k == ActionKind::accept || k == ActionKind::decline;
  };
  std::vector<bool> busy_at_start(static_cast<std::size_t>(agents_), false);
  for (const auto& s : sessions_) busy_at_start[static_cast<std::size_t>(s.first)] = busy_at_start[static_cast<std::size_t>(s.second)] = true;

  // Turns inside open sessions.
  for (AgentId a = 0; a < agents_; ++a) {
    const auto& act = actions[static_cast<std::size_t>(a)];
    auto& out = outcome[static_cast<std::size_t>(a)];
    if (act.kind == ActionKind::request && busy_at_start[static_cast<std::size_t>(a)]) out = "in_session";
    if (!bargaining(act.kind)) continue;
    auto it = std::find_if(sessions_.begin(), sessions_.end(), [&](const auto& s) { return s.involves(a); });
    if (it == sessions_.end()) {
      out = "no_session";
      continue;
    }
    switch (bargain_act(*it, a, act, params_.max_proposals)) {
      case BargainResult::ok: break;
      case BargainResult::out_of_turn: out = "out_of_turn"; break;
      case BargainResult::empty_table: out = "empty_table"; break;
      case BargainResult::invalid_share: out = "invalid_share"; break;
      case BargainResult::closed: out = "no_session"; break;
    }
  }
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (it->status == BargainSession::Status::open) {
      ++it;
      continue;
    }
    if (it->status == BargainSession::Status::accepted) settle(*it, graph);
    closed_.push_back(std::move(*it));
    it = sessions_.erase(it);
  }

  // New sessions from mutual requests by agents that were free at step start.
  std::vector<std::optional<AgentId>> requests(static_cast<std::size_t>(agents_));
  for (AgentId a = 0; a < agents_; ++a) {
    const auto& act = actions[static_cast<std::size_t>(a)];
    if (act.kind != ActionKind::request || busy_at_start[static_cast<std::size_t>(a)]) continue;
    auto& out = outcome[static_cast<std::size_t>(a)];
    if (act.target == a) {
      out = "self_request";
      continue;
    }
    const auto ga = graph.groups_of(a), gb = graph.groups_of(act.target);
    if (!ga.empty() && ga == gb) {
      out = "same_group";
      continue;
    }
    requests[static_cast<std::size_t>(a)] = act.target;
  }
  // A group may sit in one session at a time; pairs are served by lower id.
  auto side_key = [&](AgentId a) {
    const auto gs = graph.groups_of(a);
    return gs.empty() ? -1 - a : gs.front();
  };
  std::set<int> taken;
  for (const auto& s : sessions_) {
    taken.insert(side_key(s.first));
    taken.insert(side_key(s.second));
  }
  for (auto [i, j] : negotiation_round(requests)) {
    const int ki = side_key(i), kj = side_key(j);
    if (taken.count(ki) || taken.count(kj)) {
      outcome[static_cast<std::size_t>(i)] = outcome[static_cast<std::size_t>(j)] = "busy";
      continue;
    }
    taken.insert(ki);
    taken.insert(kj);
    sessions_.push_back(open_session(i, j));
  }
  for (AgentId a = 0; a < agents_; ++a) {
    if (requests[static_cast<std::size_t>(a)] && session_of(a) == nullptr && outcome[static_cast<std::size_t>(a)].empty()) {
      outcome[static_cast<std::size_t>(a)] = "unmatched";
    }
  }
}

void ScenarioRuntime::settle(const BargainSession& s, SocialGraph& graph) {
  auto side = [&](AgentId a, std::optional<int>& group) {
    std::map<AgentId, double> w;
    const auto gs = graph.groups_of(a);
    if (gs.empty()) {
      w[a] = 1.0;
      return w;
    }
    group = gs.front();
    const auto m = graph.members(*group);
    const auto mw = graph.member_weights(*group);
    for (std::size_t k = 0; k < m.size(); ++k) w[m[k]] = mw[k];
    return w;
  };
  std::optional<int> ga, gb;
  const auto wa = side(s.first, ga);
  const auto wb = side(s.second, gb);
  const auto merged = merge_sides(wa, wb, *s.table);

  int target = -1;
  if (ga && gb) {
    target = std::min(*ga, *gb);
  } else if (ga || gb) {
    target = ga ? *ga : *gb;
  } else {
    for (int g = 0; g < graph.group_count() && target < 0; ++g)
      if (graph.members(g).empty()) target = g;
    if (target < 0) throw std::logic_error("no free group node");
  }
  for (const auto& [id, w] : merged) {
    for (int g : graph.groups_of(id)) graph.leave(id, g);
  }
  graph.set_weighted(target, true);
  for (const auto& [id, w] : merged) graph.join(id, target, w);
}

void ScenarioRuntime::end_of_step(std::int64_t t_next, SocialGraph& graph) {
  if (params_.kind == ScenarioKind::social_structure) {
    for (const auto& entry : params_.schedule) {
      if (entry.step == t_next) graph = graph_from_spec(entry.graph, agents_, groups_);
    }
  }
  if (params_.kind == ScenarioKind::negotiation && t_next == params_.negotiation_steps) {
    for (auto& s : sessions_) {
      s.status = BargainSession::Status::declined;
      closed_.push_back(std::move(s));
    }
    sessions_.clear();
  }
}

}  // namespace synthsoc
