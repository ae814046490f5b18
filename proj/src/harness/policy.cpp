#include "synthsoc/harness/policy.h"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace synthsoc {

std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::noop: return "noop";
    case PolicyKind::random: return "random";
    case PolicyKind::greedy: return "greedy";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view text) {
  for (auto k : {PolicyKind::noop, PolicyKind::random, PolicyKind::greedy})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

const AgentSpec& agent_spec_of(const ScenarioSpec& spec, AgentId agent) {
  AgentId next = 0;
  for (const auto& a : spec.agents) {
    if (agent < next + a.count) return a;
    next += a.count;
  }
  throw std::out_of_range("no agent " + agent_name(agent));
}

Action instantiate_template(const std::string& tmpl, const ContentRegistry& reg, Rng& rng) {
  if (tmpl == "propose") return Action::propose(static_cast<double>(rng.below(11)) / 10.0);
  auto a = parse_action(tmpl, reg);
  if (!a) throw std::invalid_argument("not an action template: " + tmpl);
  if (a->kind == ActionKind::message) a->payload = "hi";
  return *a;
}

void RandomPolicy::reset(std::uint64_t episode_seed) {
  rng_ = Rng(derive_seed(episode_seed, 0x52414e44ULL + static_cast<std::uint64_t>(self_)));
}

Action RandomPolicy::act(const Observation& obs) {
  if (obs.legal.empty()) return Action::noop();
  return instantiate_template(obs.legal[static_cast<std::size_t>(rng_.below(obs.legal.size()))], *reg_, rng_);
}

GreedyPolicy::GreedyPolicy(const ScenarioSpec& spec, AgentId self)
    : reg_(std::make_shared<ContentRegistry>(spec.registry)), self_(self), agents_(spec.agent_count()) {
  const auto& as = agent_spec_of(spec, self);
  preference_.assign(static_cast<std::size_t>(reg_->resource_count()), Rational(1));
  for (const auto& [name, p] : as.preference) preference_[static_cast<std::size_t>(reg_->resource_id(name))] = p;
}

void GreedyPolicy::reset(std::uint64_t episode_seed) {
  rng_ = Rng(derive_seed(episode_seed, 0x47524459ULL + static_cast<std::uint64_t>(self_)));
}

Rational GreedyPolicy::value(ResourceId r) const {
  return preference_[static_cast<std::size_t>(r)] * reg_->resource(r).objective_reward;
}

bool GreedyPolicy::profitable(EventId e) const {
  const auto& ev = reg_->resolved(e);
  Rational gain(0);
  for (const auto& [r, n] : ev.outputs) gain += value(r) * Rational(n);
  for (const auto& [r, n] : ev.inputs) gain -= value(r) * Rational(n);
  return gain > Rational(0);
}

Action GreedyPolicy::act(const Observation& obs) {
  if (obs.done) return Action::noop();
  if (obs.scenario.phase != Phase::physical) return social(obs);
  return physical(obs);
}

Action GreedyPolicy::social(const Observation& obs) const {
  auto legal = [&](const std::string& t) { return std::find(obs.legal.begin(), obs.legal.end(), t) != obs.legal.end(); };
  if (obs.scenario.phase == Phase::formation) {
    if (obs.scenario.selector != self_) return Action::noop();
    const int g = self_ / 2;
    if (legal("select_group:" + group_name(g))) return Action::with_target(ActionKind::select_group, g);
    if (legal("select_group:g0")) return Action::with_target(ActionKind::select_group, 0);
    return Action::noop();
  }
  // Negotiation.
  if (const auto& s = obs.scenario.session) {
    if (s->turn != self_) return Action::noop();
    if (s->my_share && *s->my_share >= 0.5 - 1e-12) return Action::accept();
    return Action::propose(0.5);
  }
  const AgentId partner = self_ ^ 1;
  if (partner >= agents_) return Action::noop();
  const auto mine = obs.graph.groups_of(self_);
  const auto theirs = obs.graph.groups_of(partner);
  for (int g : mine)
    if (std::find(theirs.begin(), theirs.end(), g) != theirs.end()) return Action::noop();
  if (legal("request:" + agent_name(partner))) return Action::with_target(ActionKind::request, partner);
  return Action::noop();
}

Action GreedyPolicy::physical(const Observation& obs) {
  const auto& inv = obs.own.inventory;
  const auto& reg = *reg_;
  auto legal = [&](const std::string& t) { return std::find(obs.legal.begin(), obs.legal.end(), t) != obs.legal.end(); };
  auto holds_inputs = [&](EventId e) {
    for (const auto& [r, n] : reg.resolved(e).inputs)
      if (inv.count(r) < n) return false;
    for (const auto& [r, n] : reg.resolved(e).outputs)
      if (inv.room(r) < n) return false;
    return true;
  };

  std::map<GridPos, const CellView*> cells;
  const CellView* here = nullptr;
  for (const auto& c : obs.own.cells) {
    cells[c.pos] = &c;
    if (c.pos == obs.own.center) here = &c;
  }

  // Resources worth walking for: inputs missing for some profitable event,
  // else anything with positive value.
  std::vector<bool> wanted(static_cast<std::size_t>(reg.resource_count()), false);
  bool any_wanted = false;
  for (EventId e = 0; e < reg.event_count(); ++e) {
    if (!profitable(e)) continue;
    bool out_room = true;
    for (const auto& [r, n] : reg.resolved(e).outputs) out_room = out_room && inv.room(r) >= n;
    if (!out_room) continue;
    for (const auto& [r, n] : reg.resolved(e).inputs) {
      if (inv.count(r) < n && inv.room(r) > 0) {
        wanted[static_cast<std::size_t>(r)] = true;
        any_wanted = true;
      }
    }
  }
  if (!any_wanted) {
    for (ResourceId r = 0; r < reg.resource_count(); ++r)
      if (value(r) > Rational(0) && inv.room(r) > 0) wanted[static_cast<std::size_t>(r)] = true;
  }

  auto pile_target = [&](const CellView& c) {
    for (const auto& [r, n] : c.piles)
      if (n > 0 && wanted[static_cast<std::size_t>(r)] && inv.room(r) > 0 && legal("pick:" + reg.resource(r).name)) return r;
    return ResourceId{-1};
  };
  auto site_target = [&](const CellView& c) { return c.site && profitable(*c.site) && holds_inputs(*c.site); };

  if (here != nullptr) {
    if (site_target(*here)) return Action::synthesize();
    if (auto r = pile_target(*here); r >= 0) return Action::pick(r);
  }

  // BFS over open window cells from the centre.
  struct Step {
    GridPos pos;
    Direction first;
  };
  static constexpr std::pair<Direction, GridPos> kMoves[] = {
      {Direction::north, {-1, 0}}, {Direction::south, {1, 0}}, {Direction::east, {0, 1}}, {Direction::west, {0, -1}}};
  std::map<GridPos, bool> seen{{obs.own.center, true}};
  std::deque<Step> queue;
  for (const auto& [d, off] : kMoves) {
    GridPos p{obs.own.center.row + off.row, obs.own.center.col + off.col};
    auto it = cells.find(p);
    if (it == cells.end() || it->second->terrain != Terrain::open) continue;
    seen[p] = true;
    queue.push_back({p, d});
  }
  while (!queue.empty()) {
    const Step s = queue.front();
    queue.pop_front();
    const CellView& c = *cells[s.pos];
    if (site_target(c) || pile_target(c) >= 0) return Action::move(s.first);
    for (const auto& [d, off] : kMoves) {
      GridPos p{s.pos.row + off.row, s.pos.col + off.col};
      auto it = cells.find(p);
      if (it == cells.end() || it->second->terrain != Terrain::open || seen.count(p)) continue;
      seen[p] = true;
      queue.push_back({p, s.first});
    }
  }

  // Nothing in view: wander.
  static constexpr Direction kDirs[] = {Direction::north, Direction::south, Direction::east, Direction::west};
  return Action::move(kDirs[rng_.below(4)]);
}

std::unique_ptr<Policy> make_policy(PolicyKind kind, const ScenarioSpec& spec, AgentId agent) {
  switch (kind) {
    case PolicyKind::noop: return std::make_unique<NoopPolicy>();
    case PolicyKind::random: return std::make_unique<RandomPolicy>(spec.registry, agent);
    case PolicyKind::greedy: return std::make_unique<GreedyPolicy>(spec, agent);
  }
  throw std::invalid_argument("unknown policy kind");
}

std::vector<std::unique_ptr<Policy>> make_policies(const std::vector<PolicyKind>& kinds, const ScenarioSpec& spec) {
  const int n = spec.agent_count();
  if (kinds.size() != 1 && kinds.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("need one policy kind or one per agent");
  }
  std::vector<std::unique_ptr<Policy>> out;
  for (AgentId a = 0; a < n; ++a) out.push_back(make_policy(kinds[kinds.size() == 1 ? 0 : static_cast<std::size_t>(a)], spec, a));
  return out;
}

}  // namespace synthsoc
