#include "synthsoc/engine.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "synthsoc/hash.h"

namespace synthsoc {

void apply_delta(WorldState& world, const WorldDelta& delta) {
  for (const auto& p : delta.piles) world.set_pile(p.pos, p.resource, p.count);
  for (const auto& c : delta.inventories) {
    world.agent(c.agent).inventory.contents[static_cast<std::size_t>(c.resource)] = c.count;
  }
  for (const auto& p : delta.positions) world.agent(p.agent).position = p.pos;
}

Engine::Engine(ScenarioSpec spec)
    : spec_(std::move(spec)), registry_(std::make_shared<const ContentRegistry>(spec_.registry)) {}

std::vector<Observation> Engine::reset(std::uint64_t seed) {
  seed_ = seed;
  rng_ = Rng(seed);
  world_ = generate_world(spec_, rng_);
  scenario_ = ScenarioRuntime(spec_, rng_);
  graph_ = scenario_.initial_graph();
  t_ = 0;

  const auto n = static_cast<std::size_t>(agent_count());
  const auto& reg = *registry_;
  known_res_.assign(n, std::vector<bool>(static_cast<std::size_t>(reg.resource_count()), false));
  known_ev_.assign(n, std::vector<bool>(static_cast<std::size_t>(reg.event_count()), false));
  for (std::size_t a = 0; a < n; ++a) {
    for (ResourceId r = 0; r < reg.resource_count(); ++r) {
      if (!reg.resource(r).synthesized && reg.requirement(r).empty()) known_res_[a][static_cast<std::size_t>(r)] = true;
    }
    for (EventId e = 0; e < reg.event_count(); ++e) {
      if (reg.resolved(e).requirement.empty()) known_ev_[a][static_cast<std::size_t>(e)] = true;
    }
  }
  inbox_.assign(n, {});
  raw_totals_.assign(n, Rational(0));
  shared_totals_.assign(n, 0.0);
  exec_counts_.assign(static_cast<std::size_t>(reg.event_count()), 0);

  const auto wins = windows();
  for (std::size_t a = 0; a < n; ++a) discover(static_cast<AgentId>(a), wins[a]);
  std::vector<Observation> obs;
  obs.reserve(n);
  for (std::size_t a = 0; a < n; ++a) obs.push_back(assemble(static_cast<AgentId>(a), wins));
  return obs;
}

std::vector<ObservationWindow> Engine::windows() const {
  std::vector<ObservationWindow> wins;
  wins.reserve(world_.agents().size());
  for (const auto& body : world_.agents()) wins.push_back(synthsoc::observe(world_, body.id, spec_.observation_radius));
  return wins;
}

void Engine::discover(AgentId a, const ObservationWindow& win) {
  auto& res = known_res_[static_cast<std::size_t>(a)];
  auto& ev = known_ev_[static_cast<std::size_t>(a)];
  for (const auto& cell : win.cells) {
    for (const auto& [r, count] : cell.piles) res[static_cast<std::size_t>(r)] = true;
    if (cell.site) ev[static_cast<std::size_t>(*cell.site)] = true;
  }
  for (std::size_t r = 0; r < res.size(); ++r) {
    if (win.inventory.contents[r] > 0) res[r] = true;
  }
}

std::vector<std::string> Engine::legal_actions(AgentId agent) const {
  const auto& reg = *registry_;
  const auto& known = known_res_[static_cast<std::size_t>(agent)];
  std::vector<std::string> out = {"noop", "move:N", "move:S", "move:E", "move:W", "move:stay"};
  for (ResourceId r = 0; r < reg.resource_count(); ++r)
    if (known[static_cast<std::size_t>(r)]) out.push_back("pick:" + reg.resource(r).name);
  for (ResourceId r = 0; r < reg.resource_count(); ++r)
    if (known[static_cast<std::size_t>(r)]) out.push_back("dump:" + reg.resource(r).name);
  out.emplace_back("synthesize");
  for (AgentId j = 0; j < agent_count(); ++j)
    if (j != agent) out.push_back("message:" + agent_name(j));
  for (const auto& a : scenario_.social_templates(agent)) out.push_back(action_template(a, reg));
  return out;
}

bool Engine::is_legal(AgentId agent, const Action& a) const {
  const auto& reg = *registry_;
  if (a.kind == ActionKind::pick || a.kind == ActionKind::dump) {
    if (a.resource < 0 || a.resource >= reg.resource_count()) return false;
  }
  if ((a.kind == ActionKind::message || a.kind == ActionKind::request || a.kind == ActionKind::connect ||
       a.kind == ActionKind::disconnect) &&
      (a.target < 0 || a.target >= agent_count())) {
    return false;
  }
  const auto tmpl = action_template(a, reg);
  const auto legal = legal_actions(agent);
  return std::find(legal.begin(), legal.end(), tmpl) != legal.end();
}

bool Engine::may_message(AgentId from, AgentId to) const {
  if (from == to) return false;
  if (graph_.has_edge(agent_node(from), agent_node(to))) return true;
  const auto gf = graph_.groups_of(from);
  const auto gt = graph_.groups_of(to);
  for (int g : gf)
    if (std::find(gt.begin(), gt.end(), g) != gt.end()) return true;
  return scenario_.in_session_together(from, to);
}

Observation Engine::assemble(AgentId a, std::span<const ObservationWindow> wins) const {
  Observation o;
  o.agent = a;
  o.step = t_;
  auto composite = merged_observation(a, graph_, wins);
  o.own = std::move(composite.own);
  o.shared = std::move(composite.shared);
  o.graph = std::move(composite.graph);
  o.legal = legal_actions(a);
  o.inbox = inbox_[static_cast<std::size_t>(a)];
  o.scenario.phase = scenario_.phase(t_);
  o.scenario.selector = scenario_.selector(t_);
  if (const auto* s = scenario_.session_of(a)) {
    o.scenario.session = SessionView{s->partner(a), s->turn, s->share_of(a), s->proposals};
  }
  o.done = done();
  return o;
}

Observation Engine::observe(AgentId agent) const {
  const auto wins = windows();
  return assemble(agent, wins);
}

std::uint64_t Engine::combine_state_hash(const WorldState& world, const SocialGraph& graph, std::int64_t t) {
  Fnv1a h;
  h.u64(world.hash());
  h.u64(graph.hash());
  h.i64(t);
  return h.value();
}

std::uint64_t Engine::state_hash() const { return combine_state_hash(world_, graph_, t_); }

StepResult Engine::step(std::span<const Action> joint) {
  if (done()) throw std::logic_error("episode is done");
  const auto n = static_cast<std::size_t>(agent_count());
  if (joint.size() != n) throw std::invalid_argument("joint action must hold one action per agent");
  const auto& reg = *registry_;

  StepResult res;
  res.t = t_;
  res.outcome.assign(n, "");
  res.submitted.assign(joint.begin(), joint.end());
  res.actions.assign(joint.begin(), joint.end());
  const Phase phase = scenario_.phase(t_);
  for (std::size_t a = 0; a < n; ++a) {
    auto& act = res.actions[a];
    if (!is_legal(static_cast<AgentId>(a), act)) {
      res.outcome[a] = "illegal";
      act = Action::noop();
    } else if (act.physical() && phase != Phase::physical) {
      res.outcome[a] = "phase";
      act = Action::noop();
    } else if (act.kind == ActionKind::message && act.payload.size() > kMaxMessageBytes) {
      res.outcome[a] = "payload_too_large";
      act = Action::noop();
    }
  }

  const std::vector<AgentBody> before = world_.agents();
  const std::uint64_t graph_before = graph_.hash();

  scenario_.apply_social(t_, res.actions, graph_, res.outcome);

  // Seeded priority for contested physical actions, drawn every step.
  std::vector<AgentId> priority(n);
  std::iota(priority.begin(), priority.end(), 0);
  rng_.shuffle(std::span<AgentId>(priority));

  auto flag = [&](AgentId a, ActionOutcome o) {
    if (o != ActionOutcome::ok) res.outcome[static_cast<std::size_t>(a)] = std::string(to_string(o));
  };
  for (AgentId a : priority) {
    const auto& act = res.actions[static_cast<std::size_t>(a)];
    if (act.kind == ActionKind::move) flag(a, apply_move(world_, a, act.direction));
  }
  std::vector<std::int64_t> pile_before(n, 0);
  std::set<std::pair<std::size_t, ResourceId>> touched;
  for (std::size_t a = 0; a < n; ++a) {
    const auto& act = res.actions[a];
    if (act.kind == ActionKind::pick || act.kind == ActionKind::dump) {
      const auto pos = world_.agents()[a].position;
      pile_before[a] = world_.pile(pos, act.resource);
      touched.emplace(world_.index(pos), act.resource);
    }
  }
  for (AgentId a : priority) {
    const auto& act = res.actions[static_cast<std::size_t>(a)];
    if (act.kind != ActionKind::pick) continue;
    auto o = apply_pick(world_, a, act.resource);
    if (o == ActionOutcome::no_pile && pile_before[static_cast<std::size_t>(a)] > 0) o = ActionOutcome::contested;
    flag(a, o);
  }
  for (AgentId a : priority) {
    const auto& act = res.actions[static_cast<std::size_t>(a)];
    if (act.kind == ActionKind::dump) flag(a, apply_dump(world_, a, act.resource));
  }
  for (AgentId a : priority) {
    const auto& act = res.actions[static_cast<std::size_t>(a)];
    if (act.kind != ActionKind::synthesize) continue;
    const auto s = apply_synthesize(world_, a);
    if (s.ok()) {
      res.executions.emplace_back(a, *s.event);
      ++exec_counts_[static_cast<std::size_t>(*s.event)];
    } else if (s.outcome == ActionOutcome::missing_input && s.missing) {
      res.outcome[static_cast<std::size_t>(a)] = "missing:" + reg.resource(*s.missing).name;
    } else {
      flag(a, s.outcome);
    }
  }
  std::sort(res.executions.begin(), res.executions.end());

  std::vector<std::vector<Message>> next_inbox(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto& act = res.actions[a];
    if (act.kind != ActionKind::message) continue;
    if (may_message(static_cast<AgentId>(a), act.target)) {
      next_inbox[static_cast<std::size_t>(act.target)].push_back(Message{static_cast<AgentId>(a), act.payload});
    } else {
      res.outcome[a] = "dropped";
    }
  }

  // Rewards use the graph in force during this step.
  res.raw.resize(n);
  std::vector<double> raw_d(n);
  for (std::size_t a = 0; a < n; ++a) {
    res.raw[a] = valuation(reg, world_.agents()[a]) - valuation(reg, before[a]);
    raw_d[a] = res.raw[a].to_double();
    raw_totals_[a] += res.raw[a];
  }
  res.shared = redistribute(raw_d, graph_);
  for (std::size_t a = 0; a < n; ++a) shared_totals_[a] += res.shared[a];

  ++t_;
  scenario_.end_of_step(t_, graph_);
  res.graph_changed = graph_.hash() != graph_before;

  for (const auto& [cell, r] : touched) {
    res.delta.piles.push_back(PileChange{world_.position_of(cell), r, world_.pile(world_.position_of(cell), r)});
  }
  for (std::size_t a = 0; a < n; ++a) {
    const auto& now = world_.agents()[a];
    for (std::size_t r = 0; r < now.inventory.contents.size(); ++r) {
      if (now.inventory.contents[r] != before[a].inventory.contents[r]) {
        res.delta.inventories.push_back(InventoryChange{static_cast<AgentId>(a), static_cast<ResourceId>(r), now.inventory.contents[r]});
      }
    }
    if (now.position != before[a].position) res.delta.positions.push_back(PositionChange{static_cast<AgentId>(a), now.position});
  }

  for (auto& o : res.outcome)
    if (o.empty()) o = "ok";
  inbox_ = std::move(next_inbox);
  const auto wins = windows();
  for (std::size_t a = 0; a < n; ++a) discover(static_cast<AgentId>(a), wins[a]);
  res.observations.reserve(n);
  for (std::size_t a = 0; a < n; ++a) res.observations.push_back(assemble(static_cast<AgentId>(a), wins));
  res.done = done();
  return res;
}

}  // namespace synthsoc
