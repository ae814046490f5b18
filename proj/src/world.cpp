#include "synthsoc/world.h"

#include <algorithm>
#include <set>

#include "synthsoc/hash.h"

namespace synthsoc {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::north: return "N";
    case Direction::south: return "S";
    case Direction::east: return "E";
    case Direction::west: return "W";
    case Direction::stay: return "stay";
  }
  return "stay";
}

std::optional<Direction> parse_direction(std::string_view text) {
  if (text == "N" || text == "north") return Direction::north;
  if (text == "S" || text == "south") return Direction::south;
  if (text == "E" || text == "east") return Direction::east;
  if (text == "W" || text == "west") return Direction::west;
  if (text == "stay") return Direction::stay;
  return std::nullopt;
}

std::string_view to_string(ActionOutcome o) {
  switch (o) {
    case ActionOutcome::ok: return "ok";
    case ActionOutcome::blocked: return "blocked";
    case ActionOutcome::no_pile: return "no_pile";
    case ActionOutcome::imperceivable: return "imperceivable";
    case ActionOutcome::capacity: return "capacity";
    case ActionOutcome::empty_holding: return "empty_holding";
    case ActionOutcome::no_site: return "no_site";
    case ActionOutcome::missing_input: return "missing_input";
    case ActionOutcome::output_capacity: return "output_capacity";
    case ActionOutcome::contested: return "contested";
  }
  return "ok";
}

WorldState::WorldState(std::shared_ptr<const ContentRegistry> registry, int height, int width)
    : registry_(std::move(registry)),
      height_(height),
      width_(width),
      n_res_(static_cast<std::size_t>(registry_->resource_count())),
      terrain_(static_cast<std::size_t>(height) * width, Terrain::open),
      piles_(terrain_.size() * n_res_, 0),
      sites_(terrain_.size(), -1) {}

bool WorldState::has_any_pile(GridPos p) const {
  const auto base = index(p) * n_res_;
  for (std::size_t r = 0; r < n_res_; ++r)
    if (piles_[base + r] > 0) return true;
  return false;
}

CellView WorldState::cell(GridPos p) const {
  CellView v;
  v.pos = p;
  v.terrain = terrain(p);
  for (std::size_t r = 0; r < n_res_; ++r) {
    const auto n = piles_[index(p) * n_res_ + r];
    if (n > 0) v.piles.emplace_back(static_cast<ResourceId>(r), n);
  }
  v.site = site(p);
  for (const auto& a : agents_)
    if (a.position == p) v.occupants.push_back(a.id);
  return v;
}

std::int64_t WorldState::total_units(ResourceId r) const {
  std::int64_t total = 0;
  for (std::size_t c = 0; c < terrain_.size(); ++c) total += piles_[c * n_res_ + static_cast<std::size_t>(r)];
  for (const auto& a : agents_) total += a.inventory.count(r);
  return total;
}

std::uint64_t WorldState::hash() const {
  Fnv1a h;
  h.u64(static_cast<std::uint64_t>(height_));
  h.u64(static_cast<std::uint64_t>(width_));
  h.bytes(terrain_.data(), terrain_.size());
  for (auto v : piles_) h.i64(v);
  for (auto s : sites_) h.i64(s);
  for (const auto& a : agents_) {
    h.i64(a.position.row);
    h.i64(a.position.col);
    for (auto c : a.inventory.contents) h.i64(c);
  }
  return h.value();
}

namespace {

// Draws `count` distinct entries of `pool` (which is consumed from).
std::vector<std::size_t> sample_cells(std::vector<std::size_t>& pool, std::int64_t count, Rng& rng,
                                      const std::string& what) {
  if (count > static_cast<std::int64_t>(pool.size())) {
    throw GenerationError("insufficient open cells for " + what + ": need " + std::to_string(count) + ", have " +
                          std::to_string(pool.size()));
  }
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    const auto j = static_cast<std::size_t>(rng.below(pool.size()));
    out.push_back(pool[j]);
    pool[j] = pool.back();
    pool.pop_back();
  }
  return out;
}

}  // namespace

WorldState generate_world(const ScenarioSpec& spec, Rng& rng) {
  auto reg = std::make_shared<const ContentRegistry>(spec.registry);
  WorldState world(reg, spec.height, spec.width);
  const std::size_t cells = world.cell_count();

  auto pool_of = [&](auto&& keep) {
    std::vector<std::size_t> pool;
    for (std::size_t c = 0; c < cells; ++c)
      if (keep(world.position_of(c))) pool.push_back(c);
    return pool;
  };

  // Blocks.
  for (const auto& p : spec.terrain.positions) world.set_terrain(p, Terrain::block);
  if (!spec.terrain.explicit_positions() && spec.terrain.count > 0) {
    // Random blocks avoid every explicitly placed entity.
    std::set<GridPos> reserved;
    for (const auto& [name, pl] : spec.resources_on_map) reserved.insert(pl.positions.begin(), pl.positions.end());
    for (const auto& [name, pl] : spec.event_sites) reserved.insert(pl.positions.begin(), pl.positions.end());
    for (const auto& a : spec.agents)
      if (a.position) reserved.insert(*a.position);
    auto pool = pool_of([&](GridPos p) { return reserved.count(p) == 0; });
    for (auto c : sample_cells(pool, spec.terrain.count, rng, "terrain blocks"))
      world.set_terrain(world.position_of(c), Terrain::block);
  }

  // Event sites, one per cell.
  for (const auto& ev : reg->events()) {
    auto it = spec.event_sites.find(ev.name);
    if (it == spec.event_sites.end()) continue;
    for (const auto& p : it->second.positions) world.set_site(p, reg->event_id(ev.name));
  }
  for (const auto& ev : reg->events()) {
    auto it = spec.event_sites.find(ev.name);
    if (it == spec.event_sites.end() || it->second.explicit_positions()) continue;
    auto pool = pool_of([&](GridPos p) { return world.terrain(p) == Terrain::open && !world.site(p); });
    for (auto c : sample_cells(pool, it->second.count, rng, ev.name + " sites"))
      world.set_site(world.position_of(c), reg->event_id(ev.name));
  }

  // Resource piles, one kind per cell at generation time.
  for (const auto& r : reg->resources()) {
    auto it = spec.resources_on_map.find(r.name);
    if (it == spec.resources_on_map.end()) continue;
    for (const auto& p : it->second.positions) world.set_pile(p, reg->resource_id(r.name), it->second.amount);
  }
  for (const auto& r : reg->resources()) {
    auto it = spec.resources_on_map.find(r.name);
    if (it == spec.resources_on_map.end() || it->second.explicit_positions()) continue;
    auto pool = pool_of([&](GridPos p) { return world.terrain(p) == Terrain::open && !world.has_any_pile(p); });
    for (auto c : sample_cells(pool, it->second.count, rng, r.name + " piles"))
      world.set_pile(world.position_of(c), reg->resource_id(r.name), it->second.amount);
  }

  // Agents.
  const auto n_res = static_cast<std::size_t>(reg->resource_count());
  auto free_pool = pool_of([&](GridPos p) { return world.terrain(p) == Terrain::open && !world.site(p); });
  if (free_pool.empty()) throw GenerationError("insufficient open cells for agents");
  std::vector<std::size_t> remaining = free_pool;
  AgentId next_id = 0;
  for (const auto& spec_agent : spec.agents) {
    for (int k = 0; k < spec_agent.count; ++k) {
      AgentBody body;
      body.id = next_id++;
      body.role = spec_agent.role;
      body.inventory.contents.assign(n_res, 0);
      body.inventory.capacity.assign(n_res, kUnbounded);
      body.preference.assign(n_res, Rational(1));
      for (const auto& [name, cap] : spec_agent.capacity) body.inventory.capacity[static_cast<std::size_t>(reg->resource_id(name))] = cap;
      for (const auto& [name, h] : spec_agent.preference) body.preference[static_cast<std::size_t>(reg->resource_id(name))] = h;
      for (const auto& [name, n] : spec_agent.initial_inventory) body.inventory.contents[static_cast<std::size_t>(reg->resource_id(name))] = n;
      if (spec_agent.position) {
        body.position = *spec_agent.position;
      } else {
        // Distinct starting cells while they last, then shared ones.
        if (remaining.empty()) remaining = free_pool;
        body.position = world.position_of(sample_cells(remaining, 1, rng, "agents").front());
      }
      world.agents().push_back(std::move(body));
    }
  }
  return world;
}

bool can_perceive(const Inventory& inventory, std::span<const ResourceId> requirement) {
  return std::all_of(requirement.begin(), requirement.end(), [&](ResourceId r) { return inventory.count(r) >= 1; });
}

bool can_perceive_resource(const ContentRegistry& reg, const Inventory& inventory, ResourceId r) {
  return can_perceive(inventory, reg.requirement(r));
}

bool can_perceive_event(const ContentRegistry& reg, const Inventory& inventory, EventId e) {
  return can_perceive(inventory, reg.resolved(e).requirement);
}

ObservationWindow observe(const WorldState& world, AgentId agent, int radius) {
  const auto& reg = world.registry();
  const auto& body = world.agent(agent);
  ObservationWindow win;
  win.observer = agent;
  win.center = body.position;
  win.radius = radius;
  win.inventory = body.inventory;
  const int r0 = std::max(0, body.position.row - radius), r1 = std::min(world.height() - 1, body.position.row + radius);
  const int c0 = std::max(0, body.position.col - radius), c1 = std::min(world.width() - 1, body.position.col + radius);
  win.cells.reserve(static_cast<std::size_t>((r1 - r0 + 1) * (c1 - c0 + 1)));
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      CellView v;
      v.pos = {r, c};
      v.terrain = world.terrain(v.pos);
      for (ResourceId k = 0; k < reg.resource_count(); ++k) {
        const auto n = world.pile(v.pos, k);
        if (n > 0 && can_perceive_resource(reg, body.inventory, k)) v.piles.emplace_back(k, n);
      }
      if (auto s = world.site(v.pos); s && can_perceive_event(reg, body.inventory, *s)) v.site = s;
      win.cells.push_back(std::move(v));
    }
  }
  for (const auto& other : world.agents()) {
    const auto& p = other.position;
    if (p.row < r0 || p.row > r1 || p.col < c0 || p.col > c1) continue;
    win.cells[static_cast<std::size_t>((p.row - r0) * (c1 - c0 + 1) + (p.col - c0))].occupants.push_back(other.id);
  }
  return win;
}

ActionOutcome apply_move(WorldState& world, AgentId agent, Direction dir) {
  auto& body = world.agent(agent);
  GridPos target = body.position;
  switch (dir) {
    case Direction::north: --target.row; break;  // row 0 is the top row
    case Direction::south: ++target.row; break;
    case Direction::east: ++target.col; break;
    case Direction::west: --target.col; break;
    case Direction::stay: return ActionOutcome::ok;
  }
  if (!world.is_open(target)) return ActionOutcome::blocked;
  body.position = target;
  return ActionOutcome::ok;
}

ActionOutcome apply_pick(WorldState& world, AgentId agent, ResourceId r) {
  auto& body = world.agent(agent);
  if (!can_perceive_resource(world.registry(), body.inventory, r)) return ActionOutcome::imperceivable;
  const auto have = world.pile(body.position, r);
  if (have <= 0) return ActionOutcome::no_pile;
  if (body.inventory.room(r) <= 0) return ActionOutcome::capacity;
  world.set_pile(body.position, r, have - 1);
  ++body.inventory.contents[static_cast<std::size_t>(r)];
  return ActionOutcome::ok;
}

ActionOutcome apply_dump(WorldState& world, AgentId agent, ResourceId r) {
  auto& body = world.agent(agent);
  if (body.inventory.count(r) <= 0) return ActionOutcome::empty_holding;
  --body.inventory.contents[static_cast<std::size_t>(r)];
  world.set_pile(body.position, r, world.pile(body.position, r) + 1);
  return ActionOutcome::ok;
}

SynthesisResult apply_synthesize(WorldState& world, AgentId agent) {
  SynthesisResult res;
  auto& body = world.agent(agent);
  const auto& reg = world.registry();
  res.event = world.site(body.position);
  if (!res.event) return res;
  if (!can_perceive_event(reg, body.inventory, *res.event)) {
    res.outcome = ActionOutcome::imperceivable;
    return res;
  }
  const auto& ev = reg.resolved(*res.event);
  Inventory next = body.inventory;
  for (const auto& [r, n] : ev.inputs) {
    if (next.count(r) < n) {
      res.outcome = ActionOutcome::missing_input;
      res.missing = r;
      return res;
    }
    next.contents[static_cast<std::size_t>(r)] -= n;
  }
  for (const auto& [r, n] : ev.outputs) {
    if (next.room(r) < n) {
      res.outcome = ActionOutcome::output_capacity;
      return res;
    }
    next.contents[static_cast<std::size_t>(r)] += n;
  }
  body.inventory = std::move(next);
  res.outcome = ActionOutcome::ok;
  return res;
}

Rational valuation(const ContentRegistry& reg, const AgentBody& agent) {
  Rational total;
  for (ResourceId r = 0; r < reg.resource_count(); ++r) {
    const auto n = agent.inventory.count(r);
    if (n == 0) continue;
    total += Rational(n) * agent.preference[static_cast<std::size_t>(r)] * reg.resource(r).objective_reward;
  }
  return total;
}

}  // namespace synthsoc
