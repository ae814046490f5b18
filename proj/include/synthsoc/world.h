#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "synthsoc/config.h"
#include "synthsoc/rational.h"
#include "synthsoc/rng.h"

namespace synthsoc {

enum class Terrain : std::uint8_t { open, block };

enum class Direction : std::uint8_t { north, south, east, west, stay };

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view text);

// Why a physical action did or did not change the world.
enum class ActionOutcome : std::uint8_t {
  ok,
  blocked,        // move target outside the map or a block cell
  no_pile,        // nothing of that kind on the cell
  imperceivable,  // requirement not carried
  capacity,       // inventory full for that kind
  empty_holding,  // dump with none held
  no_site,        // synthesize off an event site
  missing_input,
  output_capacity,
  contested,      // lost the last unit to a higher-priority agent this step
};

std::string_view to_string(ActionOutcome o);

struct Inventory {
  std::vector<std::int64_t> contents;  // indexed by ResourceId
  std::vector<std::int64_t> capacity;  // kUnbounded when unlisted

  std::int64_t count(ResourceId r) const { return contents[static_cast<std::size_t>(r)]; }
  std::int64_t room(ResourceId r) const {
    const auto cap = capacity[static_cast<std::size_t>(r)];
    return cap == kUnbounded ? kUnbounded : cap - count(r);
  }
  friend bool operator==(const Inventory&, const Inventory&) = default;
};

struct AgentBody {
  AgentId id = 0;
  std::string role;
  GridPos position;
  Inventory inventory;
  std::vector<Rational> preference;  // indexed by ResourceId, default 1
  friend bool operator==(const AgentBody&, const AgentBody&) = default;
};

struct CellView {
  GridPos pos;
  Terrain terrain = Terrain::open;
  std::vector<std::pair<ResourceId, std::int64_t>> piles;
  std::optional<EventId> site;
  std::vector<AgentId> occupants;
  friend bool operator==(const CellView&, const CellView&) = default;
};

// What one agent sees: the clipped square of side 2*radius+1 around it with
// imperceivable piles and sites removed, plus its own inventory only.
struct ObservationWindow {
  AgentId observer = 0;
  GridPos center;
  int radius = 0;
  std::vector<CellView> cells;  // row-major, in-bounds only
  Inventory inventory;
  friend bool operator==(const ObservationWindow&, const ObservationWindow&) = default;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WorldState {
 public:
  WorldState() = default;
  WorldState(std::shared_ptr<const ContentRegistry> registry, int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }
  const ContentRegistry& registry() const { return *registry_; }
  std::shared_ptr<const ContentRegistry> registry_ptr() const { return registry_; }

  bool in_bounds(GridPos p) const { return p.row >= 0 && p.col >= 0 && p.row < height_ && p.col < width_; }
  std::size_t index(GridPos p) const { return static_cast<std::size_t>(p.row) * width_ + p.col; }
  GridPos position_of(std::size_t cell) const {
    return {static_cast<int>(cell / width_), static_cast<int>(cell % width_)};
  }
  std::size_t cell_count() const { return terrain_.size(); }

  Terrain terrain(GridPos p) const { return terrain_[index(p)]; }
  void set_terrain(GridPos p, Terrain t) { terrain_[index(p)] = t; }
  bool is_open(GridPos p) const { return in_bounds(p) && terrain(p) == Terrain::open; }

  std::int64_t pile(GridPos p, ResourceId r) const { return piles_[index(p) * n_res_ + static_cast<std::size_t>(r)]; }
  void set_pile(GridPos p, ResourceId r, std::int64_t n) { piles_[index(p) * n_res_ + static_cast<std::size_t>(r)] = n; }
  bool has_any_pile(GridPos p) const;

  std::optional<EventId> site(GridPos p) const {
    const int s = sites_[index(p)];
    return s < 0 ? std::nullopt : std::optional<EventId>(s);
  }
  void set_site(GridPos p, std::optional<EventId> e) { sites_[index(p)] = e ? *e : -1; }

  std::vector<AgentBody>& agents() { return agents_; }
  const std::vector<AgentBody>& agents() const { return agents_; }
  AgentBody& agent(AgentId id) { return agents_.at(static_cast<std::size_t>(id)); }
  const AgentBody& agent(AgentId id) const { return agents_.at(static_cast<std::size_t>(id)); }

  // Full contents of a cell without visibility filtering.
  CellView cell(GridPos p) const;

  // Units of resource r across piles and inventories.
  std::int64_t total_units(ResourceId r) const;

  std::uint64_t hash() const;

  friend bool operator==(const WorldState& a, const WorldState& b) {
    return a.height_ == b.height_ && a.width_ == b.width_ && a.terrain_ == b.terrain_ && a.piles_ == b.piles_ &&
           a.sites_ == b.sites_ && a.agents_ == b.agents_;
  }

 private:
  std::shared_ptr<const ContentRegistry> registry_;
  int height_ = 0;
  int width_ = 0;
  std::size_t n_res_ = 0;
  std::vector<Terrain> terrain_;
  std::vector<std::int64_t> piles_;  // cell * n_res + resource
  std::vector<int> sites_;           // -1 for none
  std::vector<AgentBody> agents_;
};

// Places blocks, event sites, piles and agents (in that order) on distinct
// cells drawn from `rng`; explicit positions are honored. Agents land on open
// cells without an event site. Throws GenerationError when cells run out.
WorldState generate_world(const ScenarioSpec& spec, Rng& rng);

bool can_perceive(const Inventory& inventory, std::span<const ResourceId> requirement);
bool can_perceive_resource(const ContentRegistry& reg, const Inventory& inventory, ResourceId r);
bool can_perceive_event(const ContentRegistry& reg, const Inventory& inventory, EventId e);

ObservationWindow observe(const WorldState& world, AgentId agent, int radius);

ActionOutcome apply_move(WorldState& world, AgentId agent, Direction dir);
ActionOutcome apply_pick(WorldState& world, AgentId agent, ResourceId r);
ActionOutcome apply_dump(WorldState& world, AgentId agent, ResourceId r);

struct SynthesisResult {
  ActionOutcome outcome = ActionOutcome::no_site;
  std::optional<EventId> event;            // the site's event, when on one
  std::optional<ResourceId> missing;       // first missing input
  bool ok() const { return outcome == ActionOutcome::ok; }
};
SynthesisResult apply_synthesize(WorldState& world, AgentId agent);

// Sum over resources of count * preference * objective reward.
Rational valuation(const ContentRegistry& reg, const AgentBody& agent);
inline Rational step_reward_delta(const ContentRegistry& reg, const AgentBody& before, const AgentBody& after) {
  return valuation(reg, after) - valuation(reg, before);
}

}  // namespace synthsoc
