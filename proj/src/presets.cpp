#include <stdexcept>

#include "json.hpp"
#include "synthsoc/config.h"

namespace synthsoc {

namespace {

using json = nlohmann::json;

// Natural-resource pile counts are not fixed by the task tables; each preset
// stocks enough units for every event site to run at least once.
constexpr const char* kEasyDocument = R"({
  "map": {"height": 7, "width": 7, "observation_radius": 3},
  "terrain": {"blocks": 0},
  "resources": {
    "wood": {"piles": 14, "amount": 3},
    "stone": {"piles": 14, "amount": 3},
    "hammer": {}
  },
  "events": {"HammerCraft": {"sites": 41}},
  "agents": [
    {"role": "carpenter", "count": 2, "capacity": {"hammer": 1}},
    {"role": "miner", "count": 2, "capacity": {"wood": 0, "stone": 0}, "preference": {"hammer": 2}}
  ]
})";

constexpr const char* kHardDocument = R"({
  "map": {"height": 15, "width": 15, "observation_radius": 3},
  "terrain": {"blocks": 0},
  "resources": {
    "wood": {"piles": 50, "amount": 4},
    "stone": {"piles": 25, "amount": 4},
    "hammer": {},
    "coal": {"piles": 25, "amount": 4},
    "torch": {},
    "iron": {"piles": 20, "amount": 2}
  },
  "events": {"HammerCraft": {"sites": 98}, "TorchCraft": {"sites": 98}},
  "agents": [
    {"role": "carpenter", "count": 2, "capacity": {"hammer": 1, "coal": 0},
     "preference": {"coal": 5, "torch": "3/2", "iron": "20/3"}},
    {"role": "miner", "count": 2, "capacity": {"stone": 0, "torch": 1, "iron": 0},
     "preference": {"coal": 5, "torch": "3/2", "iron": "20/3"}}
  ]
})";

constexpr const char* kExplorationDocument = R"({
  "map": {"height": 20, "width": 20, "observation_radius": 3},
  "terrain": {"blocks": 25},
  "resources": {
    "wood": {"piles": 40, "amount": 4},
    "stone": {"piles": 25, "amount": 4},
    "hammer": {},
    "coal": {"piles": 25, "amount": 4},
    "torch": {},
    "iron": {"piles": 15, "amount": 2},
    "steel": {},
    "shovel": {},
    "pickaxe": {},
    "gem_mine": {"piles": 10, "amount": 1},
    "clay": {"piles": 15, "amount": 4},
    "pottery": {},
    "cutter": {},
    "gem": {},
    "totem": {}
  },
  "events": {
    "HammerCraft": {"sites": 40}, "TorchCraft": {"sites": 40}, "SteelMaking": {"sites": 30},
    "Potting": {"sites": 30}, "ShovelCraft": {"sites": 20}, "PickaxeCraft": {"sites": 20},
    "CutterCraft": {"sites": 20}, "GemCutting": {"sites": 10}, "TotemMaking": {"sites": 10}
  },
  "agents": [{"role": "explorer", "count": 4}],
  "scenario": {"kind": "exploration", "episode_length": 200}
})";

json contract_block() { return {{"kind", "contract"}, {"rounds", 1}, {"physical_steps", 100}}; }

json negotiation_block() {
  return {{"kind", "negotiation"}, {"negotiation_steps", 20}, {"physical_steps", 100}, {"max_proposals", 6}};
}

// Four agents: a0, a1 carpenters; a2, a3 miners.
json structure_graph(std::string_view category) {
  if (category == "isolation") return json::object();
  if (category == "connection") {
    return {{"links", json::array({{{"from", "a0"}, {"to", "a2"}}, {{"from", "a2"}, {"to", "a0"}},
                                   {{"from", "a1"}, {"to", "a3"}}, {{"from", "a3"}, {"to", "a1"}}})}};
  }
  if (category == "independent") {
    return {{"groups", json::array({{{"members", {"a0", "a2"}}}, {{"members", {"a1", "a3"}}}})}};
  }
  if (category == "overlapping") {
    return {{"groups", json::array({{{"members", {"a0", "a1", "a2"}}}, {{"members", {"a1", "a2", "a3"}}}})}};
  }
  if (category == "inequality") {
    return {{"groups", json::array({{{"members", {"a0", "a1", "a2", "a3"}}, {"weights", {0.4, 0.3, 0.2, 0.1}}}})}};
  }
  throw std::invalid_argument("unknown structure category '" + std::string(category) + "'");
}

json structure_block(std::string_view category) {
  json block = {{"kind", "social_structure"}, {"episode_length", 100}};
  if (category == "dynamic") {
    block["graph"] = structure_graph("inequality");
    block["schedule"] = json::array({{{"step", 30}, {"graph", structure_graph("independent")}},
                                     {{"step", 60}, {"graph", structure_graph("overlapping")}}});
  } else {
    block["graph"] = structure_graph(category);
    block["schedule"] = json::array();
  }
  return block;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names = {"easy", "hard", "exploration"};
  for (const char* task : {"easy", "hard"}) {
    for (const char* sc : {"contract", "negotiation", "dynamic", "isolation", "connection", "independent",
                           "overlapping", "inequality"}) {
      names.push_back(std::string(task) + ":" + sc);
    }
  }
  return names;
}

std::string preset_document(std::string_view name) {
  if (name == "exploration") return json::parse(kExplorationDocument).dump(2);
  std::string_view task = name;
  std::string_view scenario = "contract";
  if (auto colon = name.find(':'); colon != std::string_view::npos) {
    task = name.substr(0, colon);
    scenario = name.substr(colon + 1);
  }
  json doc;
  if (task == "easy") {
    doc = json::parse(kEasyDocument);
  } else if (task == "hard") {
    doc = json::parse(kHardDocument);
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  if (scenario == "contract") {
    doc["scenario"] = contract_block();
  } else if (scenario == "negotiation") {
    doc["scenario"] = negotiation_block();
  } else if (scenario == "dynamic" || scenario == "isolation" || scenario == "connection" ||
             scenario == "independent" || scenario == "overlapping" || scenario == "inequality") {
    doc["scenario"] = structure_block(scenario);
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  return doc.dump(2);
}

ScenarioSpec preset(std::string_view name) {
  auto parsed = parse_and_validate(preset_document(name));
  if (!parsed.ok()) {
    std::string msg = "preset '" + std::string(name) + "' is invalid:";
    for (const auto& v : parsed.violations) msg += " " + v.to_string() + ";";
    throw std::logic_error(msg);
  }
  return std::move(*parsed.spec);
}

}  // namespace synthsoc
