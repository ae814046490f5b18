#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "synthsoc/config.h"
#include "synthsoc/engine.h"

namespace synthsoc::testing {

using json = nlohmann::json;

inline ScenarioSpec spec_from(const json& doc) {
  auto parsed = parse_and_validate(doc.dump());
  if (!parsed.ok()) {
    std::string msg = "test scenario rejected:";
    for (const auto& v : parsed.violations) msg += " " + v.to_string() + ";";
    throw std::runtime_error(msg);
  }
  return *parsed.spec;
}

inline json preset_json(const std::string& name) { return json::parse(preset_document(name)); }

// A bare 7x7 Easy-registry map with no piles, sites or blocks and the given
// agents; scenario defaults to a social_structure episode of `steps` steps.
inline json blank_doc(json agents, std::int64_t steps = 20) {
  return {{"map", {{"height", 7}, {"width", 7}, {"observation_radius", 3}}},
          {"terrain", {{"blocks", 0}}},
          {"resources", {{"wood", json::object()}, {"stone", json::object()}, {"hammer", json::object()}}},
          {"events", {{"HammerCraft", {{"sites", 0}}}}},
          {"agents", std::move(agents)},
          {"scenario", {{"kind", "social_structure"}, {"episode_length", steps}}}};
}

inline json agent_at(const std::string& role, int row, int col, json extra = json::object()) {
  json a = {{"role", role}, {"count", 1}, {"position", {row, col}}};
  for (auto& [k, v] : extra.items()) a[k] = v;
  return a;
}

inline std::vector<Action> noops(int n) { return std::vector<Action>(static_cast<std::size_t>(n), Action::noop()); }

inline bool contains(const std::vector<std::string>& v, const std::string& s) {
  for (const auto& x : v)
    if (x == s) return true;
  return false;
}

}  // namespace synthsoc::testing
