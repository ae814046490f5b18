#include <algorithm>
#include <cctype>
#include <queue>
#include <set>
#include <stdexcept>

#include "synthsoc/config.h"

namespace synthsoc {

std::string normalize_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if (c == '_' || c == '-' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

ContentRegistry::ContentRegistry(std::vector<ResourceKind> resources, std::vector<EventKind> events)
    : resources_(std::move(resources)), events_(std::move(events)) {
  for (std::size_t i = 0; i < resources_.size(); ++i) {
    if (!resource_index_.emplace(normalize_name(resources_[i].name), static_cast<ResourceId>(i)).second) {
      throw std::invalid_argument("duplicate resource '" + resources_[i].name + "'");
    }
  }
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (!event_index_.emplace(normalize_name(events_[i].name), static_cast<EventId>(i)).second) {
      throw std::invalid_argument("duplicate event '" + events_[i].name + "'");
    }
  }
  resource_requirements_.resize(resources_.size());
  for (std::size_t i = 0; i < resources_.size(); ++i) {
    for (const auto& r : resources_[i].requirement) resource_requirements_[i].push_back(resource_id(r));
  }
  producers_.assign(resources_.size(), std::nullopt);
  resolved_events_.resize(events_.size());
  for (std::size_t e = 0; e < events_.size(); ++e) {
    auto& out = resolved_events_[e];
    for (const auto& in : events_[e].inputs) out.inputs.emplace_back(resource_id(in.resource), in.count);
    for (const auto& o : events_[e].outputs) {
      ResourceId rid = resource_id(o.resource);
      out.outputs.emplace_back(rid, o.count);
      producers_[static_cast<std::size_t>(rid)] = static_cast<EventId>(e);
    }
    for (const auto& r : events_[e].requirement) out.requirement.push_back(resource_id(r));
  }
}

std::optional<ResourceId> ContentRegistry::find_resource(std::string_view name) const {
  auto it = resource_index_.find(normalize_name(name));
  if (it == resource_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EventId> ContentRegistry::find_event(std::string_view name) const {
  auto it = event_index_.find(normalize_name(name));
  if (it == event_index_.end()) return std::nullopt;
  return it->second;
}

ResourceId ContentRegistry::resource_id(std::string_view name) const {
  if (auto id = find_resource(name)) return *id;
  throw std::out_of_range("unknown resource '" + std::string(name) + "'");
}

EventId ContentRegistry::event_id(std::string_view name) const {
  if (auto id = find_event(name)) return *id;
  throw std::out_of_range("unknown event '" + std::string(name) + "'");
}

std::optional<EventId> ContentRegistry::producer(ResourceId id) const {
  return producers_.at(static_cast<std::size_t>(id));
}

const ContentRegistry& builtin_registry() {
  static const ContentRegistry registry = [] {
    auto res = [](std::string name, bool synthesized, std::int64_t reward, std::vector<std::string> req = {}) {
      return ResourceKind{std::move(name), std::move(req), Rational(reward), synthesized};
    };
    std::vector<ResourceKind> resources = {
        res("wood", false, 1),          res("stone", false, 1),      res("hammer", true, 5),
        res("coal", false, 2, {"hammer"}), res("torch", true, 20),   res("iron", false, 3, {"torch"}),
        res("steel", true, 30),         res("shovel", true, 100),    res("pickaxe", true, 150),
        res("gem_mine", false, 4, {"pickaxe"}), res("clay", false, 4, {"shovel"}), res("pottery", true, 40),
        res("cutter", true, 100),       res("gem", true, 200),       res("totem", true, 1000),
    };
    auto ev = [](std::string name, std::vector<ItemCount> in, ItemCount out, std::vector<std::string> req = {}) {
      return EventKind{std::move(name), std::move(in), {std::move(out)}, std::move(req)};
    };
    std::vector<EventKind> events = {
        ev("HammerCraft", {{"wood", 1}, {"stone", 1}}, {"hammer", 1}),
        ev("TorchCraft", {{"wood", 1}, {"coal", 1}}, {"torch", 1}, {"coal"}),
        ev("SteelMaking", {{"iron", 1}, {"coal", 1}}, {"steel", 1}, {"iron"}),
        ev("Potting", {{"clay", 2}, {"coal", 1}}, {"pottery", 1}, {"clay"}),
        ev("ShovelCraft", {{"steel", 2}, {"wood", 2}}, {"shovel", 1}, {"steel"}),
        ev("PickaxeCraft", {{"steel", 3}, {"wood", 2}}, {"pickaxe", 1}, {"steel"}),
        ev("CutterCraft", {{"steel", 2}, {"stone", 3}}, {"cutter", 1}, {"steel"}),
        ev("GemCutting", {{"gem_mine", 1}}, {"gem", 1}, {"cutter", "gem_mine"}),
        ev("TotemMaking", {{"gem", 2}, {"pottery", 1}, {"steel", 1}}, {"totem", 1}, {"gem"}),
    };
    return ContentRegistry(std::move(resources), std::move(events));
  }();
  return registry;
}

std::vector<std::string> validate_registry(const std::vector<ResourceKind>& resources,
                                           const std::vector<EventKind>& events) {
  std::vector<std::string> issues;
  std::map<std::string, std::size_t> rindex;
  std::set<std::string> enames;
  for (std::size_t i = 0; i < resources.size(); ++i) {
    const auto key = normalize_name(resources[i].name);
    if (key.empty()) issues.push_back("resource with empty name");
    if (!rindex.emplace(key, i).second) issues.push_back("duplicate resource '" + resources[i].name + "'");
  }
  for (const auto& e : events) {
    const auto key = normalize_name(e.name);
    if (key.empty()) issues.push_back("event with empty name");
    if (!enames.insert(key).second) issues.push_back("duplicate event '" + e.name + "'");
  }
  auto known = [&](const std::string& n) { return rindex.count(normalize_name(n)) > 0; };

  for (const auto& r : resources) {
    for (const auto& q : r.requirement) {
      if (!known(q)) issues.push_back("resource '" + r.name + "' requirement '" + q + "': unknown resource");
    }
  }
  std::vector<int> producers(resources.size(), 0);
  for (const auto& e : events) {
    if (e.inputs.empty()) issues.push_back("event '" + e.name + "' has no inputs");
    if (e.outputs.size() != 1) issues.push_back("event '" + e.name + "' must produce exactly one resource kind");
    for (const auto& in : e.inputs) {
      if (!known(in.resource)) issues.push_back("event '" + e.name + "' input '" + in.resource + "': unknown resource");
      if (in.count < 1) issues.push_back("event '" + e.name + "' input '" + in.resource + "' count must be >= 1");
    }
    for (const auto& out : e.outputs) {
      if (!known(out.resource)) {
        issues.push_back("event '" + e.name + "' output '" + out.resource + "': unknown resource");
        continue;
      }
      if (out.count < 1) issues.push_back("event '" + e.name + "' output '" + out.resource + "' count must be >= 1");
      std::size_t rid = rindex[normalize_name(out.resource)];
      ++producers[rid];
      if (!resources[rid].synthesized) {
        issues.push_back("event '" + e.name + "' outputs natural resource '" + out.resource + "'");
      }
    }
    for (const auto& q : e.requirement) {
      if (!known(q)) issues.push_back("event '" + e.name + "' requirement '" + q + "': unknown resource");
    }
  }
  for (std::size_t i = 0; i < resources.size(); ++i) {
    if (resources[i].synthesized && producers[i] != 1) {
      issues.push_back("synthesized resource '" + resources[i].name + "' needs exactly one producing event, found " +
                       std::to_string(producers[i]));
    }
  }
  if (!issues.empty()) return issues;

  // Kahn's algorithm over resources: inputs and requirements point at what they unlock.
  const std::size_t n = resources.size();
  std::vector<std::set<std::size_t>> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& q : resources[i].requirement) next[rindex[normalize_name(q)]].insert(i);
  }
  for (const auto& e : events) {
    for (const auto& out : e.outputs) {
      std::size_t o = rindex[normalize_name(out.resource)];
      for (const auto& in : e.inputs) next[rindex[normalize_name(in.resource)]].insert(o);
      for (const auto& q : e.requirement) next[rindex[normalize_name(q)]].insert(o);
    }
  }
  std::vector<int> indeg(n, 0);
  for (const auto& s : next)
    for (auto j : s) ++indeg[j];
  std::queue<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(i);
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto i = ready.front();
    ready.pop();
    ++visited;
    for (auto j : next[i])
      if (--indeg[j] == 0) ready.push(j);
  }
  if (visited != n) issues.push_back("synthesis dependencies contain a cycle");
  return issues;
}

}  // namespace synthsoc
