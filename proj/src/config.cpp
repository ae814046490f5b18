#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "synthsoc/config.h"

namespace synthsoc {

using json = nlohmann::json;

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::social_structure: return "social_structure";
    case ScenarioKind::contract: return "contract";
    case ScenarioKind::negotiation: return "negotiation";
    case ScenarioKind::exploration: return "exploration";
  }
  return "exploration";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) {
  const auto n = normalize_name(text);
  if (n == "socialstructure") return ScenarioKind::social_structure;
  if (n == "contract") return ScenarioKind::contract;
  if (n == "negotiation") return ScenarioKind::negotiation;
  if (n == "exploration") return ScenarioKind::exploration;
  return std::nullopt;
}

namespace {

std::optional<int> parse_prefixed_index(std::string_view name, char prefix) {
  if (name.size() < 2 || name[0] != prefix) return std::nullopt;
  int v = 0;
  auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), v);
  if (ec != std::errc() || p != name.data() + name.size() || v < 0) return std::nullopt;
  if (std::to_string(v) != name.substr(1)) return std::nullopt;  // no leading zeros
  return v;
}

}  // namespace

std::string agent_name(AgentId id) { return "a" + std::to_string(id); }
std::optional<AgentId> parse_agent_name(std::string_view name) { return parse_prefixed_index(name, 'a'); }
std::string group_name(int index) { return "g" + std::to_string(index); }
std::optional<int> parse_group_name(std::string_view name) { return parse_prefixed_index(name, 'g'); }

int ScenarioSpec::agent_count() const {
  int n = 0;
  for (const auto& a : agents) n += a.count;
  return n;
}

int ScenarioSpec::group_count() const {
  switch (scenario.kind) {
    case ScenarioKind::contract:
    case ScenarioKind::exploration:
      return scenario.group_count > 0 ? scenario.group_count : agent_count();
    case ScenarioKind::negotiation:
      return agent_count();
    case ScenarioKind::social_structure: {
      std::size_t g = scenario.initial_graph.groups.size();
      for (const auto& s : scenario.schedule) g = std::max(g, s.graph.groups.size());
      return static_cast<int>(g);
    }
  }
  return 0;
}

namespace {

class Parser {
 public:
  std::vector<Violation> violations;

  void fail(const std::string& path, const std::string& msg) { violations.push_back({path, msg}); }

  std::optional<std::int64_t> integer(const json& j, const std::string& path, std::int64_t min_value) {
    if (!j.is_number_integer()) {
      fail(path, "expected an integer");
      return std::nullopt;
    }
    auto v = j.get<std::int64_t>();
    if (v < min_value) {
      fail(path, "must be >= " + std::to_string(min_value));
      return std::nullopt;
    }
    return v;
  }

  std::optional<Rational> rational(const json& j, const std::string& path) {
    try {
      if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
      if (j.is_number_float()) return Rational::from_double(j.get<double>());
      if (j.is_string()) return Rational::parse(j.get<std::string>());
    } catch (const std::exception& e) {
      fail(path, e.what());
      return std::nullopt;
    }
    fail(path, "expected a number or a fraction string such as \"20/3\"");
    return std::nullopt;
  }

  std::optional<GridPos> position(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
      fail(path, "expected [row, col]");
      return std::nullopt;
    }
    return GridPos{j[0].get<int>(), j[1].get<int>()};
  }

  // Integer count or explicit position list.
  Placement placement(const json& j, const std::string& path) {
    Placement p;
    if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (auto pos = position(j[i], path + "[" + std::to_string(i) + "]")) p.positions.push_back(*pos);
      }
      if (p.positions.empty()) p.count = 0;
    } else if (auto c = integer(j, path, 0)) {
      p.count = *c;
    }
    return p;
  }

  void unknown_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
        fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
      }
    }
  }

  std::vector<std::string> name_list(const json& j, const std::string& path) {
    std::vector<std::string> out;
    if (!j.is_array()) {
      fail(path, "expected a list of names");
      return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (j[i].is_string()) {
        out.push_back(j[i].get<std::string>());
      } else {
        fail(path + "[" + std::to_string(i) + "]", "expected a name");
      }
    }
    return out;
  }

  std::vector<ItemCount> item_counts(const json& j, const std::string& path) {
    std::vector<ItemCount> out;
    if (!j.is_object()) {
      fail(path, "expected an object of resource counts");
      return out;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (auto c = integer(it.value(), path + "." + it.key(), 1)) out.push_back({it.key(), *c});
    }
    return out;
  }

  GraphSpec graph(const json& j, const std::string& path) {
    GraphSpec g;
    if (!j.is_object()) {
      fail(path, "expected a graph object");
      return g;
    }
    unknown_keys(j, path, {"groups", "links"});
    if (j.contains("groups")) {
      const auto& gs = j["groups"];
      if (!gs.is_array()) fail(path + ".groups", "expected a list");
      for (std::size_t i = 0; gs.is_array() && i < gs.size(); ++i) {
        const std::string gp = path + ".groups[" + std::to_string(i) + "]";
        GroupSpec spec;
        if (!gs[i].is_object()) {
          fail(gp, "expected a group object");
          continue;
        }
        unknown_keys(gs[i], gp, {"members", "weights"});
        if (gs[i].contains("members")) spec.members = name_list(gs[i]["members"], gp + ".members");
        if (gs[i].contains("weights")) {
          const auto& w = gs[i]["weights"];
          if (!w.is_array()) fail(gp + ".weights", "expected a list of numbers");
          for (std::size_t k = 0; w.is_array() && k < w.size(); ++k) {
            if (w[k].is_number()) {
              spec.weights.push_back(w[k].get<double>());
            } else {
              fail(gp + ".weights[" + std::to_string(k) + "]", "expected a number");
            }
          }
        }
        g.groups.push_back(std::move(spec));
      }
    }
    if (j.contains("links")) {
      const auto& ls = j["links"];
      if (!ls.is_array()) fail(path + ".links", "expected a list");
      for (std::size_t i = 0; ls.is_array() && i < ls.size(); ++i) {
        const std::string lp = path + ".links[" + std::to_string(i) + "]";
        if (!ls[i].is_object() || !ls[i].contains("from") || !ls[i].contains("to") || !ls[i]["from"].is_string() ||
            !ls[i]["to"].is_string()) {
          fail(lp, "expected {\"from\": id, \"to\": id}");
          continue;
        }
        unknown_keys(ls[i], lp, {"from", "to", "share_observation"});
        LinkSpec link{ls[i]["from"].get<std::string>(), ls[i]["to"].get<std::string>(), true};
        if (ls[i].contains("share_observation")) {
          if (ls[i]["share_observation"].is_boolean()) {
            link.share_observation = ls[i]["share_observation"].get<bool>();
          } else {
            fail(lp + ".share_observation", "expected a boolean");
          }
        }
        g.links.push_back(std::move(link));
      }
    }
    return g;
  }
};

bool has_any(const json& j, std::initializer_list<const char*> keys) {
  for (auto k : keys)
    if (j.contains(k)) return true;
  return false;
}

void check_graph(Parser& p, const GraphSpec& g, const std::string& path, int agents) {
  auto known_agent = [&](const std::string& id) {
    auto a = parse_agent_name(id);
    return a && *a < agents;
  };
  for (std::size_t i = 0; i < g.groups.size(); ++i) {
    const auto& grp = g.groups[i];
    const std::string gp = path + ".groups[" + std::to_string(i) + "]";
    std::set<std::string> seen;
    for (const auto& m : grp.members) {
      if (!known_agent(m)) p.fail(gp + ".members", "unknown agent '" + m + "'");
      if (!seen.insert(m).second) p.fail(gp + ".members", "duplicate member '" + m + "'");
    }
    if (!grp.weights.empty()) {
      if (grp.weights.size() != grp.members.size()) {
        p.fail(gp + ".weights", "needs one weight per member");
      } else {
        double sum = 0;
        for (double w : grp.weights) {
          if (!(w >= 0) || !std::isfinite(w)) p.fail(gp + ".weights", "weights must be finite and nonnegative");
          sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9) p.fail(gp + ".weights", "weights must sum to 1");
      }
    }
  }
  for (std::size_t i = 0; i < g.links.size(); ++i) {
    const auto& l = g.links[i];
    const std::string lp = path + ".links[" + std::to_string(i) + "]";
    if (!known_agent(l.from)) p.fail(lp + ".from", "unknown agent '" + l.from + "'");
    if (!known_agent(l.to)) p.fail(lp + ".to", "unknown agent '" + l.to + "'");
    if (l.from == l.to) p.fail(lp, "self link");
  }
}

}  // namespace

ParseResult parse_and_validate(std::string_view document) {
  ParseResult result;
  Parser p;
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    result.violations.push_back({"", "syntax error at byte " + std::to_string(e.byte) + ": " + e.what()});
    return result;
  }
  if (!doc.is_object()) {
    result.violations.push_back({"", "document must be an object"});
    return result;
  }
  p.unknown_keys(doc, "", {"map", "terrain", "resources", "events", "agents", "scenario", "seed"});

  ScenarioSpec spec;
  const ContentRegistry& builtin = builtin_registry();

  // map
  if (!doc.contains("map") || !doc["map"].is_object()) {
    p.fail("map", "required object with height and width");
  } else {
    const auto& m = doc["map"];
    p.unknown_keys(m, "map", {"height", "width", "observation_radius"});
    if (m.contains("height")) {
      if (auto v = p.integer(m["height"], "map.height", 1)) spec.height = static_cast<int>(*v);
    } else {
      p.fail("map.height", "required");
    }
    if (m.contains("width")) {
      if (auto v = p.integer(m["width"], "map.width", 1)) spec.width = static_cast<int>(*v);
    } else {
      p.fail("map.width", "required");
    }
    if (m.contains("observation_radius")) {
      if (auto v = p.integer(m["observation_radius"], "map.observation_radius", 1))
        spec.observation_radius = static_cast<int>(*v);
    }
  }

  if (doc.contains("terrain")) {
    const auto& t = doc["terrain"];
    if (!t.is_object()) {
      p.fail("terrain", "expected an object");
    } else {
      p.unknown_keys(t, "terrain", {"blocks"});
      if (t.contains("blocks")) spec.terrain = p.placement(t["blocks"], "terrain.blocks");
    }
  }

  // resources: built-ins by name, custom kinds carry their definition inline.
  std::vector<ResourceKind> builtin_res;
  std::vector<ResourceKind> custom_res;
  std::vector<std::pair<std::string, Placement>> res_placements;
  if (doc.contains("resources")) {
    const auto& rs = doc["resources"];
    if (!rs.is_object()) p.fail("resources", "expected an object");
    for (auto it = rs.begin(); rs.is_object() && it != rs.end(); ++it) {
      const std::string path = "resources." + it.key();
      const json& entry = it.value();
      if (!entry.is_object()) {
        p.fail(path, "expected an object");
        continue;
      }
      p.unknown_keys(entry, path, {"piles", "amount", "requirement", "reward", "synthesized"});
      const bool defines = has_any(entry, {"requirement", "reward", "synthesized"});
      std::string name;
      if (auto id = builtin.find_resource(it.key())) {
        if (defines) p.fail(path, "redefines built-in resource");
        builtin_res.push_back(builtin.resource(*id));
        name = builtin.resource(*id).name;
      } else if (!defines) {
        p.fail(path, "unknown resource");
        continue;
      } else {
        ResourceKind kind;
        kind.name = it.key();
        if (entry.contains("requirement")) kind.requirement = p.name_list(entry["requirement"], path + ".requirement");
        if (entry.contains("reward")) {
          if (auto r = p.rational(entry["reward"], path + ".reward")) kind.objective_reward = *r;
        } else {
          p.fail(path + ".reward", "required for a custom resource");
        }
        if (entry.contains("synthesized")) {
          if (entry["synthesized"].is_boolean()) {
            kind.synthesized = entry["synthesized"].get<bool>();
          } else {
            p.fail(path + ".synthesized", "expected a boolean");
          }
        }
        custom_res.push_back(kind);
        name = kind.name;
      }
      Placement pl;
      if (entry.contains("piles")) pl = p.placement(entry["piles"], path + ".piles");
      if (entry.contains("amount")) {
        if (auto a = p.integer(entry["amount"], path + ".amount", 1)) pl.amount = *a;
      }
      res_placements.emplace_back(name, pl);
    }
  }
  std::sort(builtin_res.begin(), builtin_res.end(), [&](const ResourceKind& a, const ResourceKind& b) {
    return builtin.resource_id(a.name) < builtin.resource_id(b.name);
  });

  std::vector<EventKind> builtin_ev;
  std::vector<EventKind> custom_ev;
  std::vector<std::pair<std::string, Placement>> ev_placements;
  if (doc.contains("events")) {
    const auto& es = doc["events"];
    if (!es.is_object()) p.fail("events", "expected an object");
    for (auto it = es.begin(); es.is_object() && it != es.end(); ++it) {
      const std::string path = "events." + it.key();
      const json& entry = it.value();
      if (!entry.is_object()) {
        p.fail(path, "expected an object");
        continue;
      }
      p.unknown_keys(entry, path, {"sites", "inputs", "outputs", "requirement"});
      const bool defines = has_any(entry, {"inputs", "outputs", "requirement"});
      std::string name;
      if (auto id = builtin.find_event(it.key())) {
        if (defines) p.fail(path, "redefines built-in event");
        builtin_ev.push_back(builtin.event(*id));
        name = builtin.event(*id).name;
      } else if (!defines) {
        p.fail(path, "unknown event");
        continue;
      } else {
        EventKind kind;
        kind.name = it.key();
        if (entry.contains("inputs")) kind.inputs = p.item_counts(entry["inputs"], path + ".inputs");
        if (entry.contains("outputs")) kind.outputs = p.item_counts(entry["outputs"], path + ".outputs");
        if (entry.contains("requirement")) kind.requirement = p.name_list(entry["requirement"], path + ".requirement");
        custom_ev.push_back(kind);
        name = kind.name;
      }
      Placement pl;
      if (entry.contains("sites")) pl = p.placement(entry["sites"], path + ".sites");
      ev_placements.emplace_back(name, pl);
    }
  }
  std::sort(builtin_ev.begin(), builtin_ev.end(), [&](const EventKind& a, const EventKind& b) {
    return builtin.event_id(a.name) < builtin.event_id(b.name);
  });

  std::vector<ResourceKind> all_res = builtin_res;
  all_res.insert(all_res.end(), custom_res.begin(), custom_res.end());
  std::vector<EventKind> all_ev = builtin_ev;
  all_ev.insert(all_ev.end(), custom_ev.begin(), custom_ev.end());

  // Resolve names inside definitions against the scenario's own resource set.
  std::set<std::string> scenario_res;
  for (const auto& r : all_res) scenario_res.insert(normalize_name(r.name));
  auto canon = [&](std::string& n) {
    for (const auto& r : all_res)
      if (normalize_name(r.name) == normalize_name(n)) n = r.name;
  };
  for (auto& r : all_res) {
    for (auto& q : r.requirement) {
      if (!scenario_res.count(normalize_name(q))) p.fail("resources." + r.name + ".requirement", "unknown resource '" + q + "'");
      canon(q);
    }
  }
  for (auto& e : all_ev) {
    for (auto* list : {&e.inputs, &e.outputs}) {
      for (auto& ic : *list) {
        if (!scenario_res.count(normalize_name(ic.resource)))
          p.fail("events." + e.name, "unknown resource '" + ic.resource + "'");
        canon(ic.resource);
      }
    }
    for (auto& q : e.requirement) {
      if (!scenario_res.count(normalize_name(q))) p.fail("events." + e.name + ".requirement", "unknown resource '" + q + "'");
      canon(q);
    }
  }
  if (p.violations.empty()) {
    for (const auto& issue : validate_registry(all_res, all_ev)) p.fail("registry", issue);
  }
  if (p.violations.empty()) spec.registry = ContentRegistry(all_res, all_ev);
  for (auto& [name, pl] : res_placements)
    if (pl.cells() > 0 || pl.amount != 1) spec.resources_on_map[name] = pl;
  for (auto& [name, pl] : ev_placements)
    if (pl.cells() > 0) spec.event_sites[name] = pl;

  auto resolve = [&](const std::string& n) -> std::optional<std::string> {
    for (const auto& r : all_res)
      if (normalize_name(r.name) == normalize_name(n)) return r.name;
    return std::nullopt;
  };

  // agents
  if (!doc.contains("agents") || !doc["agents"].is_array() || doc["agents"].empty()) {
    p.fail("agents", "required non-empty list");
  } else {
    const auto& as = doc["agents"];
    for (std::size_t i = 0; i < as.size(); ++i) {
      const std::string path = "agents[" + std::to_string(i) + "]";
      const json& a = as[i];
      if (!a.is_object()) {
        p.fail(path, "expected an object");
        continue;
      }
      p.unknown_keys(a, path, {"role", "count", "capacity", "preference", "inventory", "position"});
      AgentSpec agent;
      if (a.contains("role") && a["role"].is_string()) {
        agent.role = a["role"].get<std::string>();
      } else {
        p.fail(path + ".role", "required name");
      }
      if (a.contains("count")) {
        if (auto c = p.integer(a["count"], path + ".count", 1)) agent.count = static_cast<int>(*c);
      }
      if (a.contains("capacity")) {
        const auto& cap = a["capacity"];
        if (!cap.is_object()) p.fail(path + ".capacity", "expected an object");
        for (auto it = cap.begin(); cap.is_object() && it != cap.end(); ++it) {
          const std::string cp = path + ".capacity." + it.key();
          auto name = resolve(it.key());
          if (!name) {
            p.fail(cp, "unknown resource");
            continue;
          }
          if (it.value().is_null() || (it.value().is_string() && it.value().get<std::string>() == "inf")) continue;
          if (auto c = p.integer(it.value(), cp, 0)) agent.capacity[*name] = *c;
        }
      }
      if (a.contains("preference")) {
        const auto& pref = a["preference"];
        if (!pref.is_object()) p.fail(path + ".preference", "expected an object");
        for (auto it = pref.begin(); pref.is_object() && it != pref.end(); ++it) {
          const std::string pp = path + ".preference." + it.key();
          auto name = resolve(it.key());
          if (!name) {
            p.fail(pp, "unknown resource");
            continue;
          }
          if (auto r = p.rational(it.value(), pp); r && *r != Rational(1)) agent.preference[*name] = *r;
        }
      }
      if (a.contains("inventory")) {
        const auto& inv = a["inventory"];
        if (!inv.is_object()) p.fail(path + ".inventory", "expected an object");
        for (auto it = inv.begin(); inv.is_object() && it != inv.end(); ++it) {
          const std::string ip = path + ".inventory." + it.key();
          auto name = resolve(it.key());
          if (!name) {
            p.fail(ip, "unknown resource");
            continue;
          }
          if (auto c = p.integer(it.value(), ip, 0); c && *c > 0) {
            auto capit = agent.capacity.find(*name);
            if (capit != agent.capacity.end() && *c > capit->second) {
              p.fail(ip, "initial inventory exceeds capacity");
            }
            agent.initial_inventory[*name] = *c;
          }
        }
      }
      if (a.contains("position")) {
        const auto& pos = a["position"];
        if (pos.is_string() && pos.get<std::string>() == "random") {
          agent.position.reset();
        } else if (auto gp = p.position(pos, path + ".position")) {
          agent.position = *gp;
        }
      }
      spec.agents.push_back(std::move(agent));
    }
  }
  const int n_agents = spec.agent_count();

  // scenario
  std::optional<std::int64_t> stated_length;
  if (!doc.contains("scenario") || !doc["scenario"].is_object()) {
    p.fail("scenario", "required object with a kind");
  } else {
    const auto& s = doc["scenario"];
    auto& sp = spec.scenario;
    std::optional<ScenarioKind> kind;
    if (s.contains("kind") && s["kind"].is_string()) kind = parse_scenario_kind(s["kind"].get<std::string>());
    if (!kind) {
      p.fail("scenario.kind", "expected one of social_structure, contract, negotiation, exploration");
    } else {
      sp.kind = *kind;
      if (s.contains("episode_length")) stated_length = p.integer(s["episode_length"], "scenario.episode_length", 1);
      auto need = [&](const char* key, std::int64_t min_value) -> std::optional<std::int64_t> {
        if (!s.contains(key)) {
          p.fail(std::string("scenario.") + key, "required for " + std::string(to_string(*kind)));
          return std::nullopt;
        }
        return p.integer(s[key], std::string("scenario.") + key, min_value);
      };
      switch (*kind) {
        case ScenarioKind::contract: {
          p.unknown_keys(s, "scenario", {"kind", "episode_length", "rounds", "physical_steps", "groups"});
          if (s.contains("rounds")) {
            if (auto v = p.integer(s["rounds"], "scenario.rounds", 1)) sp.rounds = static_cast<int>(*v);
          }
          if (auto v = need("physical_steps", 1)) sp.physical_steps = *v;
          if (s.contains("groups")) {
            if (auto v = p.integer(s["groups"], "scenario.groups", 1)) sp.group_count = static_cast<int>(*v);
          }
          spec.episode_length = static_cast<std::int64_t>(sp.rounds) * n_agents + sp.physical_steps;
          break;
        }
        case ScenarioKind::negotiation: {
          p.unknown_keys(s, "scenario", {"kind", "episode_length", "negotiation_steps", "physical_steps", "max_proposals"});
          if (auto v = need("negotiation_steps", 1)) sp.negotiation_steps = *v;
          if (auto v = need("physical_steps", 1)) sp.physical_steps = *v;
          if (s.contains("max_proposals")) {
            if (auto v = p.integer(s["max_proposals"], "scenario.max_proposals", 1)) sp.max_proposals = static_cast<int>(*v);
          }
          spec.episode_length = sp.negotiation_steps + sp.physical_steps;
          break;
        }
        case ScenarioKind::social_structure: {
          p.unknown_keys(s, "scenario", {"kind", "episode_length", "graph", "schedule"});
          if (!stated_length) p.fail("scenario.episode_length", "required for social_structure");
          if (s.contains("graph")) sp.initial_graph = p.graph(s["graph"], "scenario.graph");
          if (s.contains("schedule")) {
            const auto& sch = s["schedule"];
            if (!sch.is_array()) p.fail("scenario.schedule", "expected a list");
            for (std::size_t i = 0; sch.is_array() && i < sch.size(); ++i) {
              const std::string path = "scenario.schedule[" + std::to_string(i) + "]";
              if (!sch[i].is_object() || !sch[i].contains("step")) {
                p.fail(path, "expected {\"step\": t, \"graph\": {...}}");
                continue;
              }
              p.unknown_keys(sch[i], path, {"step", "graph"});
              ScheduleEntry entry;
              if (auto v = p.integer(sch[i]["step"], path + ".step", 1)) entry.step = *v;
              if (sch[i].contains("graph")) entry.graph = p.graph(sch[i]["graph"], path + ".graph");
              sp.schedule.push_back(std::move(entry));
            }
          }
          break;
        }
        case ScenarioKind::exploration: {
          p.unknown_keys(s, "scenario", {"kind", "episode_length", "groups"});
          if (!stated_length) p.fail("scenario.episode_length", "required for exploration");
          if (s.contains("groups")) {
            if (auto v = p.integer(s["groups"], "scenario.groups", 1)) sp.group_count = static_cast<int>(*v);
          }
          break;
        }
      }
      if (stated_length) {
        if (*kind == ScenarioKind::contract || *kind == ScenarioKind::negotiation) {
          if (*stated_length != spec.episode_length) {
            p.fail("scenario.episode_length", "does not match the stage lengths (" + std::to_string(spec.episode_length) + ")");
          }
        } else {
          spec.episode_length = *stated_length;
        }
      }
      if (sp.kind == ScenarioKind::social_structure) {
        check_graph(p, sp.initial_graph, "scenario.graph", n_agents);
        std::int64_t prev = 0;
        for (std::size_t i = 0; i < sp.schedule.size(); ++i) {
          const std::string path = "scenario.schedule[" + std::to_string(i) + "]";
          if (sp.schedule[i].step <= prev) p.fail(path + ".step", "switch steps must be strictly increasing");
          if (sp.schedule[i].step >= spec.episode_length && spec.episode_length > 0)
            p.fail(path + ".step", "switch step must be < episode_length");
          prev = sp.schedule[i].step;
          check_graph(p, sp.schedule[i].graph, path + ".graph", n_agents);
        }
      }
    }
  }

  if (doc.contains("seed")) {
    if (doc["seed"].is_number_unsigned()) {
      spec.seed = doc["seed"].get<std::uint64_t>();
    } else if (!doc["seed"].is_null()) {
      p.fail("seed", "expected a nonnegative integer");
    }
  }

  // Placement feasibility.
  if (spec.height > 0 && spec.width > 0) {
    const std::int64_t cells = static_cast<std::int64_t>(spec.height) * spec.width;
    std::set<GridPos> blocks;
    auto in_bounds = [&](GridPos g) { return g.row >= 0 && g.col >= 0 && g.row < spec.height && g.col < spec.width; };
    for (std::size_t i = 0; i < spec.terrain.positions.size(); ++i) {
      const auto& g = spec.terrain.positions[i];
      const std::string path = "terrain.blocks[" + std::to_string(i) + "]";
      if (!in_bounds(g)) p.fail(path, "position out of bounds");
      if (!blocks.insert(g).second) p.fail(path, "duplicate position");
    }
    const std::int64_t n_blocks = spec.terrain.cells();
    if (n_blocks > cells) p.fail("terrain.blocks", "placement exceeds cells (" + std::to_string(n_blocks) + " > " + std::to_string(cells) + ")");

    auto check_layer = [&](const std::map<std::string, Placement>& layer, const std::string& prefix, const char* field) {
      std::set<GridPos> used;
      std::int64_t total = n_blocks;
      for (const auto& [name, pl] : layer) {
        total += pl.cells();
        for (std::size_t i = 0; i < pl.positions.size(); ++i) {
          const auto& g = pl.positions[i];
          const std::string path = prefix + "." + name + "." + field + "[" + std::to_string(i) + "]";
          if (!in_bounds(g)) p.fail(path, "position out of bounds");
          if (blocks.count(g)) p.fail(path, "position is a block");
          if (!used.insert(g).second) p.fail(path, "cell already used in this layer");
        }
      }
      if (total > cells) {
        p.fail(prefix, "placement exceeds cells (" + std::to_string(total) + " > " + std::to_string(cells) + ")");
      }
      return total - n_blocks;
    };
    check_layer(spec.resources_on_map, "resources", "piles");
    const std::int64_t n_sites = check_layer(spec.event_sites, "events", "sites");
    if (!spec.agents.empty() && cells - n_blocks - n_sites < 1) {
      p.fail("agents", "no open cell without an event site is left for agents");
    }
    for (std::size_t i = 0; i < spec.agents.size(); ++i) {
      if (spec.agents[i].position) {
        const auto& g = *spec.agents[i].position;
        if (!in_bounds(g)) p.fail("agents[" + std::to_string(i) + "].position", "position out of bounds");
        if (blocks.count(g)) p.fail("agents[" + std::to_string(i) + "].position", "position is a block");
      }
    }
  }

  result.violations = std::move(p.violations);
  if (result.violations.empty()) result.spec = std::move(spec);
  return result;
}

namespace {

json position_json(GridPos g) { return json::array({g.row, g.col}); }

json placement_json(const Placement& pl) {
  if (pl.explicit_positions()) {
    json arr = json::array();
    for (const auto& g : pl.positions) arr.push_back(position_json(g));
    return arr;
  }
  return pl.count;
}

json rational_json(const Rational& r) {
  if (r.is_integer()) return r.num();
  return r.to_string();
}

json graph_json(const GraphSpec& g) {
  json out = json::object();
  json groups = json::array();
  for (const auto& grp : g.groups) {
    json e = {{"members", grp.members}};
    if (!grp.weights.empty()) e["weights"] = grp.weights;
    groups.push_back(e);
  }
  json links = json::array();
  for (const auto& l : g.links) links.push_back({{"from", l.from}, {"to", l.to}, {"share_observation", l.share_observation}});
  out["groups"] = groups;
  out["links"] = links;
  return out;
}

}  // namespace

std::string serialize_scenario(const ScenarioSpec& spec) {
  const ContentRegistry& builtin = builtin_registry();
  json doc;
  doc["map"] = {{"height", spec.height}, {"width", spec.width}, {"observation_radius", spec.observation_radius}};
  doc["terrain"] = {{"blocks", placement_json(spec.terrain)}};

  json resources = json::object();
  for (const auto& r : spec.registry.resources()) {
    json e = json::object();
    auto bid = builtin.find_resource(r.name);
    if (!bid || builtin.resource(*bid) != r) {
      e["requirement"] = r.requirement;
      e["reward"] = rational_json(r.objective_reward);
      e["synthesized"] = r.synthesized;
    }
    if (auto it = spec.resources_on_map.find(r.name); it != spec.resources_on_map.end()) {
      e["piles"] = placement_json(it->second);
      e["amount"] = it->second.amount;
    }
    resources[r.name] = e;
  }
  doc["resources"] = resources;

  json events = json::object();
  for (const auto& ev : spec.registry.events()) {
    json e = json::object();
    auto bid = builtin.find_event(ev.name);
    if (!bid || builtin.event(*bid) != ev) {
      json in = json::object(), out = json::object();
      for (const auto& ic : ev.inputs) in[ic.resource] = ic.count;
      for (const auto& ic : ev.outputs) out[ic.resource] = ic.count;
      e["inputs"] = in;
      e["outputs"] = out;
      e["requirement"] = ev.requirement;
    }
    if (auto it = spec.event_sites.find(ev.name); it != spec.event_sites.end()) e["sites"] = placement_json(it->second);
    events[ev.name] = e;
  }
  doc["events"] = events;

  json agents = json::array();
  for (const auto& a : spec.agents) {
    json e = {{"role", a.role}, {"count", a.count}};
    json cap = json::object(), pref = json::object(), inv = json::object();
    for (const auto& [k, v] : a.capacity) cap[k] = v;
    for (const auto& [k, v] : a.preference) pref[k] = rational_json(v);
    for (const auto& [k, v] : a.initial_inventory) inv[k] = v;
    e["capacity"] = cap;
    e["preference"] = pref;
    e["inventory"] = inv;
    e["position"] = a.position ? position_json(*a.position) : json("random");
    agents.push_back(e);
  }
  doc["agents"] = agents;

  const auto& sp = spec.scenario;
  json sc = {{"kind", std::string(to_string(sp.kind))}, {"episode_length", spec.episode_length}};
  switch (sp.kind) {
    case ScenarioKind::contract:
      sc["rounds"] = sp.rounds;
      sc["physical_steps"] = sp.physical_steps;
      if (sp.group_count > 0) sc["groups"] = sp.group_count;
      break;
    case ScenarioKind::negotiation:
      sc["negotiation_steps"] = sp.negotiation_steps;
      sc["physical_steps"] = sp.physical_steps;
      sc["max_proposals"] = sp.max_proposals;
      break;
    case ScenarioKind::social_structure: {
      sc["graph"] = graph_json(sp.initial_graph);
      json sch = json::array();
      for (const auto& s : sp.schedule) sch.push_back({{"step", s.step}, {"graph", graph_json(s.graph)}});
      sc["schedule"] = sch;
      break;
    }
    case ScenarioKind::exploration:
      if (sp.group_count > 0) sc["groups"] = sp.group_count;
      break;
  }
  doc["scenario"] = sc;
  if (spec.seed) doc["seed"] = *spec.seed;
  return doc.dump(2);
}

}  // namespace synthsoc
