#include "synthsoc/harness/serialize.h"

#include <charconv>
#include <stdexcept>

#include "synthsoc/hash.h"

namespace synthsoc {

namespace {

json pos_json(GridPos p) { return json::array({p.row, p.col}); }
GridPos pos_from(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

AgentId agent_from(const json& j) {
  auto a = parse_agent_name(j.get<std::string>());
  if (!a) throw std::invalid_argument("bad agent id " + j.dump());
  return *a;
}

json cell_json(const CellView& c, const ContentRegistry& reg) {
  json j = {{"pos", pos_json(c.pos)}};
  if (c.terrain == Terrain::block) j["block"] = true;
  if (!c.piles.empty()) {
    json piles = json::object();
    for (const auto& [r, n] : c.piles) piles[reg.resource(r).name] = n;
    j["piles"] = piles;
  }
  if (c.site) j["site"] = reg.event(*c.site).name;
  if (!c.occupants.empty()) {
    json occ = json::array();
    for (auto a : c.occupants) occ.push_back(agent_name(a));
    j["occupants"] = occ;
  }
  return j;
}

CellView cell_from(const json& j, const ContentRegistry& reg) {
  CellView c;
  c.pos = pos_from(j.at("pos"));
  if (j.value("block", false)) c.terrain = Terrain::block;
  if (j.contains("piles")) {
    // Registry order, not the alphabetical order of JSON keys.
    for (ResourceId r = 0; r < reg.resource_count(); ++r) {
      auto it = j["piles"].find(reg.resource(r).name);
      if (it != j["piles"].end()) c.piles.emplace_back(r, it->get<std::int64_t>());
    }
  }
  if (j.contains("site")) c.site = reg.event_id(j["site"].get<std::string>());
  if (j.contains("occupants"))
    for (const auto& a : j["occupants"]) c.occupants.push_back(agent_from(a));
  return c;
}

json cells_json(const std::vector<CellView>& cells, const ContentRegistry& reg) {
  json out = json::array();
  for (const auto& c : cells) out.push_back(cell_json(c, reg));
  return out;
}

std::vector<CellView> cells_from(const json& j, const ContentRegistry& reg) {
  std::vector<CellView> out;
  for (const auto& c : j) out.push_back(cell_from(c, reg));
  return out;
}

json inventory_json(const Inventory& inv, const ContentRegistry& reg) {
  json contents = json::object(), capacity = json::object();
  for (ResourceId r = 0; r < reg.resource_count(); ++r) {
    if (inv.count(r) != 0) contents[reg.resource(r).name] = inv.count(r);
    const auto cap = inv.capacity[static_cast<std::size_t>(r)];
    if (cap != kUnbounded) capacity[reg.resource(r).name] = cap;
  }
  return {{"contents", contents}, {"capacity", capacity}};
}

Inventory inventory_from(const json& j, const ContentRegistry& reg) {
  Inventory inv;
  inv.contents.assign(static_cast<std::size_t>(reg.resource_count()), 0);
  inv.capacity.assign(static_cast<std::size_t>(reg.resource_count()), kUnbounded);
  for (const auto& [name, n] : j.at("contents").items()) inv.contents[static_cast<std::size_t>(reg.resource_id(name))] = n.get<std::int64_t>();
  for (const auto& [name, n] : j.at("capacity").items()) inv.capacity[static_cast<std::size_t>(reg.resource_id(name))] = n.get<std::int64_t>();
  return inv;
}

json opt_double(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json degree_json(const DegreeStats& d) {
  return {{"average_in", d.average_in}, {"average_out", d.average_out}, {"max_in", d.max_in},
          {"max_out", d.max_out}, {"asymmetric", d.asymmetric}};
}

}  // namespace

std::uint64_t parse_hex64(const std::string& text) {
  std::uint64_t v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v, 16);
  if (text.size() != 16 || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad hash '" + text + "'");
  }
  return v;
}

json graph_to_json(const SocialGraph& g) {
  json layers = json::array();
  for (int l = 0; l < g.layer_count(); ++l) layers.push_back(g.node_count(l));
  json weighted = json::array();
  for (int k = 0; k < g.group_count(); ++k)
    if (g.weighted(k)) weighted.push_back(group_name(k));
  json edges = json::array();
  for (const auto& [key, attrs] : g.edges()) {
    json e = {{"from", node_name(key.first)}, {"to", node_name(key.second)}};
    if (attrs.share_observation) e["share_observation"] = true;
    if (attrs.reward_weight != 0.0) e["reward_weight"] = attrs.reward_weight;
    edges.push_back(e);
  }
  return {{"layers", layers}, {"weighted", weighted}, {"edges", edges}};
}

SocialGraph graph_from_json(const json& j) {
  SocialGraph g;
  for (const auto& n : j.at("layers")) g.add_layer(n.get<int>());
  for (const auto& w : j.at("weighted")) {
    auto k = parse_group_name(w.get<std::string>());
    if (!k) throw std::invalid_argument("bad group id " + w.dump());
    g.set_weighted(*k, true);
  }
  for (const auto& e : j.at("edges")) {
    auto from = parse_node_name(e.at("from").get<std::string>());
    auto to = parse_node_name(e.at("to").get<std::string>());
    if (!from || !to) throw std::invalid_argument("bad edge " + e.dump());
    g.add_edge(*from, *to, EdgeAttrs{e.value("share_observation", false), e.value("reward_weight", 0.0)});
  }
  return g;
}

json observation_to_json(const Observation& o, const ContentRegistry& reg) {
  json shared = json::array();
  for (const auto& s : o.shared) {
    shared.push_back({{"source", agent_name(s.source)},
                      {"center", pos_json(s.center)},
                      {"radius", s.radius},
                      {"cells", cells_json(s.cells, reg)}});
  }
  json inbox = json::array();
  for (const auto& m : o.inbox) inbox.push_back({{"from", agent_name(m.from)}, {"payload", m.payload}});
  json scenario = {{"phase", std::string(to_string(o.scenario.phase))}};
  if (o.scenario.selector) scenario["selector"] = agent_name(*o.scenario.selector);
  if (o.scenario.session) {
    const auto& s = *o.scenario.session;
    scenario["session"] = {{"partner", agent_name(s.partner)},
                           {"turn", agent_name(s.turn)},
                           {"my_share", opt_double(s.my_share)},
                           {"proposals", s.proposals}};
  }
  return {{"agent", agent_name(o.agent)},
          {"step", o.step},
          {"window",
           {{"center", pos_json(o.own.center)}, {"radius", o.own.radius}, {"cells", cells_json(o.own.cells, reg)}}},
          {"inventory", inventory_json(o.own.inventory, reg)},
          {"shared", shared},
          {"graph", graph_to_json(o.graph)},
          {"legal", o.legal},
          {"inbox", inbox},
          {"scenario", scenario},
          {"done", o.done}};
}

Observation observation_from_json(const json& j, const ContentRegistry& reg) {
  Observation o;
  o.agent = agent_from(j.at("agent"));
  o.step = j.at("step").get<std::int64_t>();
  const auto& w = j.at("window");
  o.own.observer = o.agent;
  o.own.center = pos_from(w.at("center"));
  o.own.radius = w.at("radius").get<int>();
  o.own.cells = cells_from(w.at("cells"), reg);
  o.own.inventory = inventory_from(j.at("inventory"), reg);
  for (const auto& s : j.at("shared")) {
    o.shared.push_back(SharedWindow{agent_from(s.at("source")), pos_from(s.at("center")), s.at("radius").get<int>(),
                                    cells_from(s.at("cells"), reg)});
  }
  o.graph = graph_from_json(j.at("graph"));
  o.legal = j.at("legal").get<std::vector<std::string>>();
  for (const auto& m : j.at("inbox")) o.inbox.push_back(Message{agent_from(m.at("from")), m.at("payload").get<std::string>()});
  const auto& sc = j.at("scenario");
  const auto phase = sc.at("phase").get<std::string>();
  o.scenario.phase = phase == "formation" ? Phase::formation : phase == "negotiation" ? Phase::negotiation : Phase::physical;
  if (sc.contains("selector")) o.scenario.selector = agent_from(sc["selector"]);
  if (sc.contains("session")) {
    const auto& s = sc["session"];
    SessionView v;
    v.partner = agent_from(s.at("partner"));
    v.turn = agent_from(s.at("turn"));
    if (!s.at("my_share").is_null()) v.my_share = s["my_share"].get<double>();
    v.proposals = s.at("proposals").get<int>();
    o.scenario.session = v;
  }
  o.done = j.at("done").get<bool>();
  return o;
}

json header_to_json(const TraceHeader& h) {
  return {{"type", "header"},
          {"version", h.version},
          {"seed", h.seed},
          {"spec", json::parse(h.spec_document)},
          {"graph", graph_to_json(h.graph)},
          {"state_hash", hex64(h.state_hash)},
          {"rng_hash", hex64(h.rng_hash)}};
}

TraceHeader header_from_json(const json& j) {
  if (j.at("type") != "header") throw std::invalid_argument("expected a header record");
  TraceHeader h;
  h.version = j.at("version").get<int>();
  if (h.version != kTraceVersion) throw std::invalid_argument("unsupported trace version " + std::to_string(h.version));
  h.seed = j.at("seed").get<std::uint64_t>();
  h.spec_document = j.at("spec").dump(2);
  h.graph = graph_from_json(j.at("graph"));
  h.state_hash = parse_hex64(j.at("state_hash").get<std::string>());
  h.rng_hash = parse_hex64(j.at("rng_hash").get<std::string>());
  return h;
}

json step_to_json(const TraceStep& s, const ContentRegistry& reg) {
  json raw = json::array();
  for (const auto& r : s.raw) raw.push_back(r.to_string());
  json execs = json::array();
  for (const auto& [a, e] : s.executions) execs.push_back({agent_name(a), reg.event(e).name});
  json piles = json::array(), invs = json::array(), poss = json::array();
  for (const auto& p : s.delta.piles) piles.push_back({p.pos.row, p.pos.col, reg.resource(p.resource).name, p.count});
  for (const auto& c : s.delta.inventories) invs.push_back({agent_name(c.agent), reg.resource(c.resource).name, c.count});
  for (const auto& p : s.delta.positions) poss.push_back({agent_name(p.agent), p.pos.row, p.pos.col});
  json j = {{"type", "step"},
            {"t", s.t},
            {"actions", s.actions},
            {"raw", raw},
            {"shared", s.shared},
            {"outcome", s.outcome},
            {"executions", execs},
            {"delta", {{"piles", piles}, {"inventories", invs}, {"positions", poss}}},
            {"graph_hash", hex64(s.graph_hash)},
            {"state_hash", hex64(s.state_hash)},
            {"rng_hash", hex64(s.rng_hash)},
            {"done", s.done}};
  if (s.graph) j["graph"] = graph_to_json(*s.graph);
  return j;
}

TraceStep step_from_json(const json& j, const ContentRegistry& reg) {
  if (j.at("type") != "step") throw std::invalid_argument("expected a step record");
  TraceStep s;
  s.t = j.at("t").get<std::int64_t>();
  s.actions = j.at("actions").get<std::vector<std::string>>();
  for (const auto& r : j.at("raw")) s.raw.push_back(Rational::parse(r.get<std::string>()));
  s.shared = j.at("shared").get<std::vector<double>>();
  s.outcome = j.at("outcome").get<std::vector<std::string>>();
  for (const auto& e : j.at("executions")) s.executions.emplace_back(agent_from(e.at(0)), reg.event_id(e.at(1).get<std::string>()));
  const auto& d = j.at("delta");
  for (const auto& p : d.at("piles")) {
    s.delta.piles.push_back(PileChange{{p.at(0).get<int>(), p.at(1).get<int>()}, reg.resource_id(p.at(2).get<std::string>()), p.at(3).get<std::int64_t>()});
  }
  for (const auto& c : d.at("inventories")) {
    s.delta.inventories.push_back(InventoryChange{agent_from(c.at(0)), reg.resource_id(c.at(1).get<std::string>()), c.at(2).get<std::int64_t>()});
  }
  for (const auto& p : d.at("positions")) {
    s.delta.positions.push_back(PositionChange{agent_from(p.at(0)), {p.at(1).get<int>(), p.at(2).get<int>()}});
  }
  if (j.contains("graph")) s.graph = graph_from_json(j["graph"]);
  s.graph_hash = parse_hex64(j.at("graph_hash").get<std::string>());
  s.state_hash = parse_hex64(j.at("state_hash").get<std::string>());
  s.rng_hash = parse_hex64(j.at("rng_hash").get<std::string>());
  s.done = j.at("done").get<bool>();
  return s;
}

json summary_to_json(const EpisodeSummary& s) {
  json raw = json::array();
  for (const auto& r : s.raw) raw.push_back(r.to_string());
  json j = {{"type", "summary"},
            {"steps", s.steps},
            {"roles", s.roles},
            {"raw", raw},
            {"shared", s.shared},
            {"executions", s.executions},
            {"fairness_shared", opt_double(s.fairness_shared)},
            {"fairness_raw", opt_double(s.fairness_raw)},
            {"negative_rewards", s.negative_rewards},
            {"structure", std::string(to_string(s.structure))},
            {"agent_degree", degree_json(s.agent_degree)},
            {"group_degree", s.group_degree ? degree_json(*s.group_degree) : json(nullptr)},
            {"split_ratio", opt_double(s.split_ratio)},
            {"final_graph", graph_to_json(s.final_graph)}};
  if (s.oracle_objective) {
    json completion = json::object();
    for (const auto& [name, v] : s.completion) completion[name] = opt_double(v);
    json normalized = json::array();
    for (const auto& v : s.normalized) normalized.push_back(opt_double(v));
    j["oracle"] = {{"objective", s.oracle_objective->to_string()},
                   {"objective_value", s.oracle_objective->to_double()},
                   {"proven", s.oracle_proven},
                   {"optimal_executions", s.optimal_executions}};
    j["completion"] = completion;
    j["completion_overall"] = opt_double(s.completion_overall);
    j["normalized"] = normalized;
  }
  return j;
}

}  // namespace synthsoc
