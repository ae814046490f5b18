#include "synthsoc/trace.h"

#include <stdexcept>

#include "synthsoc/hash.h"
#include "synthsoc/harness/serialize.h"

namespace synthsoc {

TraceHeader make_trace_header(const Engine& engine) {
  TraceHeader h;
  h.spec_document = serialize_scenario(engine.spec());
  h.seed = engine.seed();
  h.graph = engine.graph();
  h.state_hash = engine.state_hash();
  h.rng_hash = engine.rng_hash();
  return h;
}

TraceStep make_trace_step(const Engine& engine, const StepResult& step) {
  TraceStep s;
  s.t = step.t;
  for (const auto& a : step.submitted) s.actions.push_back(encode_action(a, engine.registry()));
  s.raw = step.raw;
  s.shared = step.shared;
  s.outcome = step.outcome;
  s.executions = step.executions;
  s.delta = step.delta;
  if (step.graph_changed) s.graph = engine.graph();
  s.graph_hash = engine.graph().hash();
  s.state_hash = engine.state_hash();
  s.rng_hash = engine.rng_hash();
  s.done = step.done;
  return s;
}

void TraceWriter::header(const TraceHeader& h, const ContentRegistry&) { *out_ << header_to_json(h).dump() << '\n'; }

void TraceWriter::step(const TraceStep& s, const ContentRegistry& reg) { *out_ << step_to_json(s, reg).dump() << '\n'; }

void TraceWriter::summary(const std::string& json_line) { *out_ << json_line << '\n'; }

namespace {

ScenarioSpec spec_of(const TraceHeader& h) {
  auto parsed = parse_and_validate(h.spec_document);
  if (!parsed.ok()) {
    std::string msg = "trace header holds an invalid scenario";
    for (const auto& v : parsed.violations) msg += "; " + v.to_string();
    throw std::runtime_error(msg);
  }
  return *parsed.spec;
}

ReplayReport mismatch(ReplayReport r, std::int64_t t, std::string what) {
  r.ok = false;
  r.first_mismatch = t;
  r.message = std::move(what);
  return r;
}

}  // namespace

std::vector<EpisodeTrace> read_traces(std::istream& in) {
  std::vector<EpisodeTrace> out;
  std::string line;
  std::int64_t lineno = 0;
  std::optional<ScenarioSpec> spec;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "header") {
        out.emplace_back();
        out.back().header = header_from_json(j);
        spec = spec_of(out.back().header);
      } else if (out.empty()) {
        throw std::runtime_error("trace does not start with a header");
      } else if (type == "step") {
        if (out.back().summary_line) throw std::runtime_error("step after summary");
        out.back().steps.push_back(step_from_json(j, spec->registry));
      } else if (type == "summary") {
        out.back().summary_line = line;
      } else {
        throw std::runtime_error("unknown record type '" + type + "'");
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

EpisodeTrace read_trace(std::istream& in) {
  auto all = read_traces(in);
  if (all.size() != 1) throw std::runtime_error("expected one episode, found " + std::to_string(all.size()));
  return std::move(all.front());
}

ReplayReport replay_actions(const EpisodeTrace& trace) {
  const ScenarioSpec spec = spec_of(trace.header);
  Engine engine(spec);
  engine.reset(trace.header.seed);
  ReplayReport r;
  if (engine.state_hash() != trace.header.state_hash || engine.rng_hash() != trace.header.rng_hash ||
      !(engine.graph() == trace.header.graph)) {
    return mismatch(r, -1, "initial state differs");
  }
  std::vector<Action> joint;
  for (const auto& st : trace.steps) {
    if (engine.done()) return mismatch(r, st.t, "trace runs past the episode end");
    if (st.t != engine.t()) return mismatch(r, st.t, "step index out of order");
    joint.clear();
    for (const auto& text : st.actions) {
      auto a = parse_action(text, engine.registry());
      if (!a) return mismatch(r, st.t, "unparseable action '" + text + "'");
      joint.push_back(*a);
    }
    if (joint.size() != static_cast<std::size_t>(engine.agent_count())) return mismatch(r, st.t, "wrong action count");
    const StepResult res = engine.step(joint);
    if (engine.state_hash() != st.state_hash) return mismatch(r, st.t, "state hash differs");
    if (engine.graph().hash() != st.graph_hash) return mismatch(r, st.t, "graph hash differs");
    if (engine.rng_hash() != st.rng_hash) return mismatch(r, st.t, "rng hash differs");
    if (res.raw != st.raw || res.shared != st.shared) return mismatch(r, st.t, "rewards differ");
    if (res.outcome != st.outcome) return mismatch(r, st.t, "outcomes differ");
    ++r.steps;
  }
  r.final_state_hash = engine.state_hash();
  return r;
}

ReplayReport replay_deltas(const EpisodeTrace& trace) {
  const ScenarioSpec spec = spec_of(trace.header);
  Rng rng(trace.header.seed);
  WorldState world = generate_world(spec, rng);
  SocialGraph graph = trace.header.graph;
  ReplayReport r;
  if (Engine::combine_state_hash(world, graph, 0) != trace.header.state_hash) {
    return mismatch(r, -1, "initial state differs");
  }
  for (const auto& st : trace.steps) {
    apply_delta(world, st.delta);
    if (st.graph) graph = *st.graph;
    if (graph.hash() != st.graph_hash) return mismatch(r, st.t, "graph hash differs");
    if (Engine::combine_state_hash(world, graph, st.t + 1) != st.state_hash) {
      return mismatch(r, st.t, "state hash differs");
    }
    ++r.steps;
  }
  r.final_state_hash = trace.steps.empty() ? trace.header.state_hash : trace.steps.back().state_hash;
  return r;
}

}  // namespace synthsoc
