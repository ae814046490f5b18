#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "synthsoc/engine.h"

namespace synthsoc {

inline constexpr int kTraceVersion = 1;

struct TraceHeader {
  int version = kTraceVersion;
  std::string spec_document;  // serialize_scenario output
  std::uint64_t seed = 0;
  SocialGraph graph;
  std::uint64_t state_hash = 0;
  std::uint64_t rng_hash = 0;
};

struct TraceStep {
  std::int64_t t = 0;
  std::vector<std::string> actions;  // encoded, as submitted
  std::vector<Rational> raw;
  std::vector<double> shared;
  std::vector<std::string> outcome;
  std::vector<std::pair<AgentId, EventId>> executions;
  WorldDelta delta;
  std::optional<SocialGraph> graph;  // present when the graph changed
  std::uint64_t graph_hash = 0;
  std::uint64_t state_hash = 0;
  std::uint64_t rng_hash = 0;
  bool done = false;
};

struct EpisodeTrace {
  TraceHeader header;
  std::vector<TraceStep> steps;
  std::optional<std::string> summary_line;  // raw JSON of the summary record, if any
};

TraceHeader make_trace_header(const Engine& engine);
TraceStep make_trace_step(const Engine& engine, const StepResult& step);

// One JSON record per line: a header, one record per step, then an optional
// summary record.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(&out) {}
  void header(const TraceHeader& h, const ContentRegistry& reg);
  void step(const TraceStep& s, const ContentRegistry& reg);
  void summary(const std::string& json_line);

 private:
  std::ostream* out_;
};

// Throws std::runtime_error on malformed input. read_traces accepts several
// episodes back to back; read_trace requires exactly one.
std::vector<EpisodeTrace> read_traces(std::istream& in);
EpisodeTrace read_trace(std::istream& in);

struct ReplayReport {
  bool ok = true;
  std::int64_t steps = 0;
  std::optional<std::int64_t> first_mismatch;
  std::string message;
  std::uint64_t final_state_hash = 0;
};

// Re-runs the recorded actions through a fresh engine and compares the
// state, graph and RNG hashes of every step.
ReplayReport replay_actions(const EpisodeTrace& trace);
// Rebuilds state from the initial world plus recorded deltas and graph
// snapshots, comparing state hashes.
ReplayReport replay_deltas(const EpisodeTrace& trace);

}  // namespace synthsoc
