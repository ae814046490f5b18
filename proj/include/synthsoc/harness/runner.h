#pragma once

#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "synthsoc/engine.h"
#include "synthsoc/harness/policy.h"
#include "synthsoc/metrics.h"
#include "synthsoc/oracle.h"
#include "synthsoc/trace.h"

namespace synthsoc {

// Seed of episode k in a batch or a multi-episode server session; episode 0
// uses the base seed itself.
inline std::uint64_t episode_seed(std::uint64_t base, std::int64_t k) {
  return k == 0 ? base : derive_seed(base, static_cast<std::uint64_t>(k));
}

// Builds the in-memory trace and, optionally, its text form. Shared by the
// in-process runner and the server so both emit identical bytes.
class EpisodeRecorder {
 public:
  explicit EpisodeRecorder(bool keep_text) : keep_text_(keep_text), writer_(text_) {}
  void begin(const Engine& engine);
  void record(const Engine& engine, const StepResult& step);
  // Computes the summary and appends its record.
  EpisodeSummary finish(const OracleSolution* oracle);

  const EpisodeTrace& trace() const { return trace_; }
  std::string text() const { return text_.str(); }

 private:
  bool keep_text_;
  std::ostringstream text_;
  TraceWriter writer_;
  EpisodeTrace trace_;
  std::shared_ptr<const ContentRegistry> reg_;
};

struct EpisodeOutcome {
  EpisodeSummary summary;
  std::string trace_text;  // empty unless requested
  std::uint64_t trace_hash = 0;  // fnv1a of trace_text
  std::vector<bool> degraded;    // policy threw and was replaced by no-ops
};

// Policies must cover every agent. A policy that throws is degraded to no-op
// for the rest of the episode.
EpisodeOutcome run_episode(const ScenarioSpec& spec, std::vector<std::unique_ptr<Policy>>& policies,
                           std::uint64_t seed, bool keep_trace_text, const OracleSolution* oracle = nullptr);

// Episode k uses episode_seed(base_seed, k). The two give identical results;
// run_batch splits episodes across OpenMP threads.
std::vector<EpisodeSummary> run_batch_serial(const ScenarioSpec& spec, const std::vector<PolicyKind>& kinds,
                                             std::uint64_t base_seed, int episodes,
                                             const OracleSolution* oracle = nullptr);
std::vector<EpisodeSummary> run_batch(const ScenarioSpec& spec, const std::vector<PolicyKind>& kinds,
                                      std::uint64_t base_seed, int episodes, const OracleSolution* oracle = nullptr);

// Plain engine loop without recording: steps taken per wall-clock second.
struct ThroughputResult {
  std::int64_t steps = 0;
  double seconds = 0;
  double steps_per_second() const { return seconds > 0 ? static_cast<double>(steps) / seconds : 0; }
};
ThroughputResult measure_throughput(const ScenarioSpec& spec, PolicyKind kind, std::uint64_t seed, int episodes);

}  // namespace synthsoc
