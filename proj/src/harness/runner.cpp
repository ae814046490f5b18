#include "synthsoc/harness/runner.h"

#include <chrono>

#include "synthsoc/hash.h"
#include "synthsoc/harness/serialize.h"

namespace synthsoc {

void EpisodeRecorder::begin(const Engine& engine) {
  reg_ = std::make_shared<const ContentRegistry>(engine.registry());
  trace_ = EpisodeTrace{};
  trace_.header = make_trace_header(engine);
  if (keep_text_) writer_.header(trace_.header, *reg_);
}

void EpisodeRecorder::record(const Engine& engine, const StepResult& step) {
  trace_.steps.push_back(make_trace_step(engine, step));
  if (keep_text_) writer_.step(trace_.steps.back(), *reg_);
}

EpisodeSummary EpisodeRecorder::finish(const OracleSolution* oracle) {
  EpisodeSummary s = summarize(trace_, oracle);
  if (keep_text_) {
    trace_.summary_line = summary_to_json(s).dump();
    writer_.summary(*trace_.summary_line);
  }
  return s;
}

EpisodeOutcome run_episode(const ScenarioSpec& spec, std::vector<std::unique_ptr<Policy>>& policies,
                           std::uint64_t seed, bool keep_trace_text, const OracleSolution* oracle) {
  const auto n = static_cast<std::size_t>(spec.agent_count());
  if (policies.size() != n) throw std::invalid_argument("run_episode needs one policy per agent");
  Engine engine(spec);
  auto obs = engine.reset(seed);
  for (auto& p : policies) p->reset(seed);

  EpisodeOutcome out;
  out.degraded.assign(n, false);
  EpisodeRecorder rec(keep_trace_text);
  rec.begin(engine);
  std::vector<Action> joint(n);
  while (!engine.done()) {
    for (std::size_t a = 0; a < n; ++a) {
      joint[a] = Action::noop();
      if (out.degraded[a]) continue;
      try {
        joint[a] = policies[a]->act(obs[a]);
      } catch (const std::exception&) {
        out.degraded[a] = true;
      }
    }
    StepResult res = engine.step(joint);
    rec.record(engine, res);
    obs = std::move(res.observations);
  }
  out.summary = rec.finish(oracle);
  if (keep_trace_text) {
    out.trace_text = rec.text();
    out.trace_hash = fnv1a(out.trace_text);
  }
  return out;
}

std::vector<EpisodeSummary> run_batch_serial(const ScenarioSpec& spec, const std::vector<PolicyKind>& kinds,
                                             std::uint64_t base_seed, int episodes, const OracleSolution* oracle) {
  std::vector<EpisodeSummary> out(static_cast<std::size_t>(episodes));
  for (int k = 0; k < episodes; ++k) {
    auto policies = make_policies(kinds, spec);
    out[static_cast<std::size_t>(k)] = run_episode(spec, policies, episode_seed(base_seed, k), false, oracle).summary;
  }
  return out;
}

std::vector<EpisodeSummary> run_batch(const ScenarioSpec& spec, const std::vector<PolicyKind>& kinds,
                                      std::uint64_t base_seed, int episodes, const OracleSolution* oracle) {
  std::vector<EpisodeSummary> out(static_cast<std::size_t>(episodes));
  // Exceptions may not cross the parallel region.
  std::vector<std::string> errors(static_cast<std::size_t>(episodes));
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < episodes; ++k) {
    try {
      auto policies = make_policies(kinds, spec);
      out[static_cast<std::size_t>(k)] = run_episode(spec, policies, episode_seed(base_seed, k), false, oracle).summary;
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(k)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error(e);
  return out;
}

ThroughputResult measure_throughput(const ScenarioSpec& spec, PolicyKind kind, std::uint64_t seed, int episodes) {
  ThroughputResult r;
  const auto n = static_cast<std::size_t>(spec.agent_count());
  std::vector<Action> joint(n);
  const auto start = std::chrono::steady_clock::now();
  for (int k = 0; k < episodes; ++k) {
    auto policies = make_policies({kind}, spec);
    Engine engine(spec);
    const auto s = episode_seed(seed, k);
    auto obs = engine.reset(s);
    for (auto& p : policies) p->reset(s);
    while (!engine.done()) {
      for (std::size_t a = 0; a < n; ++a) joint[a] = policies[a]->act(obs[a]);
      obs = engine.step(joint).observations;
      ++r.steps;
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace synthsoc
