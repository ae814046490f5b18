#include "synthsoc/metrics.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace synthsoc {

std::optional<double> fairness(std::span<const double> rewards) {
  if (rewards.empty()) throw std::invalid_argument("fairness needs at least one reward");
  const double sum = std::accumulate(rewards.begin(), rewards.end(), 0.0);
  double diff = 0;
  for (double a : rewards)
    for (double b : rewards) diff += std::abs(a - b);
  if (sum == 0) {
    if (diff == 0) return 1.0;
    return std::nullopt;
  }
  return 1.0 - diff / (2.0 * static_cast<double>(rewards.size()) * sum);
}

std::map<std::string, std::optional<double>> completion_rate(const std::map<std::string, std::int64_t>& executions,
                                                             const std::map<std::string, std::int64_t>& optimal) {
  std::map<std::string, std::optional<double>> out;
  for (const auto& [name, opt] : optimal) {
    auto it = executions.find(name);
    const std::int64_t done = it == executions.end() ? 0 : it->second;
    out[name] = opt > 0 ? std::optional<double>(static_cast<double>(done) / static_cast<double>(opt)) : std::nullopt;
  }
  return out;
}

double normalized_reward(double reward, double oracle_objective) {
  if (!(oracle_objective > 0)) throw std::invalid_argument("oracle objective must be positive");
  return reward / oracle_objective;
}

EpisodeSummary summarize(const EpisodeTrace& trace, const OracleSolution* oracle) {
  const auto parsed = parse_and_validate(trace.header.spec_document);
  if (!parsed.ok()) throw std::runtime_error("trace header holds an invalid scenario");
  const auto& spec = *parsed.spec;
  const auto& reg = spec.registry;
  const auto n = static_cast<std::size_t>(spec.agent_count());

  EpisodeSummary s;
  for (const auto& a : spec.agents)
    for (int k = 0; k < a.count; ++k) s.roles.push_back(a.role);
  s.raw.assign(n, Rational(0));
  s.shared.assign(n, 0.0);
  for (const auto& ev : reg.events()) s.executions[ev.name] = 0;
  s.final_graph = trace.header.graph;

  std::int64_t expected = 0;
  for (const auto& st : trace.steps) {
    if (st.t != expected) throw std::runtime_error("trace step " + std::to_string(st.t) + " out of order");
    ++expected;
    if (st.raw.size() != n || st.shared.size() != n) throw std::runtime_error("trace step has wrong agent count");
    for (std::size_t a = 0; a < n; ++a) {
      s.raw[a] += st.raw[a];
      s.shared[a] += st.shared[a];
    }
    for (const auto& [agent, ev] : st.executions) ++s.executions[reg.event(ev).name];
    if (st.graph) s.final_graph = *st.graph;
  }
  s.steps = expected;

  std::vector<double> raw_d(n);
  for (std::size_t a = 0; a < n; ++a) raw_d[a] = s.raw[a].to_double();
  for (std::size_t a = 0; a < n; ++a)
    if (raw_d[a] < 0 || s.shared[a] < 0) s.negative_rewards = true;
  if (n > 0) {
    s.fairness_shared = fairness(s.shared);
    s.fairness_raw = fairness(raw_d);
  }
  s.structure = classify_structure(s.final_graph);
  if (s.final_graph.agent_count() > 0) s.agent_degree = degree_stats(s.final_graph, 0);
  if (s.final_graph.group_count() > 0) s.group_degree = degree_stats(s.final_graph, 1);
  if (spec.scenario.kind == ScenarioKind::negotiation) s.split_ratio = split_ratio(s.final_graph, s.roles);

  if (oracle != nullptr) {
    s.oracle_objective = oracle->objective;
    s.oracle_proven = oracle->proven;
    std::int64_t done = 0, best = 0;
    for (std::size_t e = 0; e < oracle->x.size(); ++e) {
      const std::string& name = reg.event(static_cast<EventId>(e)).name;
      s.optimal_executions[name] = oracle->x[e];
      best += oracle->x[e];
      done += s.executions[name];
    }
    s.completion = completion_rate(s.executions, s.optimal_executions);
    if (best > 0) s.completion_overall = static_cast<double>(done) / static_cast<double>(best);
    const double obj = oracle->objective.to_double();
    for (std::size_t a = 0; a < n; ++a) {
      s.normalized.push_back(obj > 0 ? std::optional<double>(normalized_reward(s.shared[a], obj)) : std::nullopt);
    }
  }
  return s;
}

}  // namespace synthsoc
