#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthsoc/oracle.h"
#include "synthsoc/rational.h"
#include "synthsoc/social.h"
#include "synthsoc/trace.h"

namespace synthsoc {

// 1 - sum_i sum_j |R_i - R_j| / (2 N sum_i R_i). All zeros give 1; any other
// zero-sum vector is undefined.
std::optional<double> fairness(std::span<const double> rewards);

// Per event executions / optimal; undefined where the optimum is 0.
std::map<std::string, std::optional<double>> completion_rate(const std::map<std::string, std::int64_t>& executions,
                                                             const std::map<std::string, std::int64_t>& optimal);

// Throws std::invalid_argument for a nonpositive oracle objective.
double normalized_reward(double reward, double oracle_objective);

struct EpisodeSummary {
  std::int64_t steps = 0;
  std::vector<std::string> roles;
  std::vector<Rational> raw;  // cumulative valuation change per agent
  std::vector<double> shared;
  std::map<std::string, std::int64_t> executions;
  std::optional<double> fairness_shared;
  std::optional<double> fairness_raw;
  bool negative_rewards = false;
  SocialGraph final_graph;
  StructureCategory structure = StructureCategory::isolation;
  DegreeStats agent_degree;
  std::optional<DegreeStats> group_degree;
  std::optional<double> split_ratio;  // negotiation only

  // Present when an oracle solution was supplied.
  std::optional<Rational> oracle_objective;
  bool oracle_proven = true;
  std::map<std::string, std::int64_t> optimal_executions;
  std::map<std::string, std::optional<double>> completion;
  std::optional<double> completion_overall;  // total executions / total optimal
  std::vector<std::optional<double>> normalized;  // shared reward / oracle objective
};

// Throws std::runtime_error for a trace whose steps are out of order.
// `oracle`, when given, must come from build_instance on the trace's scenario.
EpisodeSummary summarize(const EpisodeTrace& trace, const OracleSolution* oracle = nullptr);

}  // namespace synthsoc
