#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synthsoc/config.h"
#include "synthsoc/rational.h"
#include "synthsoc/rng.h"

namespace synthsoc {

// Credit-maximization program over a single virtual agent:
//   maximize  sum_{natural i} r_i c_i a_i + sum_{synthesized i} r_i c_i b_{e(i)}
//   natural:      r_i = m_i - sum_j x_j in_{j,i}            >= 0
//   synthesized:  r_i = m_i + P_{e(i)} x_{e(i)} - sum_j x_j in_{j,i} >= 0
//   a_i <= x_j for j in Q(i);  b_j <= x_j;  x_j <= b_k M_j for k in D(j)
//   0 <= x_j <= bound_j integer;  a, b binary
// where c_i is the credit per unit (preference times objective reward).
struct OracleResource {
  std::string name;
  bool natural = true;
  std::int64_t amount = 0;  // m_i
  Rational credit;          // c_i
  std::vector<int> q;       // Q(i): events that must occur before i can be collected
};

struct OracleEvent {
  std::string name;
  std::vector<std::pair<int, std::int64_t>> inputs;  // resource index, units per execution
  int output = -1;
  std::int64_t yield = 1;  // P
  std::int64_t bound = 0;  // execution upper bound; 0 for events with no site
  std::vector<int> d;      // D(j): events that must occur before j can run
};

struct OracleInstance {
  std::vector<OracleResource> resources;
  std::vector<OracleEvent> events;

  std::int64_t big_m(int event) const { return events[static_cast<std::size_t>(event)].bound + 1; }
  int producer(int resource) const;
  // Events ordered so producers and D-predecessors come first.
  std::vector<int> topological_events() const;
  // Product of (bound + 1), saturating at INT64_MAX.
  std::int64_t search_space() const;
};

// Builds Q, D and execution bounds from a registry. `present` events may run;
// the rest get bound 0. Bounds come from propagating total availability
// through the synthesis order and are then capped at `bound_cap` if given.
OracleInstance make_instance(const ContentRegistry& reg, const std::map<std::string, std::int64_t>& amounts,
                             const std::map<std::string, Rational>& credit_scale, const std::vector<bool>& present,
                             std::optional<std::int64_t> bound_cap = std::nullopt);

// m = map units plus initial inventories, credit = highest agent preference
// times objective reward, events present when they have at least one site.
OracleInstance build_instance(const ScenarioSpec& spec);

struct OracleSolution {
  Rational objective;
  std::vector<std::int64_t> x;     // per event
  std::vector<int> alpha;          // per resource; 0 for synthesized
  std::vector<int> beta;           // per event
  std::vector<std::int64_t> left;  // r, per resource
  bool proven = true;
  std::int64_t nodes = 0;
};

// Objective evaluated at the solution's (r, x, alpha, beta).
Rational objective_of(const OracleInstance& inst, const OracleSolution& s);
// Every violated constraint, described; empty when feasible.
std::vector<std::string> constraint_violations(const OracleInstance& inst, const OracleSolution& s);

// Depth-first branch and bound over x in topological order. Nodes are pruned
// by a resource-potential bound and an LP relaxation (gates relaxed to
// x_j <= M_j x_k), and values nearest the LP optimum are tried first. Stops after `node_budget` nodes and reports the
// best solution found with proven = false.
OracleSolution solve(const OracleInstance& inst, std::int64_t node_budget = 20'000'000);

// Exhaustive enumeration of x and b with every constraint checked directly.
// Throws std::invalid_argument when search_space() exceeds 10^7.
OracleSolution brute_force_serial(const OracleInstance& inst);
// Same result as brute_force_serial; the x range is split across OpenMP threads.
OracleSolution brute_force(const OracleInstance& inst);

// Random valid instance: up to `max_events` events over a fresh synthesis
// tree, small amounts and integer credits, bounds capped at `max_bound`.
OracleInstance random_instance(Rng& rng, int max_events, std::int64_t max_bound);

}  // namespace synthsoc
