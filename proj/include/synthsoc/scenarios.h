#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthsoc/action.h"
#include "synthsoc/config.h"
#include "synthsoc/rng.h"
#include "synthsoc/social.h"

namespace synthsoc {

// Existing members keep their relative shares scaled by w_rep; the newcomer
// gets w_new. Throws std::invalid_argument when a component is negative, the
// split does not sum to 1, or the newcomer is already a member.
std::map<AgentId, double> merge_weights(const std::map<AgentId, double>& existing, AgentId newcomer, double w_rep,
                                        double w_new);

// Two sides of any size: side a scaled by share_a, side b by 1 - share_a.
std::map<AgentId, double> merge_sides(const std::map<AgentId, double>& a, const std::map<AgentId, double>& b,
                                      double share_a);

// Sum of group shares held by agents with role `numerator` over the same sum
// for `denominator`; nullopt when the denominator is zero.
std::optional<double> split_ratio(const SocialGraph& graph, std::span<const std::string> roles,
                                  std::string_view numerator = "carpenter", std::string_view denominator = "miner");

// Pairs (i, j), i < j, that requested each other. requests[i] is the target
// of agent i, if any; self requests are ignored.
std::vector<std::pair<AgentId, AgentId>> negotiation_round(std::span<const std::optional<AgentId>> requests);

struct BargainSession {
  enum class Status { open, accepted, declined };

  AgentId first = 0;   // lower id; holds the first turn
  AgentId second = 0;
  AgentId turn = 0;
  std::optional<double> table;  // share of first's side under the current proposal
  int proposals = 0;
  Status status = Status::open;
  std::vector<AgentId> actors;  // transcript of who acted

  bool involves(AgentId a) const { return a == first || a == second; }
  AgentId partner(AgentId a) const { return a == first ? second : first; }
  // The table as seen from `a`'s side.
  std::optional<double> share_of(AgentId a) const {
    if (!table) return std::nullopt;
    return a == first ? *table : 1.0 - *table;
  }
};

BargainSession open_session(AgentId a, AgentId b);

enum class BargainResult { ok, out_of_turn, empty_table, invalid_share, closed };

// One turn. A proposal beyond `max_proposals` declines the session instead.
BargainResult bargain_act(BargainSession& s, AgentId actor, const Action& act, int max_proposals);

enum class Phase { formation, negotiation, physical };
std::string_view to_string(Phase p);

// Mini-game protocol state for one episode. The engine calls apply_social
// once per step with every agent's action, then end_of_step.
class ScenarioRuntime {
 public:
  ScenarioRuntime() = default;
  // Draws the contract selection order from `rng`.
  ScenarioRuntime(const ScenarioSpec& spec, Rng& rng);

  ScenarioKind kind() const { return params_.kind; }
  SocialGraph initial_graph() const;
  int group_count() const { return groups_; }

  Phase phase(std::int64_t t) const;
  bool physical_enabled(std::int64_t t) const { return phase(t) == Phase::physical; }
  std::int64_t formation_steps() const;

  // Social verb templates, fixed for the whole episode.
  std::vector<Action> social_templates(AgentId agent) const;

  // Contract: the agent allowed to select at step t, if any.
  std::optional<AgentId> selector(std::int64_t t) const;
  const std::vector<AgentId>& contract_order() const { return order_; }

  // Applies the social verbs in `actions` (one per agent). outcome[i] is set
  // for agents whose social verb was rejected.
  void apply_social(std::int64_t t, std::span<const Action> actions, SocialGraph& graph,
                    std::vector<std::string>& outcome);
  // Schedule switches and stage ends that take effect before step t_next.
  void end_of_step(std::int64_t t_next, SocialGraph& graph);

  const std::vector<BargainSession>& sessions() const { return sessions_; }
  const std::vector<BargainSession>& closed_sessions() const { return closed_; }
  const BargainSession* session_of(AgentId a) const;
  bool in_session_together(AgentId a, AgentId b) const;

 private:
  void apply_negotiation(std::span<const Action> actions, SocialGraph& graph, std::vector<std::string>& outcome);
  void settle(const BargainSession& s, SocialGraph& graph);

  ScenarioParams params_;
  int agents_ = 0;
  int groups_ = 0;
  std::vector<AgentId> order_;
  std::vector<BargainSession> sessions_;
  std::vector<BargainSession> closed_;
};

}  // namespace synthsoc
