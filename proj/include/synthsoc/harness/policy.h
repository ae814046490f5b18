#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthsoc/engine.h"

namespace synthsoc {

class Policy {
 public:
  virtual ~Policy() = default;
  // Called before every episode with that episode's seed.
  virtual void reset(std::uint64_t /*episode_seed*/) {}
  virtual Action act(const Observation& obs) = 0;
};

enum class PolicyKind { noop, random, greedy };

std::string_view to_string(PolicyKind k);
std::optional<PolicyKind> parse_policy_kind(std::string_view text);

// The AgentSpec entry an agent was expanded from.
const AgentSpec& agent_spec_of(const ScenarioSpec& spec, AgentId agent);

// Turns a legal template into a concrete action. "propose" takes a share
// k/10 drawn from `rng`; messages carry "hi".
Action instantiate_template(const std::string& tmpl, const ContentRegistry& reg, Rng& rng);

class NoopPolicy final : public Policy {
 public:
  Action act(const Observation&) override { return Action::noop(); }
};

// Uniform over the legal templates of each observation.
class RandomPolicy final : public Policy {
 public:
  RandomPolicy(const ContentRegistry& reg, AgentId self)
      : reg_(std::make_shared<const ContentRegistry>(reg)), self_(self) {}
  void reset(std::uint64_t episode_seed) override;
  Action act(const Observation& obs) override;

 private:
  std::shared_ptr<const ContentRegistry> reg_;
  AgentId self_;
  Rng rng_{0};
};

// Scripted baseline. Physical phase: synthesize on a profitable site when the
// inputs are held, otherwise walk (BFS inside the window) to the nearest pile
// it wants or to a site it can use. Contract: selects group self/2 on its
// turn. Negotiation: bargains with agent self^1 and accepts any share >= 1/2.
class GreedyPolicy final : public Policy {
 public:
  GreedyPolicy(const ScenarioSpec& spec, AgentId self);
  void reset(std::uint64_t episode_seed) override;
  Action act(const Observation& obs) override;

 private:
  Action physical(const Observation& obs);
  Action social(const Observation& obs) const;
  bool profitable(EventId e) const;
  Rational value(ResourceId r) const;

  std::shared_ptr<const ContentRegistry> reg_;
  AgentId self_;
  int agents_;
  std::vector<Rational> preference_;
  Rng rng_{0};
};

std::unique_ptr<Policy> make_policy(PolicyKind kind, const ScenarioSpec& spec, AgentId agent);
// One kind for all agents, or one per agent.
std::vector<std::unique_ptr<Policy>> make_policies(const std::vector<PolicyKind>& kinds, const ScenarioSpec& spec);

}  // namespace synthsoc
