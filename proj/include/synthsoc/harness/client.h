#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "synthsoc/config.h"
#include "synthsoc/harness/net.h"
#include "synthsoc/harness/policy.h"
#include "synthsoc/harness/protocol.h"

namespace synthsoc {

// Blocking client for one agent or a spectator.
class Client {
 public:
  // Connects and completes the hello handshake. Throws ProtocolError when the
  // server refuses (duplicate agent, version mismatch, ...).
  Client(const std::string& host, int port, std::optional<AgentId> agent, int version = kProtocolVersion);

  bool spectator() const { return !agent_; }
  AgentId agent() const { return agent_.value_or(-1); }
  const ScenarioSpec& spec() const { return spec_; }
  int agent_count() const { return agents_; }

  // Next message, or nullopt once the server closes the connection.
  std::optional<ProtocolMessage> receive();
  void send(const ProtocolMessage& m);
  void send_raw(std::string_view line);
  void send_action(std::int64_t episode, std::int64_t step, const std::string& action);

 private:
  LineChannel ch_;
  std::optional<AgentId> agent_;
  ScenarioSpec spec_;
  int agents_ = 0;
};

struct ClientReport {
  int episodes = 0;
  std::int64_t steps = 0;
  std::int64_t errors = 0;
  std::vector<std::uint64_t> trace_hashes;  // from episode_end
  std::vector<std::string> error_messages;
};

// Drives `policy` until the server hangs up.
ClientReport run_client(Client& client, Policy& policy);

}  // namespace synthsoc
