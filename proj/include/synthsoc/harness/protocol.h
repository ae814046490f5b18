#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace synthsoc {

// Newline-delimited JSON objects. Every message has "type"; "episode",
// "step" and "agent" are present where they apply and every other key is
// payload.
//
//   client -> server
//     hello        {version, role: "agent"|"spectator", agent?}
//     action       {episode, step, agent, action}
//   server -> client
//     hello        {version, agent?, agents, spec}      handshake accepted
//     reset        {episode, seed}
//     observation  {episode, step, agent, observation}
//     step_result  {episode, step, agent?, accepted?, outcome, raw, shared, done}
//     episode_end  {episode, summary, trace_hash}
//     error        {message, episode?, step?, agent?}
inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxLineBytes = 1 << 22;

enum class MessageType { hello, reset, observation, action, step_result, episode_end, error };

std::string_view to_string(MessageType t);
std::optional<MessageType> parse_message_type(std::string_view text);

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProtocolMessage {
  MessageType type = MessageType::error;
  std::optional<std::int64_t> episode;
  std::optional<std::int64_t> step;
  std::optional<std::string> agent;
  nlohmann::json payload = nlohmann::json::object();

  friend bool operator==(const ProtocolMessage&, const ProtocolMessage&) = default;
};

// One line, no trailing newline. Keys are sorted, so encode(decode(x)) == x
// for any line this produced.
std::string encode_message(const ProtocolMessage& m);
// Throws ProtocolError on malformed JSON, unknown types or missing fields.
ProtocolMessage decode_message(std::string_view line);

ProtocolMessage make_error(std::string message, std::optional<std::int64_t> episode = std::nullopt,
                           std::optional<std::int64_t> step = std::nullopt,
                           std::optional<std::string> agent = std::nullopt);

}  // namespace synthsoc
