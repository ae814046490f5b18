#include "synthsoc/harness/protocol.h"

#include <initializer_list>

namespace synthsoc {

using json = nlohmann::json;

namespace {

constexpr std::pair<MessageType, std::string_view> kNames[] = {
    {MessageType::hello, "hello"},           {MessageType::reset, "reset"},
    {MessageType::observation, "observation"}, {MessageType::action, "action"},
    {MessageType::step_result, "step_result"}, {MessageType::episode_end, "episode_end"},
    {MessageType::error, "error"},
};

void require(const ProtocolMessage& m, std::initializer_list<const char*> payload_keys, bool episode, bool step,
             bool agent) {
  const std::string type(to_string(m.type));
  if (episode && !m.episode) throw ProtocolError(type + " needs 'episode'");
  if (step && !m.step) throw ProtocolError(type + " needs 'step'");
  if (agent && !m.agent) throw ProtocolError(type + " needs 'agent'");
  for (const char* k : payload_keys)
    if (!m.payload.contains(k)) throw ProtocolError(type + " needs '" + k + "'");
}

}  // namespace

std::string_view to_string(MessageType t) {
  for (const auto& [k, name] : kNames)
    if (k == t) return name;
  return "?";
}

std::optional<MessageType> parse_message_type(std::string_view text) {
  for (const auto& [k, name] : kNames)
    if (name == text) return k;
  return std::nullopt;
}

std::string encode_message(const ProtocolMessage& m) {
  json j = m.payload;
  j["type"] = to_string(m.type);
  if (m.episode) j["episode"] = *m.episode;
  if (m.step) j["step"] = *m.step;
  if (m.agent) j["agent"] = *m.agent;
  return j.dump();
}

ProtocolMessage decode_message(std::string_view line) {
  if (line.size() > kMaxLineBytes) throw ProtocolError("message too long");
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed message: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("message must be an object");
  auto type_it = j.find("type");
  if (type_it == j.end() || !type_it->is_string()) throw ProtocolError("message needs a string 'type'");
  auto type = parse_message_type(type_it->get<std::string>());
  if (!type) throw ProtocolError("unknown message type '" + type_it->get<std::string>() + "'");

  ProtocolMessage m;
  m.type = *type;
  j.erase("type");
  auto take_int = [&](const char* key, std::optional<std::int64_t>& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_number_integer()) throw ProtocolError(std::string("'") + key + "' must be an integer");
    out = it->get<std::int64_t>();
    j.erase(it);
  };
  take_int("episode", m.episode);
  take_int("step", m.step);
  if (auto it = j.find("agent"); it != j.end()) {
    if (!it->is_string()) throw ProtocolError("'agent' must be a string");
    m.agent = it->get<std::string>();
    j.erase(it);
  }
  m.payload = std::move(j);

  switch (m.type) {
    case MessageType::hello: require(m, {"version"}, false, false, false); break;
    case MessageType::reset: require(m, {"seed"}, true, false, false); break;
    case MessageType::observation: require(m, {"observation"}, true, true, true); break;
    case MessageType::action:
      require(m, {"action"}, true, true, true);
      if (!m.payload["action"].is_string()) throw ProtocolError("'action' must be a string");
      break;
    case MessageType::step_result: require(m, {"outcome", "raw", "shared", "done"}, true, true, false); break;
    case MessageType::episode_end: require(m, {"summary", "trace_hash"}, true, false, false); break;
    case MessageType::error: require(m, {"message"}, false, false, false); break;
  }
  return m;
}

ProtocolMessage make_error(std::string message, std::optional<std::int64_t> episode, std::optional<std::int64_t> step,
                           std::optional<std::string> agent) {
  ProtocolMessage m;
  m.type = MessageType::error;
  m.episode = episode;
  m.step = step;
  m.agent = std::move(agent);
  m.payload = {{"message", std::move(message)}};
  return m;
}

}  // namespace synthsoc
