#include "synthsoc/harness/client.h"

#include "synthsoc/harness/serialize.h"

namespace synthsoc {

Client::Client(const std::string& host, int port, std::optional<AgentId> agent, int version)
    : ch_(connect_tcp(host, port)), agent_(agent) {
  ProtocolMessage hello;
  hello.type = MessageType::hello;
  hello.payload = {{"version", version}, {"role", agent ? "agent" : "spectator"}};
  if (agent) hello.agent = agent_name(*agent);
  send(hello);

  auto reply = receive();
  if (!reply) throw ProtocolError("server closed the connection during hello");
  if (reply->type == MessageType::error) throw ProtocolError(reply->payload["message"].get<std::string>());
  if (reply->type != MessageType::hello) throw ProtocolError("expected hello, got " + std::string(to_string(reply->type)));
  if (reply->payload["version"] != kProtocolVersion) throw ProtocolError("protocol version mismatch");
  auto parsed = parse_and_validate(reply->payload.at("spec").dump());
  if (!parsed.ok()) throw ProtocolError("server sent an invalid scenario");
  spec_ = *parsed.spec;
  agents_ = reply->payload.at("agents").get<int>();
}

std::optional<ProtocolMessage> Client::receive() {
  auto line = ch_.read_line();
  if (!line) return std::nullopt;
  return decode_message(*line);
}

void Client::send(const ProtocolMessage& m) { ch_.send_line(encode_message(m)); }

void Client::send_raw(std::string_view line) { ch_.send_line(line); }

void Client::send_action(std::int64_t episode, std::int64_t step, const std::string& action) {
  ProtocolMessage m;
  m.type = MessageType::action;
  m.episode = episode;
  m.step = step;
  m.agent = agent_name(agent());
  m.payload = {{"action", action}};
  send(m);
}

ClientReport run_client(Client& client, Policy& policy) {
  ClientReport r;
  const auto& reg = client.spec().registry;
  while (auto m = client.receive()) {
    switch (m->type) {
      case MessageType::reset: policy.reset(m->payload.at("seed").get<std::uint64_t>()); break;
      case MessageType::observation: {
        const Observation obs = observation_from_json(m->payload.at("observation"), reg);
        client.send_action(*m->episode, *m->step, encode_action(policy.act(obs), reg));
        break;
      }
      case MessageType::step_result: ++r.steps; break;
      case MessageType::episode_end:
        ++r.episodes;
        r.trace_hashes.push_back(parse_hex64(m->payload.at("trace_hash").get<std::string>()));
        break;
      case MessageType::error:
        ++r.errors;
        r.error_messages.push_back(m->payload.at("message").get<std::string>());
        break;
      default: break;
    }
  }
  return r;
}

}  // namespace synthsoc
