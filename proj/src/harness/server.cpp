#include "synthsoc/harness/server.h"

#include <poll.h>

#include <chrono>
#include <cmath>

#include "synthsoc/engine.h"
#include "synthsoc/hash.h"
#include "synthsoc/harness/protocol.h"
#include "synthsoc/harness/runner.h"
#include "synthsoc/harness/serialize.h"

namespace synthsoc {

namespace {

enum class Role { pending, agent, spectator };

struct Conn {
  LineChannel ch;
  Role role = Role::pending;
  AgentId agent = -1;
};

using Clock = std::chrono::steady_clock;

}  // namespace

struct Server::Impl {
  ScenarioSpec spec;
  ServeOptions opt;
  Socket listener;
  json spec_json;
  int n = 0;
  std::vector<std::unique_ptr<Conn>> conns;
  std::vector<Conn*> agent_conn;
  std::vector<bool> gone;
  ServeReport report;

  // Current barrier.
  const Engine* engine = nullptr;
  bool collecting = false;
  std::int64_t episode = -1;
  std::int64_t step = -1;
  std::vector<Action> actions;
  std::vector<bool> responded, accepted;

  void log(const std::string& line) {
    if (opt.log != nullptr) *opt.log << line << '\n';
  }

  void drop(Conn& c) {
    if (c.role == Role::agent) {
      const auto a = static_cast<std::size_t>(c.agent);
      if (agent_conn[a] == &c) {
        agent_conn[a] = nullptr;
        gone[a] = true;
        log(agent_name(c.agent) + " disconnected");
      }
    }
    c.ch.close();
  }

  void send(Conn& c, const ProtocolMessage& m) {
    if (!c.ch.open()) return;
    if (m.type == MessageType::error) ++report.errors_sent;
    try {
      c.ch.send_line(encode_message(m));
    } catch (const NetError&) {
      drop(c);
    }
  }

  void refuse(Conn& c, const std::string& why) {
    send(c, make_error(why));
    c.ch.close();
  }

  ProtocolMessage hello_ack(std::optional<AgentId> agent) const {
    ProtocolMessage m;
    m.type = MessageType::hello;
    if (agent) m.agent = agent_name(*agent);
    m.payload = {{"version", kProtocolVersion},
                 {"role", agent ? "agent" : "spectator"},
                 {"agents", n},
                 {"spec", spec_json}};
    return m;
  }

  void handle_hello(Conn& c, const ProtocolMessage& m) {
    if (m.type != MessageType::hello) return refuse(c, "expected hello");
    const auto& version = m.payload["version"];
    if (!version.is_number_integer() || version.get<int>() != kProtocolVersion) {
      return refuse(c, "protocol version mismatch: server speaks " + std::to_string(kProtocolVersion));
    }
    const std::string role = m.payload.value("role", "agent");
    if (role == "spectator") {
      c.role = Role::spectator;
      send(c, hello_ack(std::nullopt));
      return;
    }
    if (role != "agent") return refuse(c, "unknown role '" + role + "'");
    const auto a = m.agent ? parse_agent_name(*m.agent) : std::nullopt;
    if (!a || *a >= n) return refuse(c, "unknown agent '" + m.agent.value_or("") + "'");
    const auto idx = static_cast<std::size_t>(*a);
    if (agent_conn[idx] != nullptr) return refuse(c, "duplicate agent " + agent_name(*a));
    if (gone[idx]) return refuse(c, agent_name(*a) + " disconnected and no-ops for the rest of the session");
    c.role = Role::agent;
    c.agent = *a;
    agent_conn[idx] = &c;
    send(c, hello_ack(*a));
    log(agent_name(*a) + " connected");
  }

  // Malformed input from an agent during a barrier counts as its (no-op) action.
  void count_as_noop(Conn& c) {
    const auto a = static_cast<std::size_t>(c.agent);
    if (collecting && !responded[a]) {
      responded[a] = true;
      accepted[a] = false;
      actions[a] = Action::noop();
    }
  }

  ProtocolMessage agent_error(const Conn& c, std::string what) const {
    return episode < 0 ? make_error(std::move(what), std::nullopt, std::nullopt, agent_name(c.agent))
                       : make_error(std::move(what), episode, step, agent_name(c.agent));
  }

  void handle_agent(Conn& c, const std::string& line) {
    ProtocolMessage m;
    try {
      m = decode_message(line);
    } catch (const ProtocolError& e) {
      send(c, agent_error(c, e.what()));
      return count_as_noop(c);
    }
    if (m.type != MessageType::action) {
      send(c, agent_error(c, "unexpected " + std::string(to_string(m.type))));
      return count_as_noop(c);
    }
    if (*m.agent != agent_name(c.agent)) {
      send(c, agent_error(c, "action for another agent"));
      return count_as_noop(c);
    }
    if (!collecting || *m.episode != episode || *m.step != step) {
      send(c, agent_error(c, "stale step"));
      return;
    }
    const auto a = static_cast<std::size_t>(c.agent);
    if (responded[a]) {
      send(c, agent_error(c, "duplicate action"));
      return;
    }
    const auto text = m.payload["action"].get<std::string>();
    auto act = parse_action(text, engine->registry());
    if (!act) {
      send(c, agent_error(c, "malformed action '" + text + "'"));
      return count_as_noop(c);
    }
    responded[a] = true;
    actions[a] = *act;
    accepted[a] = engine->is_legal(c.agent, *act);
  }

  void handle_line(Conn& c, const std::string& line) {
    if (c.role == Role::pending) {
      try {
        handle_hello(c, decode_message(line));
      } catch (const ProtocolError& e) {
        refuse(c, e.what());
      }
    } else if (c.role == Role::agent) {
      handle_agent(c, line);
    } else {
      send(c, make_error("spectators cannot act"));
    }
  }

  void poll_once(int timeout_ms) {
    std::vector<pollfd> fds{{listener.fd(), POLLIN, 0}};
    std::vector<Conn*> owners{nullptr};
    for (auto& c : conns) {
      if (!c->ch.open()) continue;
      fds.push_back({c->ch.fd(), POLLIN, 0});
      owners.push_back(c.get());
    }
    int rc;
    do {
      rc = ::poll(fds.data(), fds.size(), timeout_ms);
    } while (rc < 0 && errno == EINTR);
    if (rc <= 0) return;
    for (std::size_t i = 1; i < fds.size(); ++i) {
      if ((fds[i].revents & (POLLIN | POLLHUP | POLLERR)) == 0) continue;
      Conn& c = *owners[i];
      bool alive;
      try {
        alive = c.ch.fill();
      } catch (const NetError&) {
        alive = false;
      }
      while (c.ch.open()) {
        auto line = c.ch.pop_line();
        if (!line) break;
        handle_line(c, *line);
      }
      if (!alive) drop(c);
    }
    if (fds[0].revents & POLLIN) {
      conns.push_back(std::make_unique<Conn>());
      conns.back()->ch = LineChannel(accept_connection(listener));
    }
    std::erase_if(conns, [](const auto& c) { return !c->ch.open(); });
  }

  bool all_registered() const {
    for (int a = 0; a < n; ++a)
      if (agent_conn[static_cast<std::size_t>(a)] == nullptr && !gone[static_cast<std::size_t>(a)]) return false;
    return true;
  }

  bool all_responded() const {
    for (int a = 0; a < n; ++a) {
      const auto i = static_cast<std::size_t>(a);
      if (!responded[i] && agent_conn[i] != nullptr) return false;
    }
    return true;
  }

  void broadcast(const ProtocolMessage& m) {
    for (auto& c : conns)
      if (c->role != Role::pending) send(*c, m);
  }

  void run_episode(std::int64_t k) {
    const auto seed = episode_seed(opt.seed, k);
    Engine eng(spec);
    engine = &eng;
    auto obs = eng.reset(seed);
    EpisodeRecorder rec(true);
    rec.begin(eng);
    episode = k;

    ProtocolMessage reset;
    reset.type = MessageType::reset;
    reset.episode = k;
    reset.payload = {{"seed", seed}};
    broadcast(reset);

    const auto& reg = eng.registry();
    while (!eng.done()) {
      step = eng.t();
      actions.assign(static_cast<std::size_t>(n), Action::noop());
      responded.assign(static_cast<std::size_t>(n), false);
      accepted.assign(static_cast<std::size_t>(n), false);
      collecting = true;
      for (int a = 0; a < n; ++a) {
        Conn* c = agent_conn[static_cast<std::size_t>(a)];
        if (c == nullptr) continue;
        ProtocolMessage m;
        m.type = MessageType::observation;
        m.episode = k;
        m.step = step;
        m.agent = agent_name(a);
        m.payload = {{"observation", observation_to_json(obs[static_cast<std::size_t>(a)], reg)}};
        send(*c, m);
      }
      const auto deadline = Clock::now() + std::chrono::duration<double>(opt.action_timeout);
      std::vector<bool> timed_out(static_cast<std::size_t>(n), false);
      while (!all_responded()) {
        int wait = -1;
        if (opt.action_timeout > 0) {
          const auto left = std::chrono::duration<double, std::milli>(deadline - Clock::now()).count();
          if (left <= 0) {
            for (int a = 0; a < n; ++a) {
              const auto i = static_cast<std::size_t>(a);
              if (!responded[i] && agent_conn[i] != nullptr) {
                timed_out[i] = true;
                ++report.timeouts;
              }
            }
            break;
          }
          wait = static_cast<int>(std::ceil(left));
        }
        poll_once(wait);
      }
      collecting = false;

      StepResult res = eng.step(actions);
      rec.record(eng, res);

      for (int a = 0; a < n; ++a) {
        const auto i = static_cast<std::size_t>(a);
        Conn* c = agent_conn[i];
        if (c == nullptr) continue;
        ProtocolMessage m;
        m.type = MessageType::step_result;
        m.episode = k;
        m.step = step;
        m.agent = agent_name(a);
        m.payload = {{"accepted", accepted[i]},
                     {"outcome", res.outcome[i]},
                     {"raw", res.raw[i].to_string()},
                     {"shared", res.shared[i]},
                     {"done", res.done}};
        if (timed_out[i]) m.payload["timeout"] = true;
        send(*c, m);
      }
      ProtocolMessage spect;
      spect.type = MessageType::step_result;
      spect.episode = k;
      spect.step = step;
      json raw = json::array();
      for (const auto& r : res.raw) raw.push_back(r.to_string());
      spect.payload = {{"outcome", res.outcome}, {"raw", raw}, {"shared", res.shared}, {"done", res.done}};
      for (auto& c : conns)
        if (c->role == Role::spectator) send(*c, spect);
      obs = std::move(res.observations);
    }

    const EpisodeSummary summary = rec.finish(opt.oracle);
    const std::string text = rec.text();
    const auto hash = fnv1a(text);
    if (opt.record != nullptr) *opt.record << text << std::flush;
    report.summaries.push_back(summary);
    report.trace_hashes.push_back(hash);

    ProtocolMessage end;
    end.type = MessageType::episode_end;
    end.episode = k;
    end.payload = {{"summary", summary_to_json(summary)}, {"trace_hash", hex64(hash)}};
    broadcast(end);
    engine = nullptr;
  }
};

Server::Server(ScenarioSpec spec, ServeOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->spec = std::move(spec);
  impl_->opt = std::move(options);
  impl_->n = impl_->spec.agent_count();
  impl_->spec_json = json::parse(serialize_scenario(impl_->spec));
  impl_->agent_conn.assign(static_cast<std::size_t>(impl_->n), nullptr);
  impl_->gone.assign(static_cast<std::size_t>(impl_->n), false);
  impl_->listener = listen_tcp(impl_->opt.host, impl_->opt.port);
  port_ = local_port(impl_->listener);
}

Server::~Server() = default;

ServeReport Server::run() {
  auto& s = *impl_;
  s.report = ServeReport{};
  while (!s.all_registered()) s.poll_once(-1);
  for (int k = 0; k < s.opt.episodes; ++k) s.run_episode(k);
  s.conns.clear();
  s.listener.close();
  return s.report;
}

}  // namespace synthsoc
