#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "synthsoc/config.h"
#include "synthsoc/world.h"

namespace synthsoc {

enum class ActionKind : std::uint8_t {
  noop,
  move,
  pick,
  dump,
  synthesize,
  message,
  // contract
  select_group,
  // negotiation
  request,
  propose,
  accept,
  decline,
  // exploration
  connect,
  disconnect,
  join,
  leave,
};

inline constexpr std::size_t kMaxMessageBytes = 1024;

struct Action {
  ActionKind kind = ActionKind::noop;
  Direction direction = Direction::stay;
  ResourceId resource = -1;  // pick, dump
  int target = -1;           // agent for message/request/connect, group for select_group/join/leave
  double share = 0.0;        // propose: the actor's own side share
  std::string payload;       // message

  static Action noop() { return {}; }
  static Action move(Direction d) { return make(ActionKind::move, [&](Action& a) { a.direction = d; }); }
  static Action pick(ResourceId r) { return make(ActionKind::pick, [&](Action& a) { a.resource = r; }); }
  static Action dump(ResourceId r) { return make(ActionKind::dump, [&](Action& a) { a.resource = r; }); }
  static Action synthesize() { return make(ActionKind::synthesize); }
  static Action message(AgentId to, std::string payload) {
    return make(ActionKind::message, [&](Action& a) {
      a.target = to;
      a.payload = std::move(payload);
    });
  }
  static Action with_target(ActionKind kind, int target) { return make(kind, [&](Action& a) { a.target = target; }); }
  static Action propose(double share) { return make(ActionKind::propose, [&](Action& a) { a.share = share; }); }
  static Action accept() { return make(ActionKind::accept); }
  static Action decline() { return make(ActionKind::decline); }

  bool physical() const {
    return kind == ActionKind::move || kind == ActionKind::pick || kind == ActionKind::dump ||
           kind == ActionKind::synthesize;
  }
  bool social() const { return kind >= ActionKind::select_group; }

  friend bool operator==(const Action&, const Action&) = default;

 private:
  template <typename F = void (*)(Action&)>
  static Action make(ActionKind kind, F&& set = [](Action&) {}) {
    Action a;
    a.kind = kind;
    set(a);
    return a;
  }
};

// Text form used by traces and the wire protocol:
//   noop | move:N|S|E|W|stay | pick:<res> | dump:<res> | synthesize |
//   message:<agent>:<payload> | select_group:<group> | request:<agent> |
//   propose:<share> | accept | decline | connect:<agent> | disconnect:<agent> |
//   join:<group> | leave:<group>
std::string encode_action(const Action& a, const ContentRegistry& reg);
std::optional<Action> parse_action(std::string_view text, const ContentRegistry& reg);

// The template an action instantiates; legal-action lists hold templates.
// Only propose and message carry arguments beyond the template
// ("propose", "message:a2").
std::string action_template(const Action& a, const ContentRegistry& reg);

// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace synthsoc
