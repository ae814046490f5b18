#include "synthsoc/action.h"

#include <charconv>
#include <cmath>

namespace synthsoc {

namespace {

std::string_view kind_name(ActionKind k) {
  switch (k) {
    case ActionKind::noop: return "noop";
    case ActionKind::move: return "move";
    case ActionKind::pick: return "pick";
    case ActionKind::dump: return "dump";
    case ActionKind::synthesize: return "synthesize";
    case ActionKind::message: return "message";
    case ActionKind::select_group: return "select_group";
    case ActionKind::request: return "request";
    case ActionKind::propose: return "propose";
    case ActionKind::accept: return "accept";
    case ActionKind::decline: return "decline";
    case ActionKind::connect: return "connect";
    case ActionKind::disconnect: return "disconnect";
    case ActionKind::join: return "join";
    case ActionKind::leave: return "leave";
  }
  return "noop";
}

bool targets_agent(ActionKind k) {
  return k == ActionKind::message || k == ActionKind::request || k == ActionKind::connect ||
         k == ActionKind::disconnect;
}

bool targets_group(ActionKind k) {
  return k == ActionKind::select_group || k == ActionKind::join || k == ActionKind::leave;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string action_template(const Action& a, const ContentRegistry& reg) {
  std::string out(kind_name(a.kind));
  switch (a.kind) {
    case ActionKind::move: out += ":" + std::string(to_string(a.direction)); break;
    case ActionKind::pick:
    case ActionKind::dump: out += ":" + reg.resource(a.resource).name; break;
    default:
      if (targets_agent(a.kind)) out += ":" + agent_name(a.target);
      if (targets_group(a.kind)) out += ":" + group_name(a.target);
      break;
  }
  return out;
}

std::string encode_action(const Action& a, const ContentRegistry& reg) {
  if (a.kind == ActionKind::propose) return "propose:" + format_double(a.share);
  if (a.kind == ActionKind::message) return action_template(a, reg) + ":" + a.payload;
  return action_template(a, reg);
}

std::optional<Action> parse_action(std::string_view text, const ContentRegistry& reg) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  const bool has_arg = colon != std::string_view::npos;

  auto bare = [&](ActionKind k) -> std::optional<Action> {
    if (has_arg) return std::nullopt;
    Action a;
    a.kind = k;
    return a;
  };
  if (head == "noop") return bare(ActionKind::noop);
  if (head == "synthesize") return bare(ActionKind::synthesize);
  if (head == "accept") return bare(ActionKind::accept);
  if (head == "decline") return bare(ActionKind::decline);
  if (!has_arg) return std::nullopt;

  if (head == "move") {
    auto d = parse_direction(arg);
    if (!d) return std::nullopt;
    return Action::move(*d);
  }
  if (head == "pick" || head == "dump") {
    auto r = reg.find_resource(arg);
    if (!r || arg.empty()) return std::nullopt;
    return head == "pick" ? Action::pick(*r) : Action::dump(*r);
  }
  if (head == "propose") {
    double w = 0;
    auto res = std::from_chars(arg.data(), arg.data() + arg.size(), w);
    if (res.ec != std::errc() || res.ptr != arg.data() + arg.size() || !std::isfinite(w) || w < 0 || w > 1) {
      return std::nullopt;
    }
    return Action::propose(w);
  }
  if (head == "message") {
    const auto sep = arg.find(':');
    auto to = parse_agent_name(arg.substr(0, sep));
    if (!to) return std::nullopt;
    std::string payload = sep == std::string_view::npos ? std::string() : std::string(arg.substr(sep + 1));
    return Action::message(*to, std::move(payload));
  }
  static constexpr ActionKind kTargeted[] = {ActionKind::select_group, ActionKind::request, ActionKind::connect,
                                             ActionKind::disconnect,   ActionKind::join,    ActionKind::leave};
  for (ActionKind k : kTargeted) {
    if (head != kind_name(k)) continue;
    auto t = targets_agent(k) ? parse_agent_name(arg) : parse_group_name(arg);
    if (!t) return std::nullopt;
    return Action::with_target(k, *t);
  }
  return std::nullopt;
}

}  // namespace synthsoc
