#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "synthsoc/config.h"
#include "synthsoc/hash.h"
#include "synthsoc/harness/runner.h"
#include "synthsoc/harness/serialize.h"
#include "synthsoc/harness/server.h"
#include "synthsoc/oracle.h"
#include "synthsoc/trace.h"

using namespace synthsoc;

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpecSource {
  std::string config;
  std::string preset;
};

void add_spec_options(CLI::App* app, SpecSource& src) {
  auto* c = app->add_option("--config", src.config, "scenario document (JSON)");
  auto* p = app->add_option("--preset", src.preset, "built-in scenario name");
  c->excludes(p);
}

ScenarioSpec load_spec(const SpecSource& src) {
  if (src.config.empty() && src.preset.empty()) throw ConfigError("one of --config or --preset is required");
  std::string doc;
  if (!src.preset.empty()) {
    try {
      doc = preset_document(src.preset);
    } catch (const std::exception&) {
      std::string names;
      for (const auto& n : preset_names()) names += " " + n;
      throw ConfigError("unknown preset '" + src.preset + "'; known:" + names);
    }
  } else {
    std::ifstream in(src.config);
    if (!in) throw ConfigError("cannot read " + src.config);
    std::stringstream ss;
    ss << in.rdbuf();
    doc = ss.str();
  }
  auto parsed = parse_and_validate(doc);
  if (!parsed.ok()) {
    std::string msg = "invalid scenario:";
    for (const auto& v : parsed.violations) msg += "\n  " + v.to_string();
    throw ConfigError(msg);
  }
  return *parsed.spec;
}

std::vector<PolicyKind> parse_policies(const std::string& text) {
  std::vector<PolicyKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto k = parse_policy_kind(item);
    if (!k) throw ConfigError("unknown policy '" + item + "' (noop, random, greedy)");
    out.push_back(*k);
  }
  if (out.empty()) throw ConfigError("empty policy list");
  return out;
}

json oracle_json(const OracleInstance& inst, const OracleSolution& s) {
  json x = json::object(), bounds = json::object(), left = json::object();
  for (std::size_t e = 0; e < inst.events.size(); ++e) {
    x[inst.events[e].name] = s.x[e];
    bounds[inst.events[e].name] = inst.events[e].bound;
  }
  for (std::size_t i = 0; i < inst.resources.size(); ++i) left[inst.resources[i].name] = s.left[i];
  return {{"type", "oracle"},      {"objective", s.objective.to_string()}, {"objective_value", s.objective.to_double()},
          {"proven", s.proven},    {"nodes", s.nodes},                     {"x", x},
          {"bounds", bounds},      {"left", left}};
}

std::vector<EpisodeTrace> load_traces(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  return read_traces(in);
}

std::ostream* open_record(const std::string& path, std::ofstream& file) {
  if (path.empty()) return nullptr;
  file.open(path);
  if (!file) throw ConfigError("cannot write " + path);
  return &file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid-world synthesis and social-structure simulator"};
  app.require_subcommand(1);

  SpecSource src;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int episodes = 1;
  std::string record, policy = "random", trace_path;
  bool with_oracle = false;
  std::int64_t budget = 20'000'000;

  auto* validate = app.add_subcommand("validate", "check a scenario document");
  add_spec_options(validate, src);

  auto seed_opt = [&](CLI::App* sub) {
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& v) { seed = v, seed_given = true; }, "episode seed");
  };

  auto* run = app.add_subcommand("run", "run episodes in-process and print one summary per line");
  add_spec_options(run, src);
  seed_opt(run);
  run->add_option("--episodes", episodes, "number of episodes")->check(CLI::PositiveNumber);
  run->add_option("--record", record, "write traces here");
  run->add_option("--policy", policy, "noop|random|greedy, or a comma list with one per agent");
  run->add_flag("--oracle", with_oracle, "normalize rewards by the oracle objective");

  auto* oracle = app.add_subcommand("oracle", "solve the credit-maximization program for a scenario");
  add_spec_options(oracle, src);
  oracle->add_option("--budget", budget, "branch-and-bound node budget");

  ServeOptions serve_opt;
  auto* serve = app.add_subcommand("serve", "serve episodes over TCP");
  add_spec_options(serve, src);
  seed_opt(serve);
  serve->add_option("--episodes", episodes, "episodes per session")->check(CLI::PositiveNumber);
  serve->add_option("--record", record, "write traces here");
  serve->add_option("--host", serve_opt.host, "IPv4 address to bind");
  serve->add_option("--port", serve_opt.port, "port, 0 for any");
  serve->add_option("--timeout", serve_opt.action_timeout, "seconds per step, 0 waits indefinitely")
      ->check(CLI::NonNegativeNumber);

  auto* replay = app.add_subcommand("replay", "check a trace by re-running actions and applying deltas");
  replay->add_option("trace", trace_path, "trace file")->required();

  auto* summarize_cmd = app.add_subcommand("summarize", "metrics for every episode in a trace");
  summarize_cmd->add_option("trace", trace_path, "trace file")->required();
  summarize_cmd->add_flag("--oracle", with_oracle, "include oracle-normalized metrics");

  std::string bench_preset = "exploration";
  auto* bench = app.add_subcommand("bench", "engine throughput with scripted agents");
  bench->add_option("--preset", bench_preset, "built-in scenario name");
  seed_opt(bench);
  bench->add_option("--episodes", episodes, "episodes to time")->check(CLI::PositiveNumber);
  auto* bench_policy = bench->add_option("--policy", policy, "noop|random|greedy (default greedy)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (validate->parsed()) {
      const auto spec = load_spec(src);
      std::cout << "ok: " << spec.agent_count() << " agents, " << spec.height << "x" << spec.width << ", "
                << to_string(spec.scenario.kind) << ", " << spec.episode_length << " steps\n";
      return 0;
    }
    if (oracle->parsed()) {
      const auto spec = load_spec(src);
      const auto inst = build_instance(spec);
      std::cout << oracle_json(inst, solve(inst, budget)).dump() << '\n';
      return 0;
    }
    if (run->parsed()) {
      const auto spec = load_spec(src);
      const auto kinds = parse_policies(policy);
      if (kinds.size() != 1 && kinds.size() != static_cast<std::size_t>(spec.agent_count())) {
        throw ConfigError("--policy needs one kind or one per agent");
      }
      const std::uint64_t base = seed_given ? seed : spec.seed.value_or(0);
      std::optional<OracleSolution> sol;
      if (with_oracle) sol = solve(build_instance(spec));
      std::ofstream file;
      std::ostream* rec = open_record(record, file);
      for (int k = 0; k < episodes; ++k) {
        auto policies = make_policies(kinds, spec);
        auto out = run_episode(spec, policies, episode_seed(base, k), rec != nullptr, sol ? &*sol : nullptr);
        if (rec != nullptr) *rec << out.trace_text;
        json line = summary_to_json(out.summary);
        line["episode"] = k;
        line["seed"] = episode_seed(base, k);
        if (rec != nullptr) line["trace_hash"] = hex64(out.trace_hash);
        for (std::size_t a = 0; a < out.degraded.size(); ++a)
          if (out.degraded[a]) line["degraded"].push_back(agent_name(static_cast<AgentId>(a)));
        std::cout << line.dump() << '\n';
      }
      return 0;
    }
    if (serve->parsed()) {
      const auto spec = load_spec(src);
      std::ofstream file;
      serve_opt.record = open_record(record, file);
      serve_opt.seed = seed_given ? seed : spec.seed.value_or(0);
      serve_opt.episodes = episodes;
      serve_opt.log = &std::cerr;
      Server server(spec, serve_opt);
      std::cout << "listening " << serve_opt.host << ":" << server.port() << std::endl;
      const auto report = server.run();
      for (std::size_t k = 0; k < report.summaries.size(); ++k) {
        json line = summary_to_json(report.summaries[k]);
        line["episode"] = k;
        line["trace_hash"] = hex64(report.trace_hashes[k]);
        std::cout << line.dump() << '\n';
      }
      return 0;
    }
    if (replay->parsed()) {
      const auto traces = load_traces(trace_path);
      bool ok = !traces.empty();
      for (std::size_t k = 0; k < traces.size(); ++k) {
        const auto a = replay_actions(traces[k]);
        const auto d = replay_deltas(traces[k]);
        std::cout << "episode " << k << ": actions " << (a.ok ? "ok" : "MISMATCH " + a.message) << ", deltas "
                  << (d.ok ? "ok" : "MISMATCH " + d.message) << ", " << a.steps << " steps, final "
                  << hex64(a.final_state_hash) << '\n';
        ok = ok && a.ok && d.ok;
      }
      return ok ? 0 : kRuntimeError;
    }
    if (summarize_cmd->parsed()) {
      for (const auto& t : load_traces(trace_path)) {
        std::optional<OracleSolution> sol;
        if (with_oracle) {
          auto parsed = parse_and_validate(t.header.spec_document);
          sol = solve(build_instance(*parsed.spec));
        }
        std::cout << summary_to_json(summarize(t, sol ? &*sol : nullptr)).dump() << '\n';
      }
      return 0;
    }
    if (bench->parsed()) {
      const auto spec = load_spec({"", bench_preset});
      const auto kinds = parse_policies(bench_policy->count() > 0 ? policy : "greedy");
      const auto r = measure_throughput(spec, kinds.front(), seed, episodes);
      std::cout << json{{"type", "bench"},
                        {"preset", bench_preset},
                        {"policy", std::string(to_string(kinds.front()))},
                        {"agents", spec.agent_count()},
                        {"steps", r.steps},
                        {"seconds", r.seconds},
                        {"steps_per_second", r.steps_per_second()}}
                       .dump()
                << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
