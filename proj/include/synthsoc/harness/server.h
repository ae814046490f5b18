#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "synthsoc/config.h"
#include "synthsoc/harness/net.h"
#include "synthsoc/metrics.h"
#include "synthsoc/oracle.h"

namespace synthsoc {

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 0;                 // 0: ephemeral, see Server::port()
  double action_timeout = 30;   // seconds per step; 0 waits indefinitely
  int episodes = 1;             // persistent clients get a reset between episodes
  std::uint64_t seed = 0;       // episode k runs with episode_seed(seed, k)
  std::ostream* record = nullptr;  // trace text of every episode, in order
  const OracleSolution* oracle = nullptr;
  std::ostream* log = nullptr;
};

struct ServeReport {
  std::vector<EpisodeSummary> summaries;
  std::vector<std::uint64_t> trace_hashes;
  std::int64_t errors_sent = 0;
  std::int64_t timeouts = 0;
};

// Lockstep server: waits for one connection per agent (spectators may join at
// any time), then per step sends every connected agent its observation,
// waits for all actions or the timeout, and advances the engine. A single
// thread polls every connection.
class Server {
 public:
  Server(ScenarioSpec spec, ServeOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  int port() const { return port_; }
  // Blocks until every episode has finished; closes all connections.
  ServeReport run();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace synthsoc
