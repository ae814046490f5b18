#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "synthsoc/engine.h"
#include "synthsoc/metrics.h"
#include "synthsoc/trace.h"

namespace synthsoc {

using json = nlohmann::json;

// Inverse of hex64; throws std::invalid_argument.
std::uint64_t parse_hex64(const std::string& text);

json graph_to_json(const SocialGraph& g);
SocialGraph graph_from_json(const json& j);

json observation_to_json(const Observation& o, const ContentRegistry& reg);
Observation observation_from_json(const json& j, const ContentRegistry& reg);

json header_to_json(const TraceHeader& h);
TraceHeader header_from_json(const json& j);
json step_to_json(const TraceStep& s, const ContentRegistry& reg);
TraceStep step_from_json(const json& j, const ContentRegistry& reg);

json summary_to_json(const EpisodeSummary& s);

}  // namespace synthsoc
