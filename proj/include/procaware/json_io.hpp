#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <vector>

#include "procaware/abstraction.hpp"
#include "procaware/mining.hpp"
#include "procaware/topology.hpp"

namespace procaware::json_io {

using nlohmann::json;

json to_json(Rational const& r);  // {"value": 2.5, "exact": "5/2"}
json to_json(std::vector<TopologyRow> const& rows);
json to_json(TopologyTrace const& trace);
json to_json(JointChangeTable const& jc);
json to_json(std::vector<CandidateEvent> const& events);
json to_json(std::vector<ProcessEvent> const& events);
json to_json(DirectlyFollowsGraph const& g);
json to_json(AbstractionConfig const& cfg);
json to_json(CorrelationStrategy const& s);

/// `{depth | sensors, labels:[{group|signature, label}], lifecycle_overrides:[{timestamp, lifecycle}]}`.
/// `overrides` is accepted as an alias of `lifecycle_overrides`.
AbstractionConfig parse_abstraction_config(json const& doc);
/// `{strategy: "single_case" | "gap" | "key_cycle", gap?, sensor?, reset_code?}`.
CorrelationStrategy parse_correlation(json const& doc);
/// "start" | "complete" | "unknown" | "all" (no filter).
std::optional<Lifecycle> parse_lifecycle_filter(std::string_view text);

}  // namespace procaware::json_io
