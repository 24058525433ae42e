#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "procaware/model.hpp"

namespace procaware {

struct DirectlyFollowsGraph {
    std::map<std::string, std::size_t> activities;
    std::map<std::pair<std::string, std::string>, std::size_t> edges;
    std::map<std::string, std::size_t> starts;
    std::map<std::string, std::size_t> ends;

    [[nodiscard]] std::size_t edge_total() const;

    friend bool operator==(DirectlyFollowsGraph const&, DirectlyFollowsGraph const&) = default;
};

struct Trace {
    std::string case_id;
    std::vector<std::string> labels;
};

/// Rows grouped by case (cases in order of first appearance), each trace
/// ordered by event timestamp; rows failing `lifecycle_filter` are dropped
/// and traces left empty are omitted.
std::vector<Trace> build_traces(std::vector<EnrichedLogRow> const& log,
                                std::optional<Lifecycle> lifecycle_filter = std::nullopt);

/// Throws Error("EmptyLog") when `log` has no rows. A filter that removes
/// every row yields an empty graph.
DirectlyFollowsGraph mine_dfg(std::vector<EnrichedLogRow> const& log,
                              std::optional<Lifecycle> lifecycle_filter = std::nullopt);

/// Nodes are `label (freq)` plus the artificial start/end nodes; everything
/// is emitted in lexicographic order.
std::string export_dfg_dot(DirectlyFollowsGraph const& g);

}  // namespace procaware
