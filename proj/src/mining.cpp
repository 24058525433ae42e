#include "procaware/mining.hpp"

#include <algorithm>
#include <numeric>

#include "procaware/error.hpp"

namespace procaware {

std::size_t DirectlyFollowsGraph::edge_total() const {
    return std::accumulate(edges.begin(), edges.end(), std::size_t{0},
                           [](std::size_t acc, auto const& e) { return acc + e.second; });
}

std::vector<Trace> build_traces(std::vector<EnrichedLogRow> const& log, std::optional<Lifecycle> lifecycle_filter) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<EnrichedLogRow const*>> by_case;
    for (auto const& row : log) {
        auto [it, inserted] = by_case.try_emplace(row.case_id());
        if (inserted) order.push_back(row.case_id());
        if (!lifecycle_filter || row.lifecycle() == *lifecycle_filter) it->second.push_back(&row);
    }
    std::vector<Trace> traces;
    for (auto const& id : order) {
        auto& rows = by_case[id];
        if (rows.empty()) continue;
        std::stable_sort(rows.begin(), rows.end(), [](EnrichedLogRow const* a, EnrichedLogRow const* b) {
            return a->event_timestamp() < b->event_timestamp();
        });
        Trace t{id, {}};
        for (auto const* r : rows) t.labels.push_back(r->label());
        traces.push_back(std::move(t));
    }
    return traces;
}

DirectlyFollowsGraph mine_dfg(std::vector<EnrichedLogRow> const& log, std::optional<Lifecycle> lifecycle_filter) {
    if (log.empty()) throw Error("EmptyLog", "cannot mine an empty log");
    DirectlyFollowsGraph g;
    for (auto const& trace : build_traces(log, lifecycle_filter)) {
        auto const& labels = trace.labels;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            ++g.activities[labels[i]];
            if (i > 0) ++g.edges[{labels[i - 1], labels[i]}];
        }
        ++g.starts[labels.front()];
        ++g.ends[labels.back()];
    }
    return g;
}

namespace {

std::string quoted(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

constexpr std::string_view kStart = "▶";
constexpr std::string_view kEnd = "■";

}  // namespace

std::string export_dfg_dot(DirectlyFollowsGraph const& g) {
    std::string out = "digraph dfg {\n  rankdir=LR;\n";
    out += "  " + quoted(kStart) + " [shape=circle];\n";
    out += "  " + quoted(kEnd) + " [shape=square];\n";
    for (auto const& [label, freq] : g.activities) {
        out += "  " + quoted(label) + " [shape=box, label=" + quoted(label + " (" + std::to_string(freq) + ")") +
               "];\n";
    }
    for (auto const& [label, count] : g.starts) {
        out += "  " + quoted(kStart) + " -> " + quoted(label) + " [label=\"" + std::to_string(count) + "\"];\n";
    }
    for (auto const& [edge, count] : g.edges) {
        out += "  " + quoted(edge.first) + " -> " + quoted(edge.second) + " [label=\"" + std::to_string(count) +
               "\"];\n";
    }
    for (auto const& [label, count] : g.ends) {
        out += "  " + quoted(label) + " -> " + quoted(kEnd) + " [label=\"" + std::to_string(count) + "\"];\n";
    }
    out += "}\n";
    return out;
}

}  // namespace procaware
