#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "procaware/annotate.hpp"
#include "procaware/model.hpp"
#include "procaware/rational.hpp"

namespace procaware {

// ---------------------------------------------------------------------------
// Grouping and ranking
// ---------------------------------------------------------------------------

struct GroupId {
    std::string gid;
    std::string name;

    friend bool operator==(GroupId const& a, GroupId const& b) { return a.gid == b.gid; }
};

struct SensorGroup {
    GroupId id;
    std::vector<SensorId> members;  // sorted, unique
};

/// Groups ordered by gid. A sensor may sit in several groups; sensors in no
/// group are simply not part of any topology.
class SensorGrouping {
public:
    SensorGrouping() = default;
    explicit SensorGrouping(std::vector<SensorGroup> groups);

    [[nodiscard]] std::vector<SensorGroup> const& groups() const noexcept { return groups_; }
    [[nodiscard]] SensorGroup const* find(std::string_view gid) const;
    [[nodiscard]] std::vector<SensorGroup const*> groups_of(SensorId const& sensor) const;
    [[nodiscard]] bool contains(SensorId const& sensor) const;
    [[nodiscard]] std::vector<SensorId> sensors() const;

private:
    std::vector<SensorGroup> groups_;
};

/// `known` (when non-empty) is the set of legal sensor ids; anything else is
/// Error("UnknownSensor").
SensorGrouping parse_grouping(std::string_view json_text, std::vector<SensorId> const& known = {});
SensorGrouping load_grouping(std::filesystem::path const& path, std::vector<SensorId> const& known = {});
std::string emit_grouping(SensorGrouping const& grouping);

enum class RankStrategy { type_heuristic, cardinality };

RankStrategy parse_rank_strategy(std::string_view text);

/// Per-group rank of each member, 1 = most significant.
class SensorRanking {
public:
    void set(std::string const& gid, SensorId const& sensor, int rank);
    [[nodiscard]] std::optional<int> rank(std::string const& gid, SensorId const& sensor) const;
    [[nodiscard]] std::map<std::pair<std::string, SensorId>, int> const& entries() const noexcept { return ranks_; }

    friend bool operator==(SensorRanking const&, SensorRanking const&) = default;

private:
    std::map<std::pair<std::string, SensorId>, int> ranks_;
};

/// type_heuristic: binary target -> 1, rule-mapped discrete -> 2, left
/// continuous (auto-discretized) -> 3. cardinality additionally splits ties
/// by the number of distinct target symbols, fewer first (dense ranks).
SensorRanking rank_sensors(SensorGrouping const& grouping, AnnotationSet const& annotations,
                           RankStrategy strategy = RankStrategy::type_heuristic);

struct RankOverride {
    std::string gid;
    SensorId sensor;
    int rank = 1;
};

std::vector<RankOverride> parse_ranking_override(std::string_view json_text);
/// Replaces the listed entries; each (gid, sensor) must be a real membership.
void apply_rank_overrides(SensorRanking& ranking, SensorGrouping const& grouping,
                          std::vector<RankOverride> const& overrides);

// ---------------------------------------------------------------------------
// Joint changes
// ---------------------------------------------------------------------------

struct SensorChange {
    std::uint32_t sensor = 0;  // index into JointChangeTable::sensors()
    Timestamp timestamp = 0;   // when this sensor changed
    int code = 0;              // symbol after the change

    friend bool operator==(SensorChange const&, SensorChange const&) = default;
};

/// Timestamp-ordered joint-change entries stored flat (CSR layout) so that
/// tens of millions of changes stay compact. Every individual change is kept;
/// an entry's sensor set is the distinct sensors among its changes.
class JointChangeTable {
public:
    JointChangeTable() = default;
    /// `changes` must be sorted by (timestamp, sensor); they are clustered
    /// greedily: the earliest unassigned change anchors an entry that absorbs
    /// every change within `window` ticks of it.
    JointChangeTable(std::vector<SensorId> sensors, Timestamp window, std::vector<SensorChange> changes);

    [[nodiscard]] std::vector<SensorId> const& sensors() const noexcept { return sensors_; }
    [[nodiscard]] Timestamp window() const noexcept { return window_; }
    [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
    [[nodiscard]] bool empty() const noexcept { return times_.empty(); }
    [[nodiscard]] std::size_t total_changes() const noexcept { return changes_.size(); }

    [[nodiscard]] Timestamp timestamp(std::size_t entry) const { return times_[entry]; }
    [[nodiscard]] std::span<SensorChange const> changes(std::size_t entry) const;
    /// Distinct sensor indices of an entry, ascending.
    [[nodiscard]] std::vector<std::uint32_t> sensor_indices(std::size_t entry) const;
    [[nodiscard]] std::vector<SensorId> sensors_at(std::size_t entry) const;
    [[nodiscard]] std::size_t alpha(std::size_t entry) const { return sensor_indices(entry).size(); }
    [[nodiscard]] std::optional<std::size_t> find(Timestamp t) const;

private:
    std::vector<SensorId> sensors_;
    Timestamp window_ = 0;
    std::vector<Timestamp> times_;
    std::vector<std::size_t> offsets_{0};
    std::vector<SensorChange> changes_;
};

/// Per-stream change instants: a symbol differing from the stream's previous
/// symbol. The first point of a stream is never a change.
std::vector<Timestamp> change_timestamps(DiscreteStream const& stream);

JointChangeTable detect_joint_changes(std::span<DiscreteStream const> streams, Timestamp window);

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

/// Which group's ranks apply to a set of co-changing sensors.
struct GroupResolution {
    /// One gid when a group contains every sensor; otherwise every group any
    /// of the sensors belongs to (their ranks are averaged per sensor).
    std::vector<std::string> gids;
    bool averaged = false;

    [[nodiscard]] std::string joined() const;
};

/// Smallest group containing all sensors (ties: lexicographic gid); if no
/// group contains them all, falls back to per-sensor averaging.
/// Throws Error("UngroupedSensor") for a sensor in no group.
GroupResolution resolve_group(std::vector<SensorId> const& sensors, SensorGrouping const& grouping);

struct TopologyRow {
    SensorId sensor;
    double importance = 0.0;
    Rational wsr_sum;
    std::size_t occurrence_count = 0;
    std::vector<Timestamp> timestamps;

    [[nodiscard]] Rational importance_exact() const {
        return wsr_sum / Rational(static_cast<std::int64_t>(occurrence_count));
    }
};

struct TraceTerm {
    SensorId sensor;
    Rational sensor_rank;  // possibly a cross-group mean
    Rational weighted;     // alpha / sensor_rank
};

struct TraceRecord {
    Timestamp timestamp = 0;
    std::size_t alpha = 0;
    GroupResolution gamma;
    std::vector<TraceTerm> terms;
};

struct TopologyTrace {
    std::vector<TraceRecord> records;

    [[nodiscard]] TraceRecord const* at(Timestamp t) const;
    /// Weighted rank of `sensor` at `t`; zero when it did not change there.
    [[nodiscard]] Rational weighted(Timestamp t, SensorId const& sensor) const;
};

struct TopologyOptions {
    /// The trace holds one record per entry; turn it off for very large tables.
    bool record_trace = true;
};

struct TopologyResult {
    std::vector<TopologyRow> rows;  // importance descending
    TopologyTrace trace;
};

/// Weighted sensor ranking per entry (alpha / rank), summed per sensor and
/// divided by the sensor's occurrence count. Ties in importance go to the
/// better best-group rank, then the sensor id.
TopologyResult compute_topology(JointChangeTable const& jc, SensorGrouping const& grouping,
                                SensorRanking const& ranking, TopologyOptions const& options = {});

/// `sensor_id,importance,wsr_sum,occurrences,timestamps` with timestamps
/// joined by ';'.
std::string topology_to_csv(std::vector<TopologyRow> const& rows);

}  // namespace procaware
