#include "procaware/topology.hpp"

#include <algorithm>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>

#include "procaware/error.hpp"
#include "procaware/text.hpp"

namespace procaware {

using nlohmann::json;

SensorGrouping::SensorGrouping(std::vector<SensorGroup> groups) : groups_(std::move(groups)) {
    std::set<std::string> gids;
    for (auto& g : groups_) {
        if (g.id.gid.empty()) throw Error("SchemaError", "group id must be non-empty");
        if (!gids.insert(g.id.gid).second) throw Error("SchemaError", "duplicate group id " + g.id.gid);
        if (g.members.empty()) throw Error("EmptyGroup", g.id.gid);
        std::sort(g.members.begin(), g.members.end());
        g.members.erase(std::unique(g.members.begin(), g.members.end()), g.members.end());
    }
    std::sort(groups_.begin(), groups_.end(),
              [](SensorGroup const& a, SensorGroup const& b) { return a.id.gid < b.id.gid; });
}

SensorGroup const* SensorGrouping::find(std::string_view gid) const {
    for (auto const& g : groups_) {
        if (g.id.gid == gid) return &g;
    }
    return nullptr;
}

std::vector<SensorGroup const*> SensorGrouping::groups_of(SensorId const& sensor) const {
    std::vector<SensorGroup const*> out;
    for (auto const& g : groups_) {
        if (std::binary_search(g.members.begin(), g.members.end(), sensor)) out.push_back(&g);
    }
    return out;
}

bool SensorGrouping::contains(SensorId const& sensor) const {
    return !groups_of(sensor).empty();
}

std::vector<SensorId> SensorGrouping::sensors() const {
    std::set<SensorId> all;
    for (auto const& g : groups_) all.insert(g.members.begin(), g.members.end());
    return {all.begin(), all.end()};
}

SensorGrouping parse_grouping(std::string_view json_text, std::vector<SensorId> const& known) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("groups") || !doc["groups"].is_array()) {
        throw Error("SchemaError", "groups");
    }
    std::vector<SensorGroup> groups;
    for (auto const& g : doc["groups"]) {
        if (!g.is_object() || !g.contains("gid") || !g["gid"].is_string()) throw Error("SchemaError", "groups[].gid");
        SensorGroup group{{g["gid"].get<std::string>(), g.value("name", "")}, {}};
        if (!g.contains("sensors") || !g["sensors"].is_array()) throw Error("SchemaError", "groups[].sensors");
        for (auto const& s : g["sensors"]) {
            if (!s.is_string()) throw Error("SchemaError", "groups[].sensors[]");
            SensorId id(s.get<std::string>());
            if (!known.empty() && std::find(known.begin(), known.end(), id) == known.end()) {
                throw Error("UnknownSensor", id.str() + " in group " + group.id.gid);
            }
            group.members.push_back(std::move(id));
        }
        if (group.members.empty()) throw Error("EmptyGroup", group.id.gid);
        groups.push_back(std::move(group));
    }
    return SensorGrouping(std::move(groups));
}

SensorGrouping load_grouping(std::filesystem::path const& path, std::vector<SensorId> const& known) {
    return parse_grouping(text::read_file(path), known);
}

std::string emit_grouping(SensorGrouping const& grouping) {
    json doc{{"groups", json::array()}};
    for (auto const& g : grouping.groups()) {
        json members = json::array();
        for (auto const& m : g.members) members.push_back(m.str());
        doc["groups"].push_back({{"gid", g.id.gid}, {"name", g.id.name}, {"sensors", members}});
    }
    return doc.dump(2) + "\n";
}

RankStrategy parse_rank_strategy(std::string_view text) {
    if (text == "type_heuristic") return RankStrategy::type_heuristic;
    if (text == "cardinality") return RankStrategy::cardinality;
    throw Error("SchemaError", "rank strategy \"" + std::string(text) + "\"");
}

void SensorRanking::set(std::string const& gid, SensorId const& sensor, int rank) {
    if (rank < 1) throw Error("InvalidRank", gid + "/" + sensor.str() + " rank must be >= 1");
    ranks_[{gid, sensor}] = rank;
}

std::optional<int> SensorRanking::rank(std::string const& gid, SensorId const& sensor) const {
    auto it = ranks_.find({gid, sensor});
    if (it == ranks_.end()) return std::nullopt;
    return it->second;
}

SensorRanking rank_sensors(SensorGrouping const& grouping, AnnotationSet const& annotations, RankStrategy strategy) {
    SensorRanking ranking;
    for (auto const& g : grouping.groups()) {
        std::vector<std::pair<std::pair<int, std::size_t>, SensorId>> keyed;
        for (auto const& member : g.members) {
            auto it = annotations.find(member);
            if (it == annotations.end()) throw Error("MissingAnnotation", member.str());
            auto const& ann = it->second;
            int base = 2;
            if (ann.is_auto()) {
                base = 3;
            } else if (ann.target_type() == TargetType::binary) {
                base = 1;
            }
            std::size_t cardinality = strategy == RankStrategy::cardinality ? ann.symbols().size() : 0;
            keyed.push_back({{base, cardinality}, member});
        }
        if (strategy == RankStrategy::type_heuristic) {
            for (auto const& [key, member] : keyed) ranking.set(g.id.gid, member, key.first);
            continue;
        }
        std::set<std::pair<int, std::size_t>> distinct;
        for (auto const& [key, member] : keyed) distinct.insert(key);
        for (auto const& [key, member] : keyed) {
            auto dense = std::distance(distinct.begin(), distinct.find(key)) + 1;
            ranking.set(g.id.gid, member, static_cast<int>(dense));
        }
    }
    return ranking;
}

std::vector<RankOverride> parse_ranking_override(std::string_view json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("ranks") || !doc["ranks"].is_array()) {
        throw Error("SchemaError", "ranks");
    }
    std::vector<RankOverride> out;
    for (auto const& r : doc["ranks"]) {
        if (!r.is_object() || !r.contains("gid") || !r.contains("sensor_id") || !r.contains("rank") ||
            !r["rank"].is_number_integer()) {
            throw Error("SchemaError", "ranks[] needs gid, sensor_id, rank");
        }
        out.push_back({r["gid"].get<std::string>(), SensorId(r["sensor_id"].get<std::string>()), r["rank"].get<int>()});
    }
    return out;
}

void apply_rank_overrides(SensorRanking& ranking, SensorGrouping const& grouping,
                          std::vector<RankOverride> const& overrides) {
    for (auto const& o : overrides) {
        auto const* g = grouping.find(o.gid);
        if (!g) throw Error("UnknownGroup", o.gid);
        if (!std::binary_search(g->members.begin(), g->members.end(), o.sensor)) {
            throw Error("UnknownSensor", o.sensor.str() + " is not a member of group " + o.gid);
        }
        ranking.set(o.gid, o.sensor, o.rank);
    }
}

// ---------------------------------------------------------------------------

JointChangeTable::JointChangeTable(std::vector<SensorId> sensors, Timestamp window, std::vector<SensorChange> changes)
    : sensors_(std::move(sensors)), window_(window), changes_(std::move(changes)) {
    if (window_ < 0) throw Error("InvalidWindow", "window must be >= 0");
    std::size_t i = 0;
    while (i < changes_.size()) {
        Timestamp const anchor = changes_[i].timestamp;
        Timestamp const limit =
            anchor > std::numeric_limits<Timestamp>::max() - window_ ? std::numeric_limits<Timestamp>::max()
                                                                      : anchor + window_;
        std::size_t j = i;
        while (j < changes_.size() && changes_[j].timestamp <= limit) ++j;
        times_.push_back(anchor);
        offsets_.push_back(j);
        i = j;
    }
}

std::span<SensorChange const> JointChangeTable::changes(std::size_t entry) const {
    return std::span<SensorChange const>(changes_).subspan(offsets_[entry], offsets_[entry + 1] - offsets_[entry]);
}

std::vector<std::uint32_t> JointChangeTable::sensor_indices(std::size_t entry) const {
    std::vector<std::uint32_t> out;
    for (auto const& c : changes(entry)) out.push_back(c.sensor);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<SensorId> JointChangeTable::sensors_at(std::size_t entry) const {
    std::vector<SensorId> out;
    for (auto idx : sensor_indices(entry)) out.push_back(sensors_[idx]);
    return out;
}

std::optional<std::size_t> JointChangeTable::find(Timestamp t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it == times_.end() || *it != t) return std::nullopt;
    return static_cast<std::size_t>(it - times_.begin());
}

std::vector<Timestamp> change_timestamps(DiscreteStream const& stream) {
    std::vector<Timestamp> out;
    for (std::size_t i = 1; i < stream.points.size(); ++i) {
        if (stream.points[i].code != stream.points[i - 1].code) out.push_back(stream.points[i].timestamp);
    }
    return out;
}

JointChangeTable detect_joint_changes(std::span<DiscreteStream const> streams, Timestamp window) {
    if (window < 0) throw Error("InvalidWindow", "window must be >= 0");
    std::vector<DiscreteStream const*> ordered;
    ordered.reserve(streams.size());
    for (auto const& s : streams) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](DiscreteStream const* a, DiscreteStream const* b) { return a->sensor < b->sensor; });

    std::vector<SensorId> sensors;
    std::vector<SensorChange> changes;
    for (std::uint32_t idx = 0; idx < ordered.size(); ++idx) {
        auto const& s = *ordered[idx];
        if (!sensors.empty() && sensors.back() == s.sensor) {
            throw Error("DuplicateStream", "two discrete streams for " + s.sensor.str());
        }
        sensors.push_back(s.sensor);
        for (std::size_t i = 1; i < s.points.size(); ++i) {
            if (s.points[i].timestamp <= s.points[i - 1].timestamp) {
                throw Error("NonMonotoneStream", s.sensor.str() + " at index " + std::to_string(i));
            }
            if (s.points[i].code != s.points[i - 1].code) {
                changes.push_back({idx, s.points[i].timestamp, s.points[i].code});
            }
        }
    }
    std::sort(changes.begin(), changes.end(), [](SensorChange const& a, SensorChange const& b) {
        return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.sensor < b.sensor;
    });
    return JointChangeTable(std::move(sensors), window, std::move(changes));
}

// ---------------------------------------------------------------------------

std::string GroupResolution::joined() const {
    std::string out;
    for (auto const& g : gids) {
        if (!out.empty()) out += ',';
        out += g;
    }
    return out;
}

GroupResolution resolve_group(std::vector<SensorId> const& sensors, SensorGrouping const& grouping) {
    GroupResolution res;
    SensorGroup const* best = nullptr;
    std::set<std::string> any;
    bool first = true;
    std::vector<SensorGroup const*> common;
    for (auto const& s : sensors) {
        auto groups = grouping.groups_of(s);
        if (groups.empty()) throw Error("UngroupedSensor", s.str());
        for (auto const* g : groups) any.insert(g->id.gid);
        if (first) {
            common = groups;
            first = false;
        } else {
            std::erase_if(common, [&](SensorGroup const* g) { return std::find(groups.begin(), groups.end(), g) == groups.end(); });
        }
    }
    for (auto const* g : common) {
        if (!best || g->members.size() < best->members.size() ||
            (g->members.size() == best->members.size() && g->id.gid < best->id.gid)) {
            best = g;
        }
    }
    if (best) {
        res.gids = {best->id.gid};
    } else {
        res.gids.assign(any.begin(), any.end());
        res.averaged = true;
    }
    return res;
}

TraceRecord const* TopologyTrace::at(Timestamp t) const {
    auto it = std::lower_bound(records.begin(), records.end(), t,
                               [](TraceRecord const& r, Timestamp ts) { return r.timestamp < ts; });
    if (it == records.end() || it->timestamp != t) return nullptr;
    return &*it;
}

Rational TopologyTrace::weighted(Timestamp t, SensorId const& sensor) const {
    if (auto const* rec = at(t)) {
        for (auto const& term : rec->terms) {
            if (term.sensor == sensor) return term.weighted;
        }
    }
    return Rational(0);
}

namespace {

struct Resolved {
    GroupResolution gamma;
    std::vector<Rational> ranks;  // parallel to the sensor index key
};

Rational sensor_rank(SensorId const& sensor, GroupResolution const& gamma, SensorGrouping const& grouping,
                     SensorRanking const& ranking) {
    auto lookup = [&](std::string const& gid) {
        auto r = ranking.rank(gid, sensor);
        if (!r) throw Error("MissingRank", "no rank for " + sensor.str() + " in group " + gid);
        return *r;
    };
    if (!gamma.averaged) return Rational(lookup(gamma.gids.front()));
    std::int64_t sum = 0;
    std::int64_t count = 0;
    for (auto const* g : grouping.groups_of(sensor)) {
        sum += lookup(g->id.gid);
        ++count;
    }
    return Rational(sum, count);
}

struct Accumulator {
    std::vector<std::pair<Rational, std::int64_t>> weighted_counts;
    std::size_t occurrences = 0;
    std::vector<Timestamp> timestamps;

    void add(Rational const& w) {
        for (auto& [value, count] : weighted_counts) {
            if (value == w) {
                ++count;
                return;
            }
        }
        weighted_counts.emplace_back(w, 1);
    }

    [[nodiscard]] Rational sum() const {
        Rational total(0);
        for (auto const& [value, count] : weighted_counts) total += value * Rational(count);
        return total;
    }
};

}  // namespace

TopologyResult compute_topology(JointChangeTable const& jc, SensorGrouping const& grouping,
                                SensorRanking const& ranking, TopologyOptions const& options) {
    auto const& sensors = jc.sensors();
    std::vector<Accumulator> acc(sensors.size());
    std::map<std::vector<std::uint32_t>, Resolved> cache;
    TopologyResult result;
    if (options.record_trace) result.trace.records.reserve(jc.size());

    std::vector<std::uint32_t> key;
    for (std::size_t e = 0; e < jc.size(); ++e) {
        key.clear();
        for (auto const& c : jc.changes(e)) key.push_back(c.sensor);
        std::sort(key.begin(), key.end());
        key.erase(std::unique(key.begin(), key.end()), key.end());

        auto it = cache.find(key);
        if (it == cache.end()) {
            std::vector<SensorId> members;
            for (auto idx : key) members.push_back(sensors[idx]);
            Resolved r{resolve_group(members, grouping), {}};
            for (auto const& m : members) r.ranks.push_back(sensor_rank(m, r.gamma, grouping, ranking));
            it = cache.emplace(key, std::move(r)).first;
        }
        auto const& resolved = it->second;
        Rational const alpha(static_cast<std::int64_t>(key.size()));
        Timestamp const t = jc.timestamp(e);

        TraceRecord* rec = nullptr;
        if (options.record_trace) {
            result.trace.records.push_back({t, key.size(), resolved.gamma, {}});
            rec = &result.trace.records.back();
        }
        for (std::size_t k = 0; k < key.size(); ++k) {
            Rational const w = alpha / resolved.ranks[k];
            auto& a = acc[key[k]];
            a.add(w);
            ++a.occurrences;
            a.timestamps.push_back(t);
            if (rec) rec->terms.push_back({sensors[key[k]], resolved.ranks[k], w});
        }
    }

    struct Keyed {
        TopologyRow row;
        Rational exact;
        int best_rank;
    };
    std::vector<Keyed> keyed;
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        auto& a = acc[i];
        if (a.occurrences == 0) continue;
        TopologyRow row{sensors[i], 0.0, a.sum(), a.occurrences, std::move(a.timestamps)};
        Rational exact = row.importance_exact();
        row.importance = exact.to_double();
        int best = std::numeric_limits<int>::max();
        for (auto const* g : grouping.groups_of(sensors[i])) {
            if (auto r = ranking.rank(g->id.gid, sensors[i])) best = std::min(best, *r);
        }
        keyed.push_back({std::move(row), exact, best});
    }
    std::sort(keyed.begin(), keyed.end(), [](Keyed const& a, Keyed const& b) {
        if (a.exact != b.exact) return a.exact > b.exact;
        if (a.best_rank != b.best_rank) return a.best_rank < b.best_rank;
        return a.row.sensor < b.row.sensor;
    });
    for (auto& k : keyed) result.rows.push_back(std::move(k.row));
    return result;
}

std::string topology_to_csv(std::vector<TopologyRow> const& rows) {
    std::string out = "sensor_id,importance,wsr_sum,occurrences,timestamps\n";
    for (auto const& r : rows) {
        out += r.sensor.str() + "," + text::format_number(r.importance) + "," +
               text::format_number(r.wsr_sum.to_double()) + "," + std::to_string(r.occurrence_count) + ",";
        for (std::size_t i = 0; i < r.timestamps.size(); ++i) {
            if (i) out += ';';
            out += std::to_string(r.timestamps[i]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace procaware
