#include "procaware/abstraction.hpp"

#include <algorithm>
#include <set>

#include "procaware/error.hpp"

namespace procaware {

std::string CandidateEvent::signature() const {
    std::set<SensorId> ids;
    for (auto const& c : context) ids.insert(c.sensor);
    std::string out;
    for (auto const& id : ids) {
        if (!out.empty()) out += '+';
        out += id.str();
    }
    return out;
}

std::vector<SensorId> select_sensors(std::vector<TopologyRow> const& rows, AbstractionConfig const& cfg) {
    if (!cfg.sensors.empty()) {
        std::vector<SensorId> out = cfg.sensors;
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    std::size_t depth = cfg.depth.value_or(rows.size());
    if (depth == 0 || rows.empty()) throw Error("EmptySelection", "abstraction selects no sensor");
    if (depth > rows.size()) {
        throw Error("InvalidDepth",
                    "depth " + std::to_string(depth) + " exceeds topology length " + std::to_string(rows.size()));
    }
    std::vector<SensorId> out;
    for (std::size_t i = 0; i < depth; ++i) out.push_back(rows[i].sensor);
    std::sort(out.begin(), out.end());
    return out;
}

PrivacyMap privacy_of(AnnotationSet const& annotations) {
    PrivacyMap out;
    for (auto const& [id, ann] : annotations) out.emplace(id, ann.privacy());
    return out;
}

std::vector<CandidateEvent> abstract_events(std::vector<TopologyRow> const& rows, JointChangeTable const& jc,
                                            SensorGrouping const& grouping, AbstractionConfig const& cfg,
                                            PrivacyMap const& privacy) {
    auto const selected = select_sensors(rows, cfg);
    auto const& sensors = jc.sensors();
    std::vector<bool> is_selected(sensors.size(), false);
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        is_selected[i] = std::binary_search(selected.begin(), selected.end(), sensors[i]);
    }

    std::map<std::vector<std::uint32_t>, GroupResolution> gamma_cache;
    std::vector<CandidateEvent> events;
    for (std::size_t e = 0; e < jc.size(); ++e) {
        auto changes = jc.changes(e);
        if (std::none_of(changes.begin(), changes.end(), [&](SensorChange const& c) { return is_selected[c.sensor]; })) {
            continue;
        }
        auto key = jc.sensor_indices(e);
        auto it = gamma_cache.find(key);
        if (it == gamma_cache.end()) it = gamma_cache.emplace(key, resolve_group(jc.sensors_at(e), grouping)).first;

        CandidateEvent ev;
        ev.timestamp = jc.timestamp(e);
        ev.group = it->second;
        for (auto idx : key) {
            if (is_selected[idx]) ev.triggering.push_back(sensors[idx]);
        }
        for (auto const& c : changes) {
            auto p = privacy.find(sensors[c.sensor]);
            ev.context.push_back({sensors[c.sensor], c.timestamp, c.code,
                                  p == privacy.end() ? PrivacyLevel::public_ : p->second});
        }
        events.push_back(std::move(ev));
    }
    return events;
}

std::string resolve_label(CandidateEvent const& event, std::vector<LabelRule> const& labels) {
    auto const sig = event.signature();
    for (auto const& rule : labels) {
        if (rule.signature && *rule.signature == sig) return rule.label;
    }
    auto const group = event.group.joined();
    for (auto const& rule : labels) {
        if (rule.group && *rule.group == group) return rule.label;
    }
    return "activity@" + group;
}

std::vector<ProcessEvent> assign_lifecycles(std::vector<CandidateEvent> const& events, AbstractionConfig const& cfg) {
    std::vector<ProcessEvent> out;
    out.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        auto const& ev = events[i];
        ProcessEvent pe;
        pe.event_id = "ev-" + std::to_string(i + 1);
        pe.timestamp = ev.timestamp;
        pe.label = resolve_label(ev, cfg.labels);
        pe.context = ev.context;
        pe.group = ev.group.joined();
        out.push_back(std::move(pe));
    }

    std::size_t begin = 0;
    while (begin < out.size()) {
        std::size_t end = begin + 1;
        while (end < out.size() && out[end].label == out[begin].label) ++end;
        if (end - begin == 1) {
            out[begin].lifecycle = Lifecycle::complete;
        } else {
            out[begin].lifecycle = Lifecycle::start;
            for (std::size_t k = begin + 1; k + 1 < end; ++k) out[k].lifecycle = Lifecycle::unknown;
            out[end - 1].lifecycle = Lifecycle::complete;
        }
        begin = end;
    }

    for (auto const& o : cfg.lifecycle_overrides) {
        for (auto& pe : out) {
            if (pe.timestamp == o.timestamp) pe.lifecycle = o.lifecycle;
        }
    }
    return out;
}

namespace {

std::vector<Timestamp> reset_instants(DiscreteStream const& stream, int reset_code) {
    std::vector<Timestamp> out;
    for (std::size_t i = 0; i < stream.points.size(); ++i) {
        if (stream.points[i].code != reset_code) continue;
        if (i == 0 || stream.points[i - 1].code != reset_code) out.push_back(stream.points[i].timestamp);
    }
    return out;
}

}  // namespace

std::vector<ProcessEvent> correlate_cases(std::vector<ProcessEvent> events, CorrelationStrategy const& strategy,
                                          std::span<DiscreteStream const> streams) {
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].timestamp < events[i - 1].timestamp) {
            throw Error("UnsortedEvents", "events must be sorted by timestamp");
        }
    }
    // Raw cycle number per event; renumbered by first appearance below.
    std::vector<std::size_t> cycle(events.size(), 0);
    switch (strategy.kind) {
        case CorrelationKind::single_case:
            break;
        case CorrelationKind::gap: {
            if (strategy.gap <= 0) throw Error("InvalidStrategy", "gap must be > 0");
            for (std::size_t i = 1; i < events.size(); ++i) {
                bool split = events[i].timestamp - events[i - 1].timestamp > strategy.gap;
                cycle[i] = cycle[i - 1] + (split ? 1 : 0);
            }
            break;
        }
        case CorrelationKind::key_cycle: {
            auto it = std::find_if(streams.begin(), streams.end(),
                                   [&](DiscreteStream const& s) { return s.sensor == strategy.sensor; });
            if (it == streams.end()) throw Error("UnknownSensor", "key sensor " + strategy.sensor.str());
            auto resets = reset_instants(*it, strategy.reset_code);
            for (std::size_t i = 0; i < events.size(); ++i) {
                auto n = static_cast<std::size_t>(
                    std::upper_bound(resets.begin(), resets.end(), events[i].timestamp) - resets.begin());
                cycle[i] = n == 0 ? 0 : n - 1;
            }
            break;
        }
    }
    std::map<std::size_t, std::size_t> numbering;
    for (std::size_t i = 0; i < events.size(); ++i) {
        auto [it, inserted] = numbering.emplace(cycle[i], numbering.size() + 1);
        events[i].case_id = "case-" + std::to_string(it->second);
    }
    return events;
}

std::vector<EnrichedLogRow> build_enriched_log(std::vector<ProcessEvent> const& events,
                                               std::vector<SensorStream> const& streams) {
    std::map<SensorId, SensorStream const*> by_id;
    for (auto const& s : streams) by_id.emplace(s.sensor, &s);

    std::vector<EnrichedLogRow> rows;
    rows.reserve(events.size());
    for (auto const& ev : events) {
        if (!ev.case_id) throw Error("UncorrelatedEvent", ev.event_id);
        std::vector<SensorId> ids;
        std::vector<double> values;
        std::vector<Timestamp> stamps;
        std::vector<PrivacyLevel> privacy;
        for (auto const& c : ev.context) {
            auto it = by_id.find(c.sensor);
            if (it == by_id.end()) throw Error("MissingStream", c.sensor.str());
            auto const& readings = it->second->readings;
            auto r = std::upper_bound(readings.begin(), readings.end(), c.timestamp,
                                      [](Timestamp t, Reading const& x) { return t < x.timestamp; });
            if (r == readings.begin()) {
                throw Error("MissingReading", c.sensor.str() + " has no reading at or before t=" +
                                                  std::to_string(c.timestamp));
            }
            --r;
            ids.push_back(c.sensor);
            values.push_back(r->value);
            stamps.push_back(r->timestamp);
            privacy.push_back(c.privacy);
        }
        rows.emplace_back(std::move(ids), std::move(values), std::move(stamps), std::move(privacy), *ev.case_id,
                          ev.event_id, ev.timestamp, ev.lifecycle, ev.label);
    }
    return rows;
}

}  // namespace procaware
