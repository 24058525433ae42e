#include "procaware/json_io.hpp"

#include "procaware/error.hpp"

namespace procaware::json_io {

namespace {

json ids_json(std::vector<SensorId> const& ids) {
    json out = json::array();
    for (auto const& id : ids) out.push_back(id.str());
    return out;
}

json context_json(std::vector<ContextReading> const& context) {
    json out = json::array();
    for (auto const& c : context) {
        out.push_back({{"sensor_id", c.sensor.str()},
                       {"timestamp", c.timestamp},
                       {"code", c.code},
                       {"privacy", std::string(to_string(c.privacy))}});
    }
    return out;
}

json counts_json(std::map<std::string, std::size_t> const& counts, char const* value_key) {
    json out = json::array();
    for (auto const& [label, n] : counts) out.push_back({{"label", label}, {value_key, n}});
    return out;
}

[[noreturn]] void schema(std::string const& field) {
    throw Error("SchemaError", field);
}

}  // namespace

json to_json(Rational const& r) {
    return {{"value", r.to_double()}, {"exact", r.to_string()}};
}

json to_json(std::vector<TopologyRow> const& rows) {
    json out = json::array();
    for (auto const& r : rows) {
        out.push_back({{"sensor_id", r.sensor.str()},
                       {"importance", r.importance},
                       {"importance_exact", r.importance_exact().to_string()},
                       {"wsr_sum", r.wsr_sum.to_double()},
                       {"wsr_sum_exact", r.wsr_sum.to_string()},
                       {"occurrences", r.occurrence_count},
                       {"timestamps", r.timestamps}});
    }
    return out;
}

json to_json(TopologyTrace const& trace) {
    json out = json::array();
    for (auto const& rec : trace.records) {
        json terms = json::array();
        for (auto const& t : rec.terms) {
            terms.push_back(
                {{"sensor_id", t.sensor.str()}, {"sensor_rank", to_json(t.sensor_rank)}, {"wsr", to_json(t.weighted)}});
        }
        out.push_back({{"timestamp", rec.timestamp},
                       {"alpha", rec.alpha},
                       {"gamma", rec.gamma.joined()},
                       {"averaged", rec.gamma.averaged},
                       {"terms", terms}});
    }
    return out;
}

json to_json(JointChangeTable const& jc) {
    json out = json::array();
    for (std::size_t e = 0; e < jc.size(); ++e) {
        json changes = json::array();
        for (auto const& c : jc.changes(e)) {
            changes.push_back({{"sensor_id", jc.sensors()[c.sensor].str()}, {"timestamp", c.timestamp}, {"code", c.code}});
        }
        out.push_back({{"timestamp", jc.timestamp(e)}, {"sensors", ids_json(jc.sensors_at(e))}, {"changes", changes}});
    }
    return out;
}

json to_json(std::vector<CandidateEvent> const& events) {
    json out = json::array();
    for (auto const& ev : events) {
        out.push_back({{"timestamp", ev.timestamp},
                       {"triggering", ids_json(ev.triggering)},
                       {"signature", ev.signature()},
                       {"group", ev.group.joined()},
                       {"context", context_json(ev.context)}});
    }
    return out;
}

json to_json(std::vector<ProcessEvent> const& events) {
    json out = json::array();
    for (auto const& ev : events) {
        json row{{"event_id", ev.event_id},
                 {"timestamp", ev.timestamp},
                 {"lifecycle", std::string(to_string(ev.lifecycle))},
                 {"label", ev.label},
                 {"group", ev.group ? json(*ev.group) : json(nullptr)},
                 {"case_id", ev.case_id ? json(*ev.case_id) : json(nullptr)},
                 {"context", context_json(ev.context)}};
        out.push_back(std::move(row));
    }
    return out;
}

json to_json(DirectlyFollowsGraph const& g) {
    json edges = json::array();
    for (auto const& [e, n] : g.edges) edges.push_back({{"from", e.first}, {"to", e.second}, {"count", n}});
    return {{"activities", counts_json(g.activities, "frequency")},
            {"edges", edges},
            {"starts", counts_json(g.starts, "count")},
            {"ends", counts_json(g.ends, "count")}};
}

json to_json(AbstractionConfig const& cfg) {
    json out = json::object();
    if (!cfg.sensors.empty()) {
        out["sensors"] = ids_json(cfg.sensors);
    } else if (cfg.depth) {
        out["depth"] = *cfg.depth;
    }
    json labels = json::array();
    for (auto const& l : cfg.labels) {
        json rule{{"label", l.label}};
        if (l.group) rule["group"] = *l.group;
        if (l.signature) rule["signature"] = *l.signature;
        labels.push_back(std::move(rule));
    }
    out["labels"] = labels;
    json overrides = json::array();
    for (auto const& o : cfg.lifecycle_overrides) {
        overrides.push_back({{"timestamp", o.timestamp}, {"lifecycle", std::string(to_string(o.lifecycle))}});
    }
    out["lifecycle_overrides"] = overrides;
    return out;
}

json to_json(CorrelationStrategy const& s) {
    switch (s.kind) {
        case CorrelationKind::single_case: return {{"strategy", "single_case"}};
        case CorrelationKind::gap: return {{"strategy", "gap"}, {"gap", s.gap}};
        case CorrelationKind::key_cycle:
            return {{"strategy", "key_cycle"}, {"sensor", s.sensor.str()}, {"reset_code", s.reset_code}};
    }
    return {};
}

AbstractionConfig parse_abstraction_config(json const& doc) {
    if (!doc.is_object()) schema("abstraction");
    AbstractionConfig cfg;
    if (auto it = doc.find("depth"); it != doc.end() && !it->is_null()) {
        if (!it->is_number_integer() || it->get<std::int64_t>() < 1) schema("abstraction.depth");
        cfg.depth = it->get<std::size_t>();
    }
    if (auto it = doc.find("sensors"); it != doc.end() && !it->is_null()) {
        if (!it->is_array()) schema("abstraction.sensors");
        for (auto const& s : *it) {
            if (!s.is_string() || s.get<std::string>().empty()) schema("abstraction.sensors[]");
            cfg.sensors.emplace_back(s.get<std::string>());
        }
        if (cfg.sensors.empty()) throw Error("EmptySelection", "abstraction.sensors is empty");
    }
    if (auto it = doc.find("labels"); it != doc.end()) {
        if (!it->is_array()) schema("abstraction.labels");
        for (auto const& l : *it) {
            if (!l.is_object() || !l.contains("label") || !l["label"].is_string()) schema("abstraction.labels[].label");
            LabelRule rule{std::nullopt, std::nullopt, l["label"].get<std::string>()};
            if (l.contains("group")) {
                if (!l["group"].is_string()) schema("abstraction.labels[].group");
                rule.group = l["group"].get<std::string>();
            }
            if (l.contains("signature")) {
                if (!l["signature"].is_string()) schema("abstraction.labels[].signature");
                rule.signature = l["signature"].get<std::string>();
            }
            if (rule.group.has_value() == rule.signature.has_value()) {
                schema("abstraction.labels[] needs exactly one of group, signature");
            }
            cfg.labels.push_back(std::move(rule));
        }
    }
    for (char const* key : {"lifecycle_overrides", "overrides"}) {
        auto it = doc.find(key);
        if (it == doc.end()) continue;
        if (!it->is_array()) schema(std::string("abstraction.") + key);
        for (auto const& o : *it) {
            if (!o.is_object() || !o.contains("timestamp") || !o["timestamp"].is_number_integer() ||
                !o.contains("lifecycle") || !o["lifecycle"].is_string()) {
                schema(std::string("abstraction.") + key + "[]");
            }
            cfg.lifecycle_overrides.push_back(
                {o["timestamp"].get<Timestamp>(), parse_lifecycle(o["lifecycle"].get<std::string>())});
        }
    }
    return cfg;
}

CorrelationStrategy parse_correlation(json const& doc) {
    if (!doc.is_object() || !doc.contains("strategy") || !doc["strategy"].is_string()) schema("correlation.strategy");
    auto kind = doc["strategy"].get<std::string>();
    CorrelationStrategy s;
    if (kind == "single_case") {
        s.kind = CorrelationKind::single_case;
    } else if (kind == "gap") {
        s.kind = CorrelationKind::gap;
        if (!doc.contains("gap") || !doc["gap"].is_number_integer() || doc["gap"].get<Timestamp>() <= 0) {
            schema("correlation.gap");
        }
        s.gap = doc["gap"].get<Timestamp>();
    } else if (kind == "key_cycle") {
        s.kind = CorrelationKind::key_cycle;
        if (!doc.contains("sensor") || !doc["sensor"].is_string() || doc["sensor"].get<std::string>().empty()) {
            schema("correlation.sensor");
        }
        s.sensor = SensorId(doc["sensor"].get<std::string>());
        if (!doc.contains("reset_code") || !doc["reset_code"].is_number_integer()) schema("correlation.reset_code");
        s.reset_code = doc["reset_code"].get<int>();
    } else {
        schema("correlation.strategy \"" + kind + "\"");
    }
    return s;
}

std::optional<Lifecycle> parse_lifecycle_filter(std::string_view text) {
    if (text.empty() || text == "all") return std::nullopt;
    return parse_lifecycle(text);
}

}  // namespace procaware::json_io
