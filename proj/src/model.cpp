#include "procaware/model.hpp"

#include <algorithm>
#include <set>

#include "procaware/error.hpp"

namespace procaware {

std::string_view to_string(TimestampUnit unit) {
    return unit == TimestampUnit::tick ? "tick" : "epoch_ms";
}

TimestampUnit parse_timestamp_unit(std::string_view text) {
    if (text == "tick") return TimestampUnit::tick;
    if (text == "epoch_ms") return TimestampUnit::epoch_ms;
    throw Error("SchemaError", "timestamp_unit must be \"tick\" or \"epoch_ms\", got \"" + std::string(text) + "\"");
}

SensorId::SensorId(std::string id) : id_(std::move(id)) {
    if (id_.empty()) throw Error("InvalidSensorId", "sensor id must be non-empty");
}

bool DatasetManifest::contains(SensorId const& id) const {
    return std::any_of(sensors.begin(), sensors.end(), [&](SensorInfo const& s) { return s.id == id; });
}

std::string DatasetManifest::display_name(SensorId const& id) const {
    for (auto const& s : sensors) {
        if (s.id == id && !s.name.empty()) return s.name;
    }
    return id.str();
}

std::optional<Reading> SensorStream::at(Timestamp t) const {
    auto it = std::lower_bound(readings.begin(), readings.end(), t,
                               [](Reading const& r, Timestamp ts) { return r.timestamp < ts; });
    if (it == readings.end() || it->timestamp != t) return std::nullopt;
    return *it;
}

std::string_view to_string(Lifecycle lc) {
    switch (lc) {
        case Lifecycle::start: return "start";
        case Lifecycle::complete: return "complete";
        case Lifecycle::unknown: return "unknown";
    }
    return "unknown";
}

Lifecycle parse_lifecycle(std::string_view text) {
    if (text == "start") return Lifecycle::start;
    if (text == "complete") return Lifecycle::complete;
    if (text == "unknown") return Lifecycle::unknown;
    throw Error("SchemaError", "unknown lifecycle transition \"" + std::string(text) + "\"");
}

std::string_view to_string(PrivacyLevel level) {
    switch (level) {
        case PrivacyLevel::public_: return "public";
        case PrivacyLevel::internal: return "internal";
        case PrivacyLevel::sensitive: return "sensitive";
    }
    return "public";
}

PrivacyLevel parse_privacy_level(std::string_view text) {
    if (text == "public") return PrivacyLevel::public_;
    if (text == "internal") return PrivacyLevel::internal;
    if (text == "sensitive") return PrivacyLevel::sensitive;
    throw Error("SchemaError", "unknown privacy level \"" + std::string(text) + "\"");
}

EnrichedLogRow::EnrichedLogRow(std::vector<SensorId> sensor_ids, std::vector<double> sensor_values,
                               std::vector<Timestamp> sensor_timestamps, std::vector<PrivacyLevel> sensor_privacy,
                               std::string case_id, std::string event_id, Timestamp event_timestamp,
                               Lifecycle lifecycle, std::string label)
    : sensor_ids_(std::move(sensor_ids)),
      sensor_values_(std::move(sensor_values)),
      sensor_timestamps_(std::move(sensor_timestamps)),
      sensor_privacy_(std::move(sensor_privacy)),
      case_id_(std::move(case_id)),
      event_id_(std::move(event_id)),
      event_timestamp_(event_timestamp),
      lifecycle_(lifecycle),
      label_(std::move(label)) {
    if (sensor_ids_.empty()) throw Error("InvalidRow", "row needs at least one sensor reading");
    if (sensor_values_.size() != sensor_ids_.size() || sensor_timestamps_.size() != sensor_ids_.size() ||
        sensor_privacy_.size() != sensor_ids_.size()) {
        throw Error("InvalidRow", "sensor id/value/timestamp/privacy lists differ in length");
    }
    if (case_id_.empty()) throw Error("InvalidRow", "case id is empty");
    if (event_id_.empty()) throw Error("InvalidRow", "process event id is empty");
    if (label_.empty()) throw Error("InvalidRow", "label is empty");
    for (auto const& id : sensor_ids_) {
        if (id.empty()) throw Error("InvalidRow", "empty sensor id");
    }
}

std::string_view to_string(FindingKind kind) {
    switch (kind) {
        case FindingKind::unknown_sensor: return "unknown sensor";
        case FindingKind::non_monotone_timestamp: return "non-monotone timestamp";
        case FindingKind::negative_timestamp: return "negative timestamp";
        case FindingKind::empty_stream: return "empty stream";
        case FindingKind::duplicate_stream: return "duplicate stream";
    }
    return "";
}

ValidationReport validate_dataset(DatasetManifest const& manifest, std::vector<SensorStream> const& streams) {
    ValidationReport report;
    auto add = [&](FindingKind kind, SensorId const& sensor, std::size_t index, std::string detail) {
        std::string msg = std::string(to_string(kind)) + " at index " + std::to_string(index);
        if (!detail.empty()) msg += " (" + detail + ")";
        report.findings.push_back({kind, sensor, index, std::move(msg)});
    };

    std::set<SensorId> seen;
    for (std::size_t s = 0; s < streams.size(); ++s) {
        auto const& stream = streams[s];
        if (!manifest.contains(stream.sensor)) add(FindingKind::unknown_sensor, stream.sensor, s, stream.sensor.str());
        if (!seen.insert(stream.sensor).second) add(FindingKind::duplicate_stream, stream.sensor, s, stream.sensor.str());
        if (stream.readings.empty()) {
            add(FindingKind::empty_stream, stream.sensor, s, stream.sensor.str());
            continue;
        }
        for (std::size_t i = 0; i < stream.readings.size(); ++i) {
            auto t = stream.readings[i].timestamp;
            if (t < 0) add(FindingKind::negative_timestamp, stream.sensor, i, "t=" + std::to_string(t));
            if (i > 0 && t <= stream.readings[i - 1].timestamp) {
                add(FindingKind::non_monotone_timestamp, stream.sensor, i,
                    std::to_string(stream.readings[i - 1].timestamp) + " then " + std::to_string(t));
            }
        }
    }
    return report;
}

}  // namespace procaware
