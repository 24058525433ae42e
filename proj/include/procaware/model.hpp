#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace procaware {

/// Dataset-wide time unit; see TimestampUnit in the manifest.
using Timestamp = std::int64_t;

enum class TimestampUnit { tick, epoch_ms };

std::string_view to_string(TimestampUnit unit);
TimestampUnit parse_timestamp_unit(std::string_view text);

/// Opaque sensor token such as "S1". Never empty.
class SensorId {
public:
    SensorId() = default;
    explicit SensorId(std::string id);

    [[nodiscard]] std::string const& str() const noexcept { return id_; }
    [[nodiscard]] bool empty() const noexcept { return id_.empty(); }

    friend bool operator==(SensorId const&, SensorId const&) = default;
    friend auto operator<=>(SensorId const&, SensorId const&) = default;

private:
    std::string id_;
};

struct SensorInfo {
    SensorId id;
    std::string name;
    std::string description;
};

struct DatasetManifest {
    std::string dataset_id;
    TimestampUnit timestamp_unit = TimestampUnit::tick;
    std::vector<SensorInfo> sensors;

    [[nodiscard]] bool contains(SensorId const& id) const;
    [[nodiscard]] std::string display_name(SensorId const& id) const;
};

struct Reading {
    Timestamp timestamp = 0;
    double value = 0.0;

    friend bool operator==(Reading const&, Reading const&) = default;
};

/// One row of the no-awareness log: sensor, timestamp, value.
struct SensorReading {
    SensorId sensor;
    Timestamp timestamp = 0;
    double value = 0.0;

    friend bool operator==(SensorReading const&, SensorReading const&) = default;
};

/// Raw sensor stream. Timestamps are strictly increasing once ingested;
/// validate_dataset() reports streams that violate this.
struct SensorStream {
    SensorId sensor;
    std::vector<Reading> readings;

    /// Reading at exactly `t`, if the sensor emitted one.
    [[nodiscard]] std::optional<Reading> at(Timestamp t) const;

    friend bool operator==(SensorStream const&, SensorStream const&) = default;
};

struct DiscreteSymbol {
    int code = 0;
    std::string label;

    friend bool operator==(DiscreteSymbol const&, DiscreteSymbol const&) = default;
};

enum class Lifecycle { start, complete, unknown };

std::string_view to_string(Lifecycle lc);
Lifecycle parse_lifecycle(std::string_view text);

enum class PrivacyLevel { public_, internal, sensitive };

std::string_view to_string(PrivacyLevel level);
PrivacyLevel parse_privacy_level(std::string_view text);

/// A sensor change that contributed to a process event.
struct ContextReading {
    SensorId sensor;
    Timestamp timestamp = 0;
    int code = 0;
    PrivacyLevel privacy = PrivacyLevel::public_;

    friend bool operator==(ContextReading const&, ContextReading const&) = default;
};

struct ProcessEvent {
    std::string event_id;
    Timestamp timestamp = 0;
    Lifecycle lifecycle = Lifecycle::unknown;
    std::string label;
    std::vector<ContextReading> context;
    std::optional<std::string> case_id;
    /// Resolved sensor group(s), comma-joined ("B", "B,O").
    std::optional<std::string> group;

    friend bool operator==(ProcessEvent const&, ProcessEvent const&) = default;
};

/// One row of the full-awareness log. The sensor lists are parallel and
/// non-empty; the constructor rejects anything else, so a half-populated row
/// cannot exist.
class EnrichedLogRow {
public:
    EnrichedLogRow(std::vector<SensorId> sensor_ids, std::vector<double> sensor_values,
                   std::vector<Timestamp> sensor_timestamps, std::vector<PrivacyLevel> sensor_privacy,
                   std::string case_id, std::string event_id, Timestamp event_timestamp, Lifecycle lifecycle,
                   std::string label);

    [[nodiscard]] std::vector<SensorId> const& sensor_ids() const noexcept { return sensor_ids_; }
    [[nodiscard]] std::vector<double> const& sensor_values() const noexcept { return sensor_values_; }
    [[nodiscard]] std::vector<Timestamp> const& sensor_timestamps() const noexcept { return sensor_timestamps_; }
    [[nodiscard]] std::vector<PrivacyLevel> const& sensor_privacy() const noexcept { return sensor_privacy_; }
    [[nodiscard]] std::string const& case_id() const noexcept { return case_id_; }
    [[nodiscard]] std::string const& event_id() const noexcept { return event_id_; }
    [[nodiscard]] Timestamp event_timestamp() const noexcept { return event_timestamp_; }
    [[nodiscard]] Lifecycle lifecycle() const noexcept { return lifecycle_; }
    [[nodiscard]] std::string const& label() const noexcept { return label_; }

    friend bool operator==(EnrichedLogRow const&, EnrichedLogRow const&) = default;

private:
    std::vector<SensorId> sensor_ids_;
    std::vector<double> sensor_values_;
    std::vector<Timestamp> sensor_timestamps_;
    std::vector<PrivacyLevel> sensor_privacy_;
    std::string case_id_;
    std::string event_id_;
    Timestamp event_timestamp_;
    Lifecycle lifecycle_;
    std::string label_;
};

enum class FindingKind { unknown_sensor, non_monotone_timestamp, negative_timestamp, empty_stream, duplicate_stream };

std::string_view to_string(FindingKind kind);

struct ValidationFinding {
    FindingKind kind;
    SensorId sensor;
    /// Stream position (index into SensorStream::readings) or the stream's
    /// position in the input list for stream-level findings.
    std::size_t index = 0;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationFinding> findings;
    [[nodiscard]] bool ok() const noexcept { return findings.empty(); }
};

/// Collects every invariant violation; never throws.
ValidationReport validate_dataset(DatasetManifest const& manifest, std::vector<SensorStream> const& streams);

}  // namespace procaware

template <>
struct std::hash<procaware::SensorId> {
    std::size_t operator()(procaware::SensorId const& id) const noexcept { return std::hash<std::string>{}(id.str()); }
};
