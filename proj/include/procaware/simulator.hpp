#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "procaware/annotate.hpp"
#include "procaware/model.hpp"
#include "procaware/topology.hpp"

namespace procaware::sim {

/// Ticks per part; part k occupies [k*kPartPeriod, (k+1)*kPartPeriod).
inline constexpr Timestamp kPartPeriod = 24;
inline constexpr int kMaxJitter = 3;

struct NoiseConfig {
    /// Each scripted step is delayed by 0..jitter_ticks ticks (order kept).
    int jitter_ticks = 0;
    /// Uniform multiplicative noise of +-pct percent on the energy and
    /// ambient readings.
    double value_noise_pct = 0.0;
};

struct ScenarioConfig {
    int parts = 1;
    std::optional<NoiseConfig> noise;
    std::uint64_t seed = 0;
    bool include_ambient = true;
};

struct TruthEvent {
    char kind = 'a';
    std::string label;
    Timestamp start = 0;
    Timestamp end = 0;

    friend bool operator==(TruthEvent const&, TruthEvent const&) = default;
};

struct PartTruth {
    int part_id = 1;
    std::vector<TruthEvent> events;

    friend bool operator==(PartTruth const&, PartTruth const&) = default;
};

struct GroundTruth {
    std::vector<PartTruth> parts;

    [[nodiscard]] std::size_t event_count() const;

    friend bool operator==(GroundTruth const&, GroundTruth const&) = default;
};

struct Scenario {
    DatasetManifest manifest;
    std::vector<SensorStream> streams;  // ordered by sensor id
    GroundTruth truth;
};

/// Conveyor, crane, oven and ambient sensors S1..S7 of the running factory
/// example, one part after another.
Scenario generate(ScenarioConfig const& cfg);

std::string emit_truth(GroundTruth const& truth);
GroundTruth parse_truth(std::string_view json_text);

/// Writes S<n>.csv per sensor, manifest.json and truth.json into `dir`.
void emit_fixture(Scenario const& scenario, std::filesystem::path const& dir);

/// Value mappings, grouping and a ready-to-run pipeline config for the
/// simulated factory.
AnnotationSet factory_annotations();
/// Without the ambient sensor, S7 is left out of every group.
SensorGrouping factory_grouping(bool include_ambient = true);
std::string factory_pipeline_json(bool include_ambient = true);

}  // namespace procaware::sim
