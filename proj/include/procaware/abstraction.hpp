#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "procaware/annotate.hpp"
#include "procaware/model.hpp"
#include "procaware/topology.hpp"

namespace procaware {

/// Label for events whose group (comma-joined gids, e.g. "B" or "B,O") or
/// context signature ("S2+S3", sorted ids joined by '+') matches. Exactly
/// one of the two keys is set.
struct LabelRule {
    std::optional<std::string> group;
    std::optional<std::string> signature;
    std::string label;

    friend bool operator==(LabelRule const&, LabelRule const&) = default;
};

struct LifecycleOverride {
    Timestamp timestamp = 0;
    Lifecycle lifecycle = Lifecycle::unknown;

    friend bool operator==(LifecycleOverride const&, LifecycleOverride const&) = default;
};

struct AbstractionConfig {
    /// Top-k topology rows. Ignored when `sensors` is non-empty; with neither
    /// set the whole topology is selected.
    std::optional<std::size_t> depth;
    std::vector<SensorId> sensors;
    std::vector<LabelRule> labels;
    std::vector<LifecycleOverride> lifecycle_overrides;

    friend bool operator==(AbstractionConfig const&, AbstractionConfig const&) = default;
};

struct CandidateEvent {
    Timestamp timestamp = 0;
    /// Selected sensors that changed in this entry.
    std::vector<SensorId> triggering;
    /// Every change of the joint-change entry, selected or not.
    std::vector<ContextReading> context;
    GroupResolution group;

    [[nodiscard]] std::string signature() const;
};

/// Sensors chosen by the config. Throws Error("EmptySelection") for depth 0
/// or an empty topology, Error("InvalidDepth") past the topology's end.
std::vector<SensorId> select_sensors(std::vector<TopologyRow> const& rows, AbstractionConfig const& cfg);

using PrivacyMap = std::map<SensorId, PrivacyLevel>;

PrivacyMap privacy_of(AnnotationSet const& annotations);

/// One event per joint-change entry in which a selected sensor takes part,
/// stamped with the entry's timestamp.
std::vector<CandidateEvent> abstract_events(std::vector<TopologyRow> const& rows, JointChangeTable const& jc,
                                            SensorGrouping const& grouping, AbstractionConfig const& cfg,
                                            PrivacyMap const& privacy = {});

/// Signature rules win over group rules; unmatched events get
/// "activity@<group>".
std::string resolve_label(CandidateEvent const& event, std::vector<LabelRule> const& labels);

/// Consecutive events with the same label form a run: first is `start`, last
/// `complete`, the rest `unknown`; a run of one is `complete`. Overrides
/// (by timestamp) replace the heuristic. Event ids are "ev-1", "ev-2", ...
std::vector<ProcessEvent> assign_lifecycles(std::vector<CandidateEvent> const& events, AbstractionConfig const& cfg);

enum class CorrelationKind { single_case, gap, key_cycle };

struct CorrelationStrategy {
    CorrelationKind kind = CorrelationKind::single_case;
    Timestamp gap = 0;
    SensorId sensor;
    int reset_code = 0;

    friend bool operator==(CorrelationStrategy const&, CorrelationStrategy const&) = default;
};

/// Events must be sorted by timestamp. key_cycle starts a new case at every
/// transition of the key sensor into `reset_code` after the first; events
/// before the first transition join case-1. Case ids are "case-N" in order
/// of first appearance.
std::vector<ProcessEvent> correlate_cases(std::vector<ProcessEvent> events, CorrelationStrategy const& strategy,
                                          std::span<DiscreteStream const> streams = {});

/// One row per event; context readings are filled with the raw value the
/// sensor reported at (or last before) the change. Throws
/// Error("UncorrelatedEvent") for an event without a case.
std::vector<EnrichedLogRow> build_enriched_log(std::vector<ProcessEvent> const& events,
                                               std::vector<SensorStream> const& streams);

}  // namespace procaware
