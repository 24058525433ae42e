#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "procaware/abstraction.hpp"
#include "procaware/annotate.hpp"
#include "procaware/error.hpp"
#include "procaware/ingest.hpp"
#include "procaware/mining.hpp"
#include "procaware/topology.hpp"

namespace procaware {

struct PipelineConfig {
    std::vector<std::filesystem::path> streams;
    std::optional<StreamFormat> format;
    std::optional<std::filesystem::path> manifest;
    std::filesystem::path annotations;
    std::filesystem::path grouping;
    std::optional<std::filesystem::path> ranking_override;
    RankStrategy rank_strategy = RankStrategy::type_heuristic;
    Timestamp window = 0;
    SaxConfig sax;
    AbstractionConfig abstraction;
    CorrelationStrategy correlation;
    std::optional<Lifecycle> lifecycle_filter = Lifecycle::start;
    std::filesystem::path output_dir = "out";
    bool lenient = false;
};

/// Relative paths are resolved against `base_dir`. A directory listed under
/// `streams` contributes every .csv/.jsonl file in it, in name order.
PipelineConfig parse_pipeline_config(std::string_view json_text, std::filesystem::path const& base_dir);
PipelineConfig load_pipeline_config(std::filesystem::path const& path);

/// An error annotated with the pipeline stage it came from; what() reads
/// "<stage>: <Kind>: <detail>".
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, Error const& cause)
        : std::runtime_error(stage + ": " + cause.what()), stage_(std::move(stage)), kind_(cause.kind()) {}

    [[nodiscard]] std::string const& stage() const noexcept { return stage_; }
    [[nodiscard]] std::string const& kind() const noexcept { return kind_; }

private:
    std::string stage_;
    std::string kind_;
};

// Stage building blocks, shared by run_pipeline and the session service.

struct IngestOutput {
    ParsedStreams parsed;
    ValidationReport validation;
};

/// Strict mode turns the first validation finding into an error.
IngestOutput ingest_stage(PipelineConfig const& cfg);

struct AnnotateOutput {
    AnnotationSet annotations;
    std::vector<DiscreteStream> discrete;  // ordered by sensor id
    std::vector<UnmappedValue> unmapped;
    std::vector<SensorId> degenerate;  // auto-discretized with zero variance
};

/// Every stream needs an annotation (Error "MissingAnnotation").
AnnotateOutput annotate_stage(std::vector<SensorStream> const& streams, AnnotationSet annotations,
                              SaxConfig const& sax, bool lenient);
AnnotationSet load_annotation_file(std::filesystem::path const& path);

struct Grouped {
    SensorGrouping grouping;
    SensorRanking ranking;
};

Grouped grouping_stage(PipelineConfig const& cfg, DatasetManifest const& manifest, AnnotationSet const& annotations);

/// Streams of sensors outside every group do not take part.
JointChangeTable joint_change_stage(std::vector<DiscreteStream> const& discrete, SensorGrouping const& grouping,
                                    Timestamp window);

struct StageTiming {
    std::string stage;
    double millis = 0.0;
};

struct PipelineResult {
    IngestOutput ingest;
    AnnotateOutput annotate;
    Grouped grouped;
    JointChangeTable joint_changes;
    TopologyResult topology;
    std::vector<CandidateEvent> candidates;
    std::vector<ProcessEvent> events;  // with cases
    std::vector<EnrichedLogRow> log;
    DirectlyFollowsGraph dfg;
    std::vector<StageTiming> timings;
};

/// Runs every stage; failures surface as StageError.
PipelineResult run_pipeline(PipelineConfig const& cfg);

/// Deterministic per-stage counts (no timings).
std::string pipeline_report(PipelineResult const& result);

/// topology.json, topology.csv, events.json, log.xes, dfg.dot, dfg.json,
/// report.txt and timing.txt.
void write_artifacts(PipelineResult const& result, std::filesystem::path const& dir);

}  // namespace procaware
