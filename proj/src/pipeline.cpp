#include "procaware/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <nlohmann/json.hpp>
#include <set>

#include "procaware/json_io.hpp"
#include "procaware/text.hpp"
#include "procaware/xes.hpp"

namespace procaware {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void schema(std::string const& field) {
    throw Error("SchemaError", field);
}

fs::path resolve(fs::path const& base, std::string const& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::string required_path(json const& doc, char const* key) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_string() || it->get<std::string>().empty()) schema(key);
    return it->get<std::string>();
}

void expand_stream_entry(fs::path const& path, std::vector<fs::path>& out) {
    if (!fs::is_directory(path)) {
        out.push_back(path);
        return;
    }
    std::vector<fs::path> found;
    for (auto const& entry : fs::directory_iterator(path)) {
        auto ext = entry.path().extension().string();
        if (entry.is_regular_file() && (ext == ".csv" || ext == ".jsonl" || ext == ".ndjson")) {
            found.push_back(entry.path());
        }
    }
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
}

template <typename Fn>
auto in_stage(char const* stage, std::vector<StageTiming>& timings, Fn&& fn) {
    auto const t0 = std::chrono::steady_clock::now();
    auto record = [&] {
        auto dt = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        timings.push_back({stage, dt});
    };
    try {
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record();
        } else {
            auto result = fn();
            record();
            return result;
        }
    } catch (Error const& e) {
        throw StageError(stage, e);
    } catch (json::exception const& e) {
        throw StageError(stage, Error("SchemaError", e.what()));
    } catch (std::overflow_error const& e) {
        throw StageError(stage, Error("Overflow", e.what()));
    }
}

}  // namespace

PipelineConfig parse_pipeline_config(std::string_view json_text, fs::path const& base_dir) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) schema("pipeline config is not a JSON object");

    PipelineConfig cfg;
    auto streams = doc.find("streams");
    if (streams == doc.end() || !streams->is_array() || streams->empty()) schema("streams");
    for (auto const& s : *streams) {
        if (!s.is_string()) schema("streams[]");
        expand_stream_entry(resolve(base_dir, s.get<std::string>()), cfg.streams);
    }
    if (auto it = doc.find("format"); it != doc.end()) {
        if (!it->is_string()) schema("format");
        cfg.format = parse_stream_format(it->get<std::string>());
    }
    if (doc.contains("manifest")) cfg.manifest = resolve(base_dir, required_path(doc, "manifest"));
    cfg.annotations = resolve(base_dir, required_path(doc, "annotations"));
    cfg.grouping = resolve(base_dir, required_path(doc, "grouping"));
    if (doc.contains("ranking_override")) {
        cfg.ranking_override = resolve(base_dir, required_path(doc, "ranking_override"));
    }
    if (auto it = doc.find("rank_strategy"); it != doc.end()) {
        if (!it->is_string()) schema("rank_strategy");
        cfg.rank_strategy = parse_rank_strategy(it->get<std::string>());
    }
    if (auto it = doc.find("window"); it != doc.end()) {
        if (!it->is_number_integer() || it->get<Timestamp>() < 0) schema("window");
        cfg.window = it->get<Timestamp>();
    }
    if (auto it = doc.find("sax"); it != doc.end()) {
        if (!it->is_object()) schema("sax");
        cfg.sax.alphabet_size = it->value("alphabet_size", cfg.sax.alphabet_size);
        cfg.sax.paa_window = it->value("paa_window", cfg.sax.paa_window);
        if (cfg.sax.alphabet_size < 2) schema("sax.alphabet_size");
        if (cfg.sax.paa_window < 1) schema("sax.paa_window");
    }
    if (auto it = doc.find("abstraction"); it != doc.end()) cfg.abstraction = json_io::parse_abstraction_config(*it);
    if (auto it = doc.find("correlation"); it != doc.end()) cfg.correlation = json_io::parse_correlation(*it);
    if (auto it = doc.find("lifecycle_filter"); it != doc.end()) {
        if (it->is_null()) {
            cfg.lifecycle_filter.reset();
        } else if (it->is_string()) {
            cfg.lifecycle_filter = json_io::parse_lifecycle_filter(it->get<std::string>());
        } else {
            schema("lifecycle_filter");
        }
    }
    if (doc.contains("output_dir")) cfg.output_dir = resolve(base_dir, required_path(doc, "output_dir"));
    else cfg.output_dir = base_dir / "out";
    if (auto it = doc.find("lenient"); it != doc.end()) {
        if (!it->is_boolean()) schema("lenient");
        cfg.lenient = it->get<bool>();
    }
    return cfg;
}

PipelineConfig load_pipeline_config(fs::path const& path) {
    return parse_pipeline_config(text::read_file(path), fs::absolute(path).parent_path());
}

IngestOutput ingest_stage(PipelineConfig const& cfg) {
    ParseOptions options;
    options.mode = cfg.lenient ? ParseMode::lenient : ParseMode::strict;
    options.format = cfg.format;
    if (cfg.manifest) options.manifest = load_manifest(*cfg.manifest);
    IngestOutput out{load_streams(cfg.streams, options), {}};
    out.validation = validate_dataset(out.parsed.manifest, out.parsed.streams);
    if (!cfg.lenient && !out.validation.ok()) {
        auto const& f = out.validation.findings.front();
        std::string kind = f.kind == FindingKind::unknown_sensor ? "UnknownSensor" : "InvalidDataset";
        throw Error(kind, f.message);
    }
    return out;
}

AnnotationSet load_annotation_file(fs::path const& path) {
    if (!fs::exists(path)) throw Error("MissingAnnotation", "annotation file " + path.string() + " not found");
    return load_annotations(path);
}

AnnotateOutput annotate_stage(std::vector<SensorStream> const& streams, AnnotationSet annotations,
                              SaxConfig const& sax, bool lenient) {
    AnnotateOutput out;
    for (auto const& stream : streams) {
        auto it = annotations.find(stream.sensor);
        if (it == annotations.end()) throw Error("MissingAnnotation", stream.sensor.str());
        if (it->second.is_auto()) {
            auto r = auto_discretize(stream, sax);
            if (r.degenerate) out.degenerate.push_back(stream.sensor);
            out.discrete.push_back(std::move(r.stream));
        } else {
            out.discrete.push_back(apply_annotation(stream, it->second,
                                                    lenient ? MappingMode::lenient : MappingMode::strict,
                                                    &out.unmapped));
        }
    }
    out.annotations = std::move(annotations);
    return out;
}

Grouped grouping_stage(PipelineConfig const& cfg, DatasetManifest const& manifest, AnnotationSet const& annotations) {
    std::vector<SensorId> known;
    for (auto const& s : manifest.sensors) known.push_back(s.id);
    Grouped g{load_grouping(cfg.grouping, known), {}};
    g.ranking = rank_sensors(g.grouping, annotations, cfg.rank_strategy);
    if (cfg.ranking_override) {
        apply_rank_overrides(g.ranking, g.grouping, parse_ranking_override(text::read_file(*cfg.ranking_override)));
    }
    return g;
}

JointChangeTable joint_change_stage(std::vector<DiscreteStream> const& discrete, SensorGrouping const& grouping,
                                    Timestamp window) {
    std::vector<DiscreteStream> grouped;
    for (auto const& d : discrete) {
        if (grouping.contains(d.sensor)) grouped.push_back(d);
    }
    return detect_joint_changes(grouped, window);
}

PipelineResult run_pipeline(PipelineConfig const& cfg) {
    PipelineResult r;
    auto& tm = r.timings;
    r.ingest = in_stage("ingest", tm, [&] { return ingest_stage(cfg); });
    r.annotate = in_stage("annotate", tm, [&] {
        return annotate_stage(r.ingest.parsed.streams, load_annotation_file(cfg.annotations), cfg.sax, cfg.lenient);
    });
    r.grouped = in_stage("grouping", tm, [&] { return grouping_stage(cfg, r.ingest.parsed.manifest, r.annotate.annotations); });
    r.joint_changes =
        in_stage("joint_changes", tm, [&] { return joint_change_stage(r.annotate.discrete, r.grouped.grouping, cfg.window); });
    r.topology = in_stage("topology", tm, [&] {
        return compute_topology(r.joint_changes, r.grouped.grouping, r.grouped.ranking);
    });
    in_stage("events", tm, [&] {
        r.candidates = abstract_events(r.topology.rows, r.joint_changes, r.grouped.grouping, cfg.abstraction,
                                       privacy_of(r.annotate.annotations));
        r.events = assign_lifecycles(r.candidates, cfg.abstraction);
    });
    in_stage("cases", tm, [&] {
        r.events = correlate_cases(std::move(r.events), cfg.correlation, r.annotate.discrete);
        r.log = build_enriched_log(r.events, r.ingest.parsed.streams);
    });
    r.dfg = in_stage("dfg", tm, [&] {
        return r.log.empty() ? DirectlyFollowsGraph{} : mine_dfg(r.log, cfg.lifecycle_filter);
    });
    return r;
}

std::string pipeline_report(PipelineResult const& r) {
    std::set<std::string> cases;
    for (auto const& e : r.events) {
        if (e.case_id) cases.insert(*e.case_id);
    }
    std::size_t starts = 0;
    for (auto const& e : r.events) starts += e.lifecycle == Lifecycle::start ? 1 : 0;

    std::string out;
    auto line = [&](std::string_view key, auto value) {
        out += key;
        out += ": ";
        if constexpr (std::is_convertible_v<decltype(value), std::string_view>) {
            out += value;
        } else {
            out += std::to_string(value);
        }
        out += '\n';
    };
    line("dataset", r.ingest.parsed.manifest.dataset_id);
    line("streams", r.ingest.parsed.streams.size());
    line("readings", r.ingest.parsed.reading_count);
    line("skipped_rows", r.ingest.parsed.skipped.size());
    line("validation_findings", r.ingest.validation.findings.size());
    line("discrete_streams", r.annotate.discrete.size());
    line("unmapped_values", r.annotate.unmapped.size());
    line("degenerate_streams", r.annotate.degenerate.size());
    line("groups", r.grouped.grouping.groups().size());
    line("joint_change_window", r.joint_changes.window());
    line("joint_change_entries", r.joint_changes.size());
    line("sensor_changes", r.joint_changes.total_changes());
    line("topology_rows", r.topology.rows.size());
    if (!r.topology.rows.empty()) {
        auto const& top = r.topology.rows.front();
        line("topology_top", top.sensor.str() + " " + top.importance_exact().to_string());
    }
    line("candidate_events", r.candidates.size());
    line("process_events", r.events.size());
    line("start_events", starts);
    line("cases", cases.size());
    line("log_rows", r.log.size());
    line("dfg_activities", r.dfg.activities.size());
    line("dfg_edges", r.dfg.edges.size());
    line("dfg_edge_total", r.dfg.edge_total());
    return out;
}

void write_artifacts(PipelineResult const& r, fs::path const& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("IOError", dir.string() + ": " + ec.message());

    json topology{{"rows", json_io::to_json(r.topology.rows)}, {"trace", json_io::to_json(r.topology.trace)}};
    text::write_file(dir / "topology.json", topology.dump(2) + "\n");
    text::write_file(dir / "topology.csv", topology_to_csv(r.topology.rows));
    json events{{"candidates", json_io::to_json(r.candidates)}, {"events", json_io::to_json(r.events)}};
    text::write_file(dir / "events.json", events.dump(2) + "\n");
    text::write_file(dir / "log.xes", export_xes(r.log));
    text::write_file(dir / "dfg.dot", export_dfg_dot(r.dfg));
    text::write_file(dir / "dfg.json", json_io::to_json(r.dfg).dump(2) + "\n");
    text::write_file(dir / "report.txt", pipeline_report(r));

    std::string timing;
    for (auto const& t : r.timings) timing += t.stage + ": " + text::format_number(t.millis) + " ms\n";
    text::write_file(dir / "timing.txt", timing);
}

}  // namespace procaware
