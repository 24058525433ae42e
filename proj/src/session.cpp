#include "procaware/session.hpp"

#include <array>
#include <chrono>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <vector>

#include "procaware/json_io.hpp"
#include "procaware/text.hpp"
#include "procaware/xes.hpp"

namespace procaware {

using nlohmann::json;

namespace {

enum Stage : std::size_t { kIngest, kAnnotate, kJointChanges, kTopology, kEvents, kCases, kDfg, kStageCount };

constexpr std::array<char const*, kStageCount> kStageNames{"ingest",   "annotate", "joint_changes", "topology",
                                                           "events", "cases",    "dfg"};

std::string now_iso() {
    using namespace std::chrono;
    auto ms = duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
    return format_xes_date(ms);
}

/// Raised inside handlers; turned into a response by the router.
struct HttpError {
    int status;
    std::string kind;
    std::string message;
};

[[noreturn]] void stale(Stage needed, std::string const& hint) {
    throw HttpError{409, "StaleStage", std::string(kStageNames[needed]) + " is not current: " + hint};
}

HttpResponse json_response(int status, json body) {
    return {status, body.dump(2) + "\n", "application/json"};
}

json parse_body(std::string_view body) {
    if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return json::object();
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded()) throw HttpError{400, "SchemaError", "request body is not valid JSON"};
    return doc;
}

Timestamp parse_window(std::string const& text) {
    auto w = text::parse_int(text);
    if (!w || *w < 0) throw HttpError{400, "InvalidWindow", "window must be a non-negative integer"};
    return *w;
}

}  // namespace

class Session {
public:
    Session(std::string id, PipelineConfig cfg) : id_(std::move(id)), cfg_(std::move(cfg)), window_(cfg_.window) {
        abstraction_ = cfg_.abstraction;
    }

    std::mutex mutex;

    json envelope(Stage stage) const {
        return {{"session_id", id_}, {"stage", kStageNames[stage]}, {"computed_at", computed_at_[stage]}};
    }

    void invalidate_from(Stage stage) {
        for (std::size_t s = stage; s < kStageCount; ++s) computed_at_[s].clear();
        if (stage <= kIngest) ingest_.reset();
        if (stage <= kAnnotate) {
            annotate_.reset();
            grouped_.reset();
        }
        if (stage <= kJointChanges) jc_.reset();
        if (stage <= kTopology) topology_.reset();
        if (stage <= kEvents) {
            candidates_.reset();
            events_.reset();
        }
        if (stage <= kCases) {
            cases_.reset();
            log_.reset();
        }
        dfg_.clear();
    }

    void mark(Stage stage) { computed_at_[stage] = now_iso(); }

    template <typename Fn>
    static auto guarded(Stage stage, Fn&& fn) {
        try {
            return fn();
        } catch (Error const& e) {
            throw StageError(kStageNames[stage], e);
        }
    }

    void ensure_annotated() {
        if (!ingest_) {
            ingest_ = guarded(kIngest, [&] { return ingest_stage(cfg_); });
            mark(kIngest);
        }
        if (!annotate_) {
            annotate_ = guarded(kAnnotate, [&] {
                auto annotations = annotations_override_ ? *annotations_override_ : load_annotation_file(cfg_.annotations);
                return annotate_stage(ingest_->parsed.streams, std::move(annotations), cfg_.sax, cfg_.lenient);
            });
            grouped_ = guarded(kAnnotate,
                               [&] { return grouping_stage(cfg_, ingest_->parsed.manifest, annotate_->annotations); });
            mark(kAnnotate);
        }
    }

    void ensure_topology() {
        ensure_annotated();
        if (!jc_) {
            jc_ = guarded(kJointChanges,
                          [&] { return joint_change_stage(annotate_->discrete, grouped_->grouping, window_); });
            mark(kJointChanges);
        }
        if (!topology_) {
            topology_ = guarded(kTopology, [&] { return compute_topology(*jc_, grouped_->grouping, grouped_->ranking); });
            mark(kTopology);
        }
    }

    void set_window(std::optional<Timestamp> w) {
        if (w && *w != window_) {
            window_ = *w;
            invalidate_from(kJointChanges);
        }
    }

    HttpResponse summary() {
        json stages = json::object();
        for (std::size_t s = 0; s < kStageCount; ++s) {
            stages[kStageNames[s]] = computed_at_[s].empty() ? json(nullptr) : json(computed_at_[s]);
        }
        json out{{"session_id", id_}, {"stage", "session"}, {"computed_at", now_iso()}, {"window", window_},
                 {"abstraction", json_io::to_json(abstraction_)}, {"stages", stages}};
        if (correlation_) out["correlation"] = json_io::to_json(*correlation_);
        if (ingest_) {
            json sensors = json::array();
            for (auto const& s : ingest_->parsed.manifest.sensors) {
                sensors.push_back({{"id", s.id.str()}, {"name", s.name}, {"description", s.description}});
            }
            out["sensors"] = sensors;
            out["readings"] = ingest_->parsed.reading_count;
        }
        return json_response(200, out);
    }

    HttpResponse created() {
        ensure_annotated();
        json out = envelope(kAnnotate);
        json streams = json::array();
        for (auto const& d : annotate_->discrete) {
            streams.push_back({{"sensor_id", d.sensor.str()},
                               {"points", d.points.size()},
                               {"provenance", d.provenance == Provenance::sax_auto ? "sax_auto" : "rule_mapped"}});
        }
        out["dataset_id"] = ingest_->parsed.manifest.dataset_id;
        out["readings"] = ingest_->parsed.reading_count;
        out["streams"] = streams;
        out["window"] = window_;
        return json_response(201, out);
    }

    HttpResponse joint_changes(std::optional<Timestamp> w) {
        set_window(w);
        ensure_topology();
        json out = envelope(kJointChanges);
        out["window"] = window_;
        out["entries"] = json_io::to_json(*jc_);
        return json_response(200, out);
    }

    HttpResponse topology(std::optional<Timestamp> w) {
        set_window(w);
        ensure_topology();
        json out = envelope(kTopology);
        out["window"] = window_;
        out["rows"] = json_io::to_json(topology_->rows);
        out["trace"] = json_io::to_json(topology_->trace);
        return json_response(200, out);
    }

    HttpResponse abstraction(json const& body) {
        auto cfg = guarded(kEvents, [&] { return json_io::parse_abstraction_config(body); });
        ensure_topology();
        abstraction_ = std::move(cfg);
        invalidate_from(kEvents);
        guarded(kEvents, [&] {
            candidates_ = abstract_events(topology_->rows, *jc_, grouped_->grouping, abstraction_,
                                          privacy_of(annotate_->annotations));
            events_ = assign_lifecycles(*candidates_, abstraction_);
            return 0;
        });
        mark(kEvents);
        json out = envelope(kEvents);
        out["abstraction"] = json_io::to_json(abstraction_);
        out["events"] = json_io::to_json(*events_);
        out["candidates"] = json_io::to_json(*candidates_);
        return json_response(200, out);
    }

    HttpResponse correlation(json const& body) {
        auto strategy = guarded(kCases, [&] { return json_io::parse_correlation(body); });
        if (!events_) stale(kEvents, "POST an abstraction first");
        correlation_ = strategy;
        invalidate_from(kCases);
        guarded(kCases, [&] {
            cases_ = correlate_cases(*events_, *correlation_, annotate_->discrete);
            log_ = build_enriched_log(*cases_, ingest_->parsed.streams);
            return 0;
        });
        mark(kCases);
        json case_ids = json::array();
        std::set<std::string> seen;
        for (auto const& e : *cases_) {
            if (seen.insert(*e.case_id).second) case_ids.push_back(*e.case_id);
        }
        json out = envelope(kCases);
        out["correlation"] = json_io::to_json(*correlation_);
        out["cases"] = case_ids;
        out["events"] = json_io::to_json(*cases_);
        return json_response(200, out);
    }

    HttpResponse dfg(std::optional<std::string> const& lifecycle) {
        if (!cases_) stale(kCases, "POST abstraction and correlation first");
        std::optional<Lifecycle> filter = cfg_.lifecycle_filter;
        if (lifecycle) filter = guarded(kDfg, [&] { return json_io::parse_lifecycle_filter(*lifecycle); });
        std::string key = filter ? std::string(to_string(*filter)) : "all";
        auto it = dfg_.find(key);
        if (it == dfg_.end()) {
            auto g = guarded(kDfg, [&] { return mine_dfg(*log_, filter); });
            it = dfg_.emplace(key, std::move(g)).first;
            mark(kDfg);
        }
        json out = envelope(kDfg);
        out["lifecycle"] = key;
        out["dfg"] = json_io::to_json(it->second);
        out["dot"] = export_dfg_dot(it->second);
        return json_response(200, out);
    }

    HttpResponse export_xes_doc(bool raw) {
        if (!log_) stale(kCases, "POST abstraction and correlation first");
        auto xml = export_xes(*log_);
        if (raw) return {200, xml, "application/xml"};
        json out = envelope(kCases);
        out["xes"] = xml;
        return json_response(200, out);
    }

    HttpResponse put_annotations(std::string_view body) {
        auto annotations = guarded(kAnnotate, [&] { return parse_annotations(body); });
        ensure_annotated();
        annotations_override_ = std::move(annotations);
        invalidate_from(kAnnotate);
        ensure_annotated();
        json out = envelope(kAnnotate);
        out["unmapped"] = annotate_->unmapped.size();
        out["discrete_streams"] = annotate_->discrete.size();
        return json_response(200, out);
    }

private:
    std::string id_;
    PipelineConfig cfg_;
    Timestamp window_;
    AbstractionConfig abstraction_;
    std::optional<CorrelationStrategy> correlation_;
    std::optional<AnnotationSet> annotations_override_;

    std::array<std::string, kStageCount> computed_at_;
    std::optional<IngestOutput> ingest_;
    std::optional<AnnotateOutput> annotate_;
    std::optional<Grouped> grouped_;
    std::optional<JointChangeTable> jc_;
    std::optional<TopologyResult> topology_;
    std::optional<std::vector<CandidateEvent>> candidates_;
    std::optional<std::vector<ProcessEvent>> events_;
    std::optional<std::vector<ProcessEvent>> cases_;
    std::optional<std::vector<EnrichedLogRow>> log_;
    std::map<std::string, DirectlyFollowsGraph> dfg_;
};

SessionManager::SessionManager(PipelineConfig defaults, std::filesystem::path base_dir)
    : defaults_(std::move(defaults)), base_dir_(std::move(base_dir)) {}

SessionManager::~SessionManager() = default;

std::shared_ptr<Session> SessionManager::find(std::string const& id) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw HttpError{404, "UnknownSession", "no session " + id};
    return it->second;
}

HttpResponse SessionManager::create(std::string_view body) {
    PipelineConfig cfg = defaults_;
    if (body.find_first_not_of(" \t\r\n") != std::string_view::npos) {
        json doc = parse_body(body);
        if (!doc.is_object()) throw HttpError{400, "SchemaError", "session body must be an object"};
        if (!doc.empty()) cfg = parse_pipeline_config(body, base_dir_);
    }
    std::string id;
    {
        std::lock_guard lock(mutex_);
        id = "s" + std::to_string(next_id_++);
    }
    auto session = std::make_shared<Session>(id, std::move(cfg));
    HttpResponse resp;
    {
        std::lock_guard lock(session->mutex);
        resp = session->created();
    }
    std::lock_guard lock(mutex_);
    sessions_.emplace(id, std::move(session));
    return resp;
}

HttpResponse SessionManager::handle(std::string_view method, std::string_view path, QueryParams const& query,
                                    std::string_view body) {
    auto param = [&](char const* key) -> std::optional<std::string> {
        auto it = query.find(key);
        if (it == query.end()) return std::nullopt;
        return it->second;
    };
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < path.size();) {
        auto j = path.find('/', i);
        if (j == std::string_view::npos) j = path.size();
        if (j > i) parts.emplace_back(path.substr(i, j - i));
        i = j + 1;
    }

    std::string stage_hint = "request";
    try {
        if (parts.size() == 1 && parts[0] == "health" && method == "GET") {
            return json_response(200, {{"stage", "health"}, {"computed_at", now_iso()}, {"status", "ok"}});
        }
        if (parts.empty() || parts[0] != "sessions") throw HttpError{404, "NotFound", std::string(path)};
        if (parts.size() == 1) {
            if (method == "POST") return create(body);
            if (method == "GET") {
                json ids = json::array();
                std::lock_guard lock(mutex_);
                for (auto const& [id, s] : sessions_) ids.push_back(id);
                return json_response(200, {{"stage", "sessions"}, {"computed_at", now_iso()}, {"sessions", ids}});
            }
            throw HttpError{405, "MethodNotAllowed", std::string(method)};
        }
        auto session = find(parts[1]);
        if (parts.size() == 2) {
            if (method == "DELETE") {
                std::lock_guard lock(mutex_);
                sessions_.erase(parts[1]);
                return json_response(200, {{"stage", "session"}, {"computed_at", now_iso()}, {"deleted", parts[1]}});
            }
            if (method != "GET") throw HttpError{405, "MethodNotAllowed", std::string(method)};
            std::lock_guard lock(session->mutex);
            return session->summary();
        }

        std::string route = parts[2];
        for (std::size_t i = 3; i < parts.size(); ++i) route += "/" + parts[i];
        auto window = [&]() -> std::optional<Timestamp> {
            if (auto w = param("window")) return parse_window(*w);
            return std::nullopt;
        };
        std::lock_guard lock(session->mutex);
        if (route == "joint-changes" && method == "GET") return session->joint_changes(window());
        if (route == "topology" && method == "GET") return session->topology(window());
        if (route == "abstraction" && method == "POST") return session->abstraction(parse_body(body));
        if (route == "correlation" && method == "POST") return session->correlation(parse_body(body));
        if (route == "dfg" && method == "GET") return session->dfg(param("lifecycle"));
        if (route == "export/xes" && method == "GET") return session->export_xes_doc(param("format") == "xml");
        if (route == "annotations" && method == "PUT") return session->put_annotations(body);
        throw HttpError{404, "NotFound", std::string(method) + " " + std::string(path)};
    } catch (HttpError const& e) {
        return json_response(e.status, {{"stage", e.status == 409 ? "stale" : "request"},
                                        {"computed_at", now_iso()},
                                        {"error", {{"kind", e.kind}, {"message", e.message}}}});
    } catch (StageError const& e) {
        return json_response(400, {{"stage", e.stage()},
                                   {"computed_at", now_iso()},
                                   {"error", {{"kind", e.kind()}, {"message", e.what()}}}});
    } catch (Error const& e) {
        return json_response(400, {{"stage", stage_hint},
                                   {"computed_at", now_iso()},
                                   {"error", {{"kind", e.kind()}, {"message", e.what()}}}});
    } catch (json::exception const& e) {
        return json_response(400, {{"stage", stage_hint},
                                   {"computed_at", now_iso()},
                                   {"error", {{"kind", "SchemaError"}, {"message", e.what()}}}});
    }
}

}  // namespace procaware
