#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "procaware/pipeline.hpp"

namespace procaware {

struct HttpResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

using QueryParams = std::map<std::string, std::string>;

class Session;

/// In-memory sessions behind a transport-independent router. Each session
/// caches the outputs of ingest, annotate, joint_changes, topology, events,
/// cases and dfg; changing a parameter drops exactly the caches downstream
/// of it. Requests on one session are serialized.
///
///   POST   /sessions                         create (body: pipeline config, or empty for the default)
///   GET    /sessions                         list
///   GET    /sessions/{id}                    cache state
///   DELETE /sessions/{id}
///   GET    /sessions/{id}/joint-changes?window=w
///   GET    /sessions/{id}/topology?window=w
///   POST   /sessions/{id}/abstraction        {depth | sensors, labels, lifecycle_overrides}
///   POST   /sessions/{id}/correlation        {strategy, gap | sensor, reset_code}
///   GET    /sessions/{id}/dfg?lifecycle=start|complete|unknown|all
///   GET    /sessions/{id}/export/xes[?format=xml]
///   PUT    /sessions/{id}/annotations        annotation array; re-runs annotation
///
/// Every JSON response carries `stage` and `computed_at`. Invalid input is
/// 400, an unknown session 404, a request whose upstream stage is missing
/// or stale 409.
class SessionManager {
public:
    SessionManager(PipelineConfig defaults, std::filesystem::path base_dir);
    ~SessionManager();

    HttpResponse handle(std::string_view method, std::string_view path, QueryParams const& query,
                        std::string_view body);

private:
    HttpResponse create(std::string_view body);
    std::shared_ptr<Session> find(std::string const& id);

    PipelineConfig defaults_;
    std::filesystem::path base_dir_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::size_t next_id_ = 1;
};

}  // namespace procaware
