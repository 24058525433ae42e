#pragma once

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "procaware/abstraction.hpp"
#include "procaware/annotate.hpp"
#include "procaware/error.hpp"
#include "procaware/ingest.hpp"
#include "procaware/simulator.hpp"
#include "procaware/text.hpp"
#include "procaware/topology.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return PROCAWARE_DATA_DIR; }

inline procaware::SensorId sid(std::string const& s) { return procaware::SensorId(s); }

inline std::set<std::string> ids(std::vector<procaware::SensorId> const& v) {
    std::set<std::string> out;
    for (auto const& s : v) out.insert(s.str());
    return out;
}

inline std::set<std::string> context_ids(std::vector<procaware::ContextReading> const& ctx) {
    std::set<std::string> out;
    for (auto const& c : ctx) out.insert(c.sensor.str());
    return out;
}

/// The seven-tick crane fixture (S2, S3, S4) shipped under data/micro.
struct Micro {
    std::vector<procaware::SensorStream> streams;
    procaware::AnnotationSet annotations = procaware::sim::factory_annotations();
    procaware::SensorGrouping grouping = procaware::sim::factory_grouping();
    procaware::SensorRanking ranking;
    std::vector<procaware::DiscreteStream> discrete;

    Micro() {
        auto parsed = procaware::load_streams({data_dir() / "micro" / "streams.csv"});
        streams = parsed.streams;
        ranking = procaware::rank_sensors(grouping, annotations);
        for (auto const& s : streams) discrete.push_back(procaware::apply_annotation(s, annotations.at(s.sensor)));
    }

    [[nodiscard]] procaware::JointChangeTable jc(procaware::Timestamp window = 0) const {
        return procaware::detect_joint_changes(discrete, window);
    }

    [[nodiscard]] procaware::TopologyResult topology(procaware::Timestamp window = 0) const {
        return procaware::compute_topology(jc(window), grouping, ranking);
    }
};

/// Discrete stream with one point per tick.
inline procaware::DiscreteStream dense_stream(std::string const& sensor, std::vector<int> const& codes) {
    procaware::DiscreteStream d;
    d.sensor = procaware::SensorId(sensor);
    for (std::size_t t = 0; t < codes.size(); ++t) {
        d.points.push_back({static_cast<procaware::Timestamp>(t), codes[t]});
    }
    return d;
}

inline std::vector<procaware::Timestamp> event_times(std::vector<procaware::CandidateEvent> const& events) {
    std::vector<procaware::Timestamp> out;
    for (auto const& e : events) out.push_back(e.timestamp);
    return out;
}

inline procaware::EnrichedLogRow make_row(std::string const& case_id, std::string const& event_id,
                                          procaware::Timestamp t, std::string const& label,
                                          procaware::Lifecycle lc = procaware::Lifecycle::start) {
    return procaware::EnrichedLogRow({procaware::SensorId("S1")}, {1.0}, {t}, {procaware::PrivacyLevel::public_},
                                     case_id, event_id, t, lc, label);
}

inline std::filesystem::path scratch_dir(std::string const& name) {
    auto dir = std::filesystem::temp_directory_path() / ("procaware-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing

namespace testing {

/// Kind token of the procaware::Error thrown by `fn`, or "" if nothing is thrown.
template <typename Fn>
std::string error_kind(Fn&& fn) {
    try {
        fn();
    } catch (procaware::Error const& e) {
        return e.kind();
    }
    return "";
}

}  // namespace testing
