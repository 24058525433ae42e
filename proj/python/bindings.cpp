#include <pybind11/eval.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <map>

#include "procaware/json_io.hpp"
#include "procaware/pipeline.hpp"
#include "procaware/session.hpp"
#include "procaware/simulator.hpp"
#include "procaware/text.hpp"
#include "procaware/xes.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace procaware;
using nlohmann::json;

namespace {

// Library errors surface in Python as procaware.ProcawareError(kind, message).
PyObject* g_error_type = nullptr;

template <typename Fn>
auto translate(Fn&& fn) {
    try {
        return fn();
    } catch (StageError const& e) {
        py::object err = py::reinterpret_borrow<py::object>(g_error_type)(e.kind(), e.what(), e.stage());
        PyErr_SetObject(g_error_type, err.ptr());
        throw py::error_already_set();
    } catch (Error const& e) {
        py::object err = py::reinterpret_borrow<py::object>(g_error_type)(e.kind(), e.what(), py::none());
        PyErr_SetObject(g_error_type, err.ptr());
        throw py::error_already_set();
    }
}

std::string run(fs::path const& config, std::optional<fs::path> const& output_dir, std::optional<Timestamp> window,
                std::optional<std::size_t> depth, bool lenient) {
    return translate([&] {
        auto cfg = load_pipeline_config(config);
        if (window) cfg.window = *window;
        if (depth) {
            cfg.abstraction.depth = *depth;
            cfg.abstraction.sensors.clear();
        }
        cfg.lenient = cfg.lenient || lenient;
        auto result = run_pipeline(cfg);
        if (output_dir) write_artifacts(result, *output_dir);

        std::vector<std::string> cases;
        for (auto const& e : result.events) {
            if (e.case_id && (cases.empty() || std::find(cases.begin(), cases.end(), *e.case_id) == cases.end())) {
                cases.push_back(*e.case_id);
            }
        }
        json timings = json::object();
        for (auto const& t : result.timings) timings[t.stage] = t.millis;
        json out{{"report", pipeline_report(result)},
                 {"readings", result.ingest.parsed.reading_count},
                 {"joint_changes", json_io::to_json(result.joint_changes)},
                 {"topology", json_io::to_json(result.topology.rows)},
                 {"trace", json_io::to_json(result.topology.trace)},
                 {"events", json_io::to_json(result.events)},
                 {"cases", cases},
                 {"dfg", json_io::to_json(result.dfg)},
                 {"dot", export_dfg_dot(result.dfg)},
                 {"xes", export_xes(result.log)},
                 {"timings_ms", timings}};
        return out.dump();
    });
}

std::size_t simulate(fs::path const& output_dir, int parts, std::uint64_t seed, int jitter, double noise_pct,
                     bool include_ambient) {
    return translate([&] {
        sim::ScenarioConfig cfg{.parts = parts, .seed = seed, .include_ambient = include_ambient};
        if (jitter > 0 || noise_pct > 0) cfg.noise = sim::NoiseConfig{jitter, noise_pct};
        auto scenario = sim::generate(cfg);
        sim::emit_fixture(scenario, output_dir);
        text::write_file(output_dir / "annotations.json", emit_annotations(sim::factory_annotations()));
        text::write_file(output_dir / "grouping.json", emit_grouping(sim::factory_grouping(include_ambient)));
        text::write_file(output_dir / "pipeline.json", sim::factory_pipeline_json(include_ambient));
        return scenario.truth.event_count();
    });
}

std::vector<int> sax(std::vector<double> const& values, int alphabet_size, int paa_window) {
    return translate([&] {
        SensorStream s{SensorId("x"), {}};
        for (std::size_t i = 0; i < values.size(); ++i) s.readings.push_back({static_cast<Timestamp>(i), values[i]});
        auto r = auto_discretize(s, {alphabet_size, paa_window});
        std::vector<int> out;
        for (auto const& p : r.stream.points) out.push_back(p.code);
        return out;
    });
}

/// Joint changes of discrete streams given as {sensor: [(timestamp, code), ...]}.
std::vector<std::pair<Timestamp, std::vector<std::string>>> joint_changes(
    std::map<std::string, std::vector<std::pair<Timestamp, int>>> const& streams, Timestamp window) {
    return translate([&] {
        std::vector<DiscreteStream> discrete;
        for (auto const& [id, points] : streams) {
            DiscreteStream d{SensorId(id), {}, {}, Provenance::rule_mapped};
            for (auto const& [t, code] : points) d.points.push_back({t, code});
            discrete.push_back(std::move(d));
        }
        auto jc = detect_joint_changes(discrete, window);
        std::vector<std::pair<Timestamp, std::vector<std::string>>> out;
        for (std::size_t e = 0; e < jc.size(); ++e) {
            std::vector<std::string> ids;
            for (auto const& s : jc.sensors_at(e)) ids.push_back(s.str());
            out.emplace_back(jc.timestamp(e), std::move(ids));
        }
        return out;
    });
}

/// In-process handle on the session API; the same routes the HTTP server serves.
class Service {
public:
    explicit Service(fs::path const& config)
        : manager_(translate([&] { return load_pipeline_config(config); }), fs::absolute(config).parent_path()) {}

    std::tuple<int, std::string, std::string> request(std::string const& method, std::string const& path,
                                                      std::string const& body, QueryParams const& query) {
        auto r = manager_.handle(method, path, query, body);
        return {r.status, r.body, r.content_type};
    }

private:
    SessionManager manager_;
};

}  // namespace

PYBIND11_MODULE(_procaware, m) {
    m.doc() = "IoT sensor streams to case-correlated event logs and directly-follows graphs";

    py::dict ns;
    ns["__builtins__"] = py::module_::import("builtins");
    ns["__name__"] = "procaware";
    py::exec(R"(
class ProcawareError(Exception):
    def __init__(self, kind, message, stage=None):
        super().__init__(message)
        self.kind = kind
        self.stage = stage
)",
             ns);
    py::object error_type = ns["ProcawareError"];
    error_type.attr("__module__") = "procaware";
    m.attr("ProcawareError") = error_type;
    g_error_type = error_type.ptr();
    Py_INCREF(g_error_type);

    m.def("run", &run, py::arg("config"), py::arg("output_dir") = py::none(), py::arg("window") = py::none(),
          py::arg("depth") = py::none(), py::arg("lenient") = false,
          "Run every stage on a pipeline config; returns the results as a JSON string.");
    m.def("simulate", &simulate, py::arg("output_dir"), py::arg("parts") = 1, py::arg("seed") = 0,
          py::arg("jitter") = 0, py::arg("noise_pct") = 0.0, py::arg("include_ambient") = true,
          "Write the factory scenario as a runnable fixture; returns the ground-truth event count.");
    m.def("sax", &sax, py::arg("values"), py::arg("alphabet_size") = 3, py::arg("paa_window") = 1);
    m.def("joint_changes", &joint_changes, py::arg("streams"), py::arg("window") = 0);
    m.def("xes_roundtrip", [](std::string const& xml) { return translate([&] { return export_xes(parse_xes(xml)); }); },
          py::arg("xml"));

    py::class_<Service>(m, "Service")
        .def(py::init<fs::path const&>(), py::arg("config"))
        .def("request", &Service::request, py::arg("method"), py::arg("path"), py::arg("body") = "",
             py::arg("query") = QueryParams{});
}
