#include <doctest.h>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "procaware/pipeline.hpp"
#include "procaware/xes.hpp"

using namespace procaware;
namespace fs = std::filesystem;

namespace {

fs::path factory_copy(std::string const& name) {
    auto dir = testing::scratch_dir(name);
    for (auto const& entry : fs::directory_iterator(testing::data_dir() / "factory")) {
        if (entry.is_regular_file()) fs::copy_file(entry.path(), dir / entry.path().filename());
    }
    return dir;
}

}  // namespace

TEST_CASE("micro fixture artifacts") {
    auto out = testing::scratch_dir("pipeline-micro");
    auto cfg = load_pipeline_config(testing::data_dir() / "micro" / "pipeline.json");
    cfg.output_dir = out;
    auto result = run_pipeline(cfg);
    write_artifacts(result, out);

    auto csv = text::read_file(out / "topology.csv");
    auto first_row = csv.substr(csv.find('\n') + 1);
    first_row = first_row.substr(0, first_row.find('\n'));
    CHECK(first_row.rfind("S2,", 0) == 0);
    CHECK(first_row.find(",7,3,") != std::string::npos);

    for (auto const* f : {"topology.json", "topology.csv", "events.json", "log.xes", "dfg.dot", "dfg.json",
                          "report.txt", "timing.txt"}) {
        CHECK(fs::exists(out / f));
    }
    CHECK(result.events.size() == 3);
    CHECK(result.timings.size() == 8);
}

TEST_CASE("factory fixture yields three traces") {
    auto dir = factory_copy("pipeline-factory");
    auto cfg = load_pipeline_config(dir / "pipeline.json");
    auto result = run_pipeline(cfg);
    write_artifacts(result, cfg.output_dir);
    auto xml = text::read_file(cfg.output_dir / "log.xes");
    std::size_t traces = 0;
    for (auto p = xml.find("<trace>"); p != std::string::npos; p = xml.find("<trace>", p + 1)) ++traces;
    CHECK(traces == 3);
    CHECK(parse_xes(xml) == result.log);
    CHECK(result.dfg.edge_total() == 9);
}

TEST_CASE("missing annotation file") {
    auto cfg = load_pipeline_config(testing::data_dir() / "micro" / "pipeline.json");
    cfg.annotations = testing::scratch_dir("pipeline-missing") / "nope.json";
    try {
        run_pipeline(cfg);
        FAIL("expected a stage error");
    } catch (StageError const& e) {
        CHECK(e.stage() == "annotate");
        CHECK(e.kind() == "MissingAnnotation");
        CHECK(std::string(e.what()).rfind("annotate: MissingAnnotation", 0) == 0);
    }
}

TEST_CASE("stream without an annotation") {
    auto cfg = load_pipeline_config(testing::data_dir() / "micro" / "pipeline.json");
    auto dir = testing::scratch_dir("pipeline-partial");
    auto annotations = sim::factory_annotations();
    annotations.erase(SensorId("S3"));
    text::write_file(dir / "annotations.json", emit_annotations(annotations));
    cfg.annotations = dir / "annotations.json";
    try {
        run_pipeline(cfg);
        FAIL("expected a stage error");
    } catch (StageError const& e) {
        CHECK(std::string(e.what()).rfind("annotate: MissingAnnotation", 0) == 0);
    }
}

TEST_CASE("strict ingest rejects sensors outside the roster") {
    auto dir = testing::scratch_dir("pipeline-roster");
    text::write_file(dir / "s.csv", "sensor_id,timestamp,value\nS9,1,0\n");
    text::write_file(dir / "m.json", R"({"timestamp_unit":"tick","sensors":[{"id":"S1"}]})");
    auto cfg = parse_pipeline_config(R"({"streams":["s.csv"],"manifest":"m.json","annotations":"a.json","grouping":"g.json"})", dir);
    try {
        ingest_stage(cfg);
        FAIL("expected an error");
    } catch (Error const& e) {
        CHECK(e.kind() == "UnknownSensor");
    }
    cfg.lenient = true;
    CHECK_FALSE(ingest_stage(cfg).validation.ok());
}

TEST_CASE("artifacts are reproducible") {
    auto cfg = load_pipeline_config(testing::data_dir() / "micro" / "pipeline.json");
    auto a = testing::scratch_dir("pipeline-idem-a");
    auto b = testing::scratch_dir("pipeline-idem-b");
    write_artifacts(run_pipeline(cfg), a);
    write_artifacts(run_pipeline(cfg), b);
    for (auto const* f : {"topology.json", "topology.csv", "events.json", "log.xes", "dfg.dot", "dfg.json", "report.txt"}) {
        CHECK(text::read_file(a / f) == text::read_file(b / f));
    }
}

TEST_CASE("stream directories expand to their files") {
    auto dir = factory_copy("pipeline-dir");
    fs::create_directories(dir / "streams");
    for (int i = 1; i <= 7; ++i) {
        auto name = "S" + std::to_string(i) + ".csv";
        fs::rename(dir / name, dir / "streams" / name);
    }
    auto doc = text::read_file(dir / "pipeline.json");
    auto json = nlohmann::json::parse(doc);
    json["streams"] = {"streams"};
    auto cfg = parse_pipeline_config(json.dump(), dir);
    CHECK(cfg.streams.size() == 7);
    CHECK(run_pipeline(cfg).dfg.edge_total() == 9);
}
