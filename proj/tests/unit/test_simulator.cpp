#include <doctest.h>

#include <map>

#include "helpers.hpp"
#include "procaware/simulator.hpp"

using namespace procaware;
using testing::sid;

namespace {

SensorStream const& stream(sim::Scenario const& s, std::string const& id) {
    for (auto const& st : s.streams) {
        if (st.sensor.str() == id) return st;
    }
    FAIL("no stream " << id);
    throw 0;
}

std::map<std::string, std::string> file_bytes(std::filesystem::path const& dir) {
    std::map<std::string, std::string> out;
    for (auto const& entry : std::filesystem::directory_iterator(dir)) {
        out[entry.path().filename().string()] = text::read_file(entry.path());
    }
    return out;
}

}  // namespace

TEST_CASE("opening pattern of one part") {
    auto s = sim::generate({.parts = 1});
    CHECK(stream(s, "S1").at(1)->value == 512);
    CHECK(stream(s, "S2").at(1)->value == 0);
    CHECK(stream(s, "S1").at(2)->value == 0);
    CHECK(stream(s, "S2").at(2)->value == 1);
    CHECK(stream(s, "S3").at(3)->value == 100);
    CHECK(stream(s, "S4").at(3)->value == 0);
}

TEST_CASE("one light-barrier pulse per part") {
    auto s = sim::generate({.parts = 1});
    std::vector<double> values;
    for (auto const& r : stream(s, "S2").readings) {
        if (values.empty() || values.back() != r.value) values.push_back(r.value);
    }
    CHECK(values == std::vector<double>{0, 1, 0});
}

TEST_CASE("ground truth") {
    auto s = sim::generate({.parts = 3});
    CHECK(s.truth.parts.size() == 3);
    CHECK(s.truth.event_count() == 12);
    std::vector<std::string> labels;
    for (auto const& e : s.truth.parts[1].events) labels.push_back(e.label);
    CHECK(labels == std::vector<std::string>{"move part", "grab part", "burn part", "store part"});
    CHECK(sim::parse_truth(sim::emit_truth(s.truth)) == s.truth);
}

TEST_CASE("determinism") {
    sim::ScenarioConfig cfg{.parts = 2, .noise = sim::NoiseConfig{3, 10.0}, .seed = 99};
    auto a = sim::generate(cfg);
    auto b = sim::generate(cfg);
    CHECK(a.streams == b.streams);
    CHECK(a.truth == b.truth);
    cfg.seed = 100;
    CHECK_FALSE(sim::generate(cfg).streams == a.streams);
}

TEST_CASE("fixture files") {
    auto dir = testing::scratch_dir("sim-fixture");
    auto s = sim::generate({.parts = 1});
    sim::emit_fixture(s, dir);
    auto files = file_bytes(dir);
    CHECK(files.size() == 9);
    for (int i = 1; i <= 7; ++i) CHECK(files.count("S" + std::to_string(i) + ".csv") == 1);
    CHECK(files.count("manifest.json") == 1);
    CHECK(files.count("truth.json") == 1);

    auto again = testing::scratch_dir("sim-fixture-again");
    sim::emit_fixture(sim::generate({.parts = 1}), again);
    CHECK(file_bytes(again) == files);
}

TEST_CASE("jitter keeps the step order") {
    auto s = sim::generate({.parts = 4, .noise = sim::NoiseConfig{3, 0.0}, .seed = 5});
    for (auto const& part : s.truth.parts) {
        for (std::size_t i = 1; i < part.events.size(); ++i) CHECK(part.events[i - 1].end < part.events[i].start);
        for (auto const& e : part.events) CHECK(e.start <= e.end);
    }
}

TEST_CASE("noise-free streams are fully covered by the shipped rules") {
    auto annotations = sim::factory_annotations();
    auto s = sim::generate({.parts = 5});
    for (auto const& st : s.streams) {
        auto const& a = annotations.at(st.sensor);
        if (!a.is_auto()) CHECK(check_annotation_coverage(a, st).coverage == 1.0);
    }
}

TEST_CASE("invalid scenarios") {
    CHECK(testing::error_kind([] { sim::generate({.parts = 0}); }) == "InvalidScenario");
    CHECK(testing::error_kind([] { sim::generate({.parts = 1, .noise = sim::NoiseConfig{4, 0}}); }) ==
          "InvalidScenario");
}
