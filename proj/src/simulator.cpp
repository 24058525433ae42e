#include "procaware/simulator.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <nlohmann/json.hpp>
#include <random>

#include "procaware/error.hpp"
#include "procaware/ingest.hpp"
#include "procaware/text.hpp"

namespace procaware::sim {

using nlohmann::json;

namespace {

enum Sensor : int { S1, S2, S3, S4, S5, S6, S7, kSensorCount };

struct Step {
    Timestamp rel;  // scripted tick within the part
    std::vector<std::pair<int, double>> set;
};

// One part, noise-free. Values hold until overwritten.
std::vector<Step> const& script() {
    static std::vector<Step> const steps{
        {1, {{S1, 512}}},
        {2, {{S1, 0}, {S2, 1}}},
        {3, {{S3, 100}, {S2, 0}, {S4, 0}}},
        {4, {{S3, 0}, {S4, 15}}},
        {5, {{S4, 30}, {S5, 1}}},
        {6, {{S3, 100}, {S6, 500}}},
        {7, {{S3, 0}, {S5, 0}}},
        {11, {{S6, 0}}},
        {12, {{S3, 100}, {S5, 1}}},
        {13, {{S3, 0}, {S5, 0}}},
        {14, {{S4, 45}}},
        {15, {{S4, 60}}},
        {16, {{S3, 100}}},
        {17, {{S3, 0}}},
        {18, {{S4, 40}}},
        {19, {{S4, 10}}},
        {20, {{S4, 0}}},
    };
    return steps;
}

struct Phase {
    char kind;
    char const* label;
    Timestamp first_step;
    Timestamp last_step;
};

constexpr std::array<Phase, 4> kPhases{{
    {'a', "move part", 1, 2},
    {'b', "grab part", 3, 4},
    {'c', "burn part", 5, 13},
    {'d', "store part", 14, 20},
}};

// The crane sensors only report while the crane is active.
constexpr Timestamp kCraneFirst = 3;
constexpr Timestamp kCraneLast = 20;

std::array<SensorInfo, kSensorCount> const& roster() {
    static std::array<SensorInfo, kSensorCount> const r{{
        {SensorId("S1"), "Conveyor energy consumption", "Conveyor motor power draw"},
        {SensorId("S2"), "Conveyor light barrier", "Broken when a part reaches the end of the conveyor"},
        {SensorId("S3"), "Crane Y movement", "Vertical crane position, 100 = fully extended"},
        {SensorId("S4"), "Crane X movement", "Horizontal crane position: 0 conveyor, 30 oven, 60 stockpile"},
        {SensorId("S5"), "Oven door status", "1 = open"},
        {SensorId("S6"), "Oven energy consumption", "Oven heater power draw"},
        {SensorId("S7"), "Ambient temperature", "Shop-floor temperature"},
    }};
    return r;
}

double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::size_t GroundTruth::event_count() const {
    std::size_t n = 0;
    for (auto const& p : parts) n += p.events.size();
    return n;
}

Scenario generate(ScenarioConfig const& cfg) {
    if (cfg.parts < 1) throw Error("InvalidScenario", "parts must be >= 1");
    NoiseConfig const noise = cfg.noise.value_or(NoiseConfig{});
    if (noise.jitter_ticks < 0 || noise.jitter_ticks > kMaxJitter) {
        throw Error("InvalidScenario", "jitter_ticks must be within 0.." + std::to_string(kMaxJitter));
    }
    if (noise.value_noise_pct < 0 || noise.value_noise_pct >= 100) {
        throw Error("InvalidScenario", "value_noise_pct must be within [0, 100)");
    }

    std::mt19937_64 rng(cfg.seed);
    auto const& steps = script();

    // Actual in-part tick of every step, per part. Delays never reorder steps.
    std::vector<std::vector<Timestamp>> actual(static_cast<std::size_t>(cfg.parts));
    for (auto& part : actual) {
        Timestamp prev = 0;
        for (auto const& step : steps) {
            Timestamp delay = noise.jitter_ticks > 0
                                  ? static_cast<Timestamp>(rng() % static_cast<std::uint64_t>(noise.jitter_ticks + 1))
                                  : 0;
            prev = std::max(prev + 1, step.rel + delay);
            part.push_back(prev);
        }
    }
    auto tick_of = [&](std::size_t part, Timestamp rel) {
        for (std::size_t i = 0; i < steps.size(); ++i) {
            if (steps[i].rel == rel) return actual[part][i];
        }
        throw Error("InternalError", "no scripted step at " + std::to_string(rel));
    };

    Scenario out;
    out.manifest.dataset_id = "factory-sim";
    out.manifest.timestamp_unit = TimestampUnit::tick;
    int const sensor_count = cfg.include_ambient ? kSensorCount : S7;
    for (int s = 0; s < sensor_count; ++s) {
        out.manifest.sensors.push_back(roster()[static_cast<std::size_t>(s)]);
        out.streams.push_back({roster()[static_cast<std::size_t>(s)].id, {}});
    }

    std::array<double, kSensorCount> state{};
    Timestamp const horizon = cfg.parts * kPartPeriod;
    for (Timestamp t = 0; t < horizon; ++t) {
        auto const part = static_cast<std::size_t>(t / kPartPeriod);
        Timestamp const rel = t % kPartPeriod;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            if (actual[part][i] != rel) continue;
            for (auto const& [sensor, value] : steps[i].set) state[static_cast<std::size_t>(sensor)] = value;
        }
        state[S7] = (2000.0 + 5.0 * static_cast<double>(t)) / 100.0;

        bool const crane_active = t == 0 || (rel >= tick_of(part, kCraneFirst) && rel <= tick_of(part, kCraneLast));
        for (int s = 0; s < sensor_count; ++s) {
            if ((s == S3 || s == S4) && !crane_active) continue;
            double v = state[static_cast<std::size_t>(s)];
            if (noise.value_noise_pct > 0 && (s == S1 || s == S6 || s == S7)) {
                v *= 1.0 + noise.value_noise_pct / 100.0 * (2.0 * uniform_unit(rng) - 1.0);
            }
            out.streams[static_cast<std::size_t>(s)].readings.push_back({t, v});
        }
    }

    for (int k = 0; k < cfg.parts; ++k) {
        auto const part = static_cast<std::size_t>(k);
        Timestamp const origin = k * kPartPeriod;
        PartTruth pt{k + 1, {}};
        for (auto const& phase : kPhases) {
            pt.events.push_back({phase.kind, phase.label, origin + tick_of(part, phase.first_step),
                                 origin + tick_of(part, phase.last_step)});
        }
        out.truth.parts.push_back(std::move(pt));
    }
    return out;
}

std::string emit_truth(GroundTruth const& truth) {
    json parts = json::array();
    for (auto const& p : truth.parts) {
        json events = json::array();
        for (auto const& e : p.events) {
            events.push_back({{"kind", std::string(1, e.kind)}, {"label", e.label}, {"start", e.start}, {"end", e.end}});
        }
        parts.push_back({{"part_id", p.part_id}, {"events", events}});
    }
    return json{{"parts", parts}}.dump(2) + "\n";
}

GroundTruth parse_truth(std::string_view json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.contains("parts") || !doc["parts"].is_array()) throw Error("SchemaError", "parts");
    GroundTruth truth;
    try {
        for (auto const& p : doc["parts"]) {
            PartTruth pt{p.at("part_id").get<int>(), {}};
            for (auto const& e : p.at("events")) {
                auto kind = e.at("kind").get<std::string>();
                if (kind.size() != 1) throw Error("SchemaError", "events[].kind");
                pt.events.push_back(
                    {kind[0], e.at("label").get<std::string>(), e.at("start").get<Timestamp>(), e.at("end").get<Timestamp>()});
            }
            truth.parts.push_back(std::move(pt));
        }
    } catch (json::exception const& e) {
        throw Error("SchemaError", e.what());
    }
    return truth;
}

void emit_fixture(Scenario const& scenario, std::filesystem::path const& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("IOError", dir.string() + ": " + ec.message());
    for (auto const& s : scenario.streams) {
        text::write_file(dir / (s.sensor.str() + ".csv"), emit_csv({s}));
    }
    text::write_file(dir / "manifest.json", emit_manifest(scenario.manifest));
    text::write_file(dir / "truth.json", emit_truth(scenario.truth));
}

AnnotationSet factory_annotations() {
    auto eq = [](double v, int code, char const* label) { return ValueMappingRule{ExactMatch{v}, {code, label}}; };
    auto range = [](double lo, double hi, int code, char const* label) {
        return ValueMappingRule{RangeMatch{lo, hi}, {code, label}};
    };
    auto gt = [](double b, int code, char const* label) { return ValueMappingRule{GreaterMatch{b}, {code, label}}; };

    std::vector<SensorAnnotation> list{
        {SensorId("S1"), "Conveyor", "Energy Consumption", SourceType::continuous, TargetType::discrete,
         {eq(0, 0, "stopped"), range(1, 1000, 1, "running"), gt(1000, 2, "stuck")}, "W"},
        {SensorId("S2"), "Conveyor", "Light Barrier", SourceType::binary, TargetType::binary,
         {eq(0, 0, "unbroken"), eq(1, 1, "triggered")}},
        {SensorId("S3"), "Crane", "Y Movement", SourceType::continuous, TargetType::discrete,
         {eq(0, 0, "up"), eq(100, 1, "down"), range(1, 99, 2, "moving")}},
        {SensorId("S4"), "Crane", "X Movement", SourceType::continuous, TargetType::discrete,
         {eq(0, 0, "Conveyor pos"), eq(30, 1, "Oven pos"), eq(60, 2, "Stockpile pos"), range(1, 29, 3, "moving"),
          range(31, 59, 3, "moving")}},
        {SensorId("S5"), "Oven", "Door Status", SourceType::binary, TargetType::binary,
         {eq(0, 0, "closed"), eq(1, 1, "open")}},
        {SensorId("S6"), "Oven", "Energy Consumption", SourceType::continuous, TargetType::discrete,
         {eq(0, 0, "off"), range(1, 1000, 1, "heating"), gt(1000, 2, "error")}, "W"},
        {SensorId("S7"), "Ambient", "Temperature", SourceType::continuous, TargetType::discrete, {}, "degC",
         PrivacyLevel::internal},
    };
    AnnotationSet out;
    for (auto& a : list) out.emplace(a.sensor(), std::move(a));
    return out;
}

SensorGrouping factory_grouping(bool include_ambient) {
    auto ids = [&](std::initializer_list<char const*> names) {
        std::vector<SensorId> out;
        for (auto const* n : names) {
            if (include_ambient || std::string_view(n) != "S7") out.emplace_back(n);
        }
        return out;
    };
    return SensorGrouping({
        {{"B", "Buffer"}, ids({"S1", "S2", "S3", "S4", "S7"})},
        {{"O", "Oven"}, ids({"S5", "S6", "S3", "S4"})},
        {{"S", "Stockpile"}, ids({"S3", "S4", "S7"})},
    });
}

std::string factory_pipeline_json(bool include_ambient) {
    json streams = json::array();
    for (int s = 0; s < (include_ambient ? kSensorCount : S7); ++s) {
        streams.push_back(roster()[static_cast<std::size_t>(s)].id.str() + ".csv");
    }
    json doc{
        {"streams", streams},
        {"manifest", "manifest.json"},
        {"annotations", "annotations.json"},
        {"grouping", "grouping.json"},
        {"rank_strategy", "type_heuristic"},
        {"window", 0},
        {"sax", {{"alphabet_size", 3}, {"paa_window", kPartPeriod}}},
        {"abstraction",
         {{"labels",
           json::array({
               {{"signature", "S1"}, {"label", "move part"}},
               {{"signature", "S1+S2"}, {"label", "move part"}},
               {{"signature", "S3+S4"}, {"label", "grab part"}},
               {{"group", "B"}, {"label", "grab part"}},
               {{"group", "O"}, {"label", "burn part"}},
               {{"group", "S"}, {"label", "store part"}},
           })}}},
        {"correlation", {{"strategy", "key_cycle"}, {"sensor", "S1"}, {"reset_code", 1}}},
        {"lifecycle_filter", "start"},
        {"output_dir", "out"},
    };
    return doc.dump(2) + "\n";
}

}  // namespace procaware::sim
