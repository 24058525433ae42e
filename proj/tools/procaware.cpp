#include <CLI11.hpp>

#include <iostream>

#include "procaware/pipeline.hpp"
#include "procaware/session.hpp"
#include "procaware/simulator.hpp"
#include "procaware/text.hpp"
#include "server.hpp"

namespace fs = std::filesystem;
using namespace procaware;

namespace {

int run_command(fs::path const& config, bool lenient, std::optional<Timestamp> window, std::optional<std::size_t> depth,
                std::optional<fs::path> const& out_dir) {
    PipelineConfig cfg;
    try {
        cfg = load_pipeline_config(config);
    } catch (Error const& e) {
        std::cerr << "config: " << e.what() << "\n";
        return 2;
    }
    if (lenient) cfg.lenient = true;
    if (window) cfg.window = *window;
    if (depth) {
        cfg.abstraction.depth = *depth;
        cfg.abstraction.sensors.clear();
    }
    if (out_dir) cfg.output_dir = *out_dir;

    try {
        auto result = run_pipeline(cfg);
        write_artifacts(result, cfg.output_dir);
        std::cout << pipeline_report(result);
        for (auto const& t : result.timings) std::cout << "time." << t.stage << ": " << text::format_number(t.millis) << " ms\n";
        std::cout << "artifacts: " << cfg.output_dir.string() << "\n";
    } catch (StageError const& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (Error const& e) {
        std::cerr << "export: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int simulate_command(sim::ScenarioConfig const& scenario, fs::path const& dir) {
    try {
        auto s = sim::generate(scenario);
        sim::emit_fixture(s, dir);
        text::write_file(dir / "annotations.json", emit_annotations(sim::factory_annotations()));
        text::write_file(dir / "grouping.json", emit_grouping(sim::factory_grouping(scenario.include_ambient)));
        text::write_file(dir / "pipeline.json", sim::factory_pipeline_json(scenario.include_ambient));
        std::cout << "wrote " << s.streams.size() << " streams, " << s.truth.event_count() << " ground-truth events to "
                  << dir.string() << "\n";
    } catch (Error const& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int serve_command(fs::path const& config, std::string const& host, int port, std::optional<fs::path> const& ui) {
    PipelineConfig cfg;
    try {
        cfg = load_pipeline_config(config);
    } catch (Error const& e) {
        std::cerr << "config: " << e.what() << "\n";
        return 2;
    }
    SessionManager sessions(cfg, fs::absolute(config).parent_path());
    if (!tool::serve_http(sessions, host, port, ui)) {
        std::cerr << "serve: cannot listen on " << host << ":" << port << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Turn raw IoT sensor streams into case-correlated event logs and process models"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run every stage and write the artifacts");
    fs::path run_config;
    bool lenient = false;
    std::optional<Timestamp> window;
    std::optional<std::size_t> depth;
    std::optional<fs::path> out_dir;
    run->add_option("-c,--config", run_config, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_flag("--lenient", lenient, "Skip and report bad rows instead of failing");
    run->add_option("--window", window, "Joint-change window in timestamp units")->check(CLI::NonNegativeNumber);
    run->add_option("--depth", depth, "Abstraction depth (top-k topology sensors)")->check(CLI::PositiveNumber);
    run->add_option("-o,--output-dir", out_dir, "Artifact directory (overrides the config)");

    auto* simulate = app.add_subcommand("simulate", "Generate the factory scenario as a ready-to-run fixture");
    sim::ScenarioConfig scenario;
    sim::NoiseConfig noise;
    bool no_ambient = false;
    fs::path sim_dir;
    simulate->add_option("--parts", scenario.parts, "Number of parts")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", scenario.seed, "Random seed");
    simulate->add_option("--jitter", noise.jitter_ticks, "Max delay per scripted step")->check(CLI::Range(0, sim::kMaxJitter));
    simulate->add_option("--noise", noise.value_noise_pct, "Value noise in percent")->check(CLI::Range(0.0, 99.0));
    simulate->add_flag("--no-ambient", no_ambient, "Leave out the ambient temperature sensor");
    simulate->add_option("-o,--output-dir", sim_dir, "Fixture directory")->required();

    auto* serve = app.add_subcommand("serve", "Serve the session API over HTTP");
    fs::path serve_config;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::optional<fs::path> ui_dir;
    serve->add_option("-c,--config", serve_config, "Default pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    serve->add_option("--host", host, "Bind address");
    serve->add_option("-p,--port", port, "Port")->check(CLI::Range(1, 65535));
    serve->add_option("--ui", ui_dir, "Static directory served at /")->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    if (*run) return run_command(run_config, lenient, window, depth, out_dir);
    if (*simulate) {
        if (noise.jitter_ticks > 0 || noise.value_noise_pct > 0) scenario.noise = noise;
        scenario.include_ambient = !no_ambient;
        return simulate_command(scenario, sim_dir);
    }
    return serve_command(serve_config, host, port, ui_dir);
}
