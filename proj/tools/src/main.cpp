#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rfdaq/pipeline/pipeline.hpp"

using namespace rfdaq;

namespace {

pipeline::RunConfig base_config(pipeline::RunMode mode, const std::string& config_path) {
    pipeline::RunConfig cfg = config_path.empty() ? pipeline::default_config(mode)
                                                  : pipeline::load_config(config_path);
    cfg.mode = mode;  // the subcommand decides the workflow
    return cfg;
}

void print_report(const pipeline::RunReport& rep, const pipeline::RunConfig& cfg) {
    std::printf("workflow: %s\n", rep.mode.c_str());
    for (const auto& s : rep.stages) {
        std::printf("  %-18s %s", s.name.c_str(), s.status.c_str());
        if (!s.detail.empty()) std::printf("  (%s)", s.detail.c_str());
        std::printf("\n");
    }
    if (!rep.metrics.empty()) {
        std::printf("metrics:\n");
        for (const auto& [k, v] : rep.metrics) std::printf("  %-28s %.6g\n", k.c_str(), v);
    }
    std::printf("artifacts in %s:", cfg.output_dir.string().c_str());
    for (const auto& o : rep.outputs) std::printf(" %s", o.c_str());
    std::printf("\n");
}

int run_cli(int argc, char** argv) {
    CLI::App app{"software model of a 256-channel ultrasound/optoacoustic streaming DAQ"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::optional<uint64_t> seed;
    for (CLI::App* sub : {app.add_subcommand("acquire", "trigger, capture and ship frames"),
                          app.add_subcommand("stress", "sweep the transport throughput grid"),
                          app.add_subcommand("characterize", "gain curve, corners and SNR"),
                          app.add_subcommand("budget", "buffer capacity and frame-rate table")}) {
        sub->add_option("-c,--config", config_path, "JSON run configuration");
        sub->add_option("-o,--output", output_dir, "artifact directory");
        sub->add_option("--seed", seed, "front-end noise seed");
    }

    CLI::App* acquire = app.get_subcommand("acquire");
    std::string probe_mode = "us";
    std::optional<int> frames;
    std::optional<double> trigger_time, gain_db, noise_rms, loss;
    std::optional<uint64_t> window, delay;
    std::optional<int> batch;
    bool reorder = false, no_scramble = false;
    acquire->add_option("--mode", probe_mode, "probe mode: us or oa")
        ->check(CLI::IsMember({"us", "oa"}));
    acquire->add_option("--frames", frames, "trigger events to fire");
    acquire->add_option("--trigger-time", trigger_time, "first trigger, seconds");
    acquire->add_option("--window", window, "samples per channel per frame");
    acquire->add_option("--delay", delay, "trigger-to-capture delay, cycles");
    acquire->add_option("--gain-db", gain_db, "front-end gain");
    acquire->add_option("--noise-rms", noise_rms, "converter-referred noise, LSB");
    acquire->add_option("--batch", batch, "transport work requests per post");
    acquire->add_option("--loss", loss, "fabric loss probability");
    acquire->add_flag("--reorder", reorder, "fabric reorders datagrams");
    acquire->add_flag("--no-scramble", no_scramble, "disable link scrambling");

    CLI::App* stress = app.get_subcommand("stress");
    std::optional<int> repeats;
    std::optional<double> poll_us;
    std::vector<size_t> payloads;
    std::vector<int> batches;
    stress->add_option("--repeats", repeats, "runs per grid point");
    stress->add_option("--poll-overhead-us", poll_us, "host cost per batch, microseconds");
    stress->add_option("--payload", payloads, "payload sizes, bytes");
    stress->add_option("--batches", batches, "batch depths");

    CLI::App* charac = app.get_subcommand("characterize");
    std::optional<double> grid_start, grid_step, hp, lp, c_noise, c_gain;
    std::optional<size_t> record;
    std::vector<double> tones;
    charac->add_option("--grid-start", grid_start, "first tone, Hz");
    charac->add_option("--grid-step", grid_step, "tone spacing, Hz");
    charac->add_option("--record", record, "samples per record");
    charac->add_option("--tone", tones, "explicit tone list, Hz");
    charac->add_option("--hp", hp, "response high-pass corner, Hz");
    charac->add_option("--lp", lp, "response low-pass corner, Hz");
    charac->add_option("--noise-rms", c_noise, "converter-referred noise, LSB");
    charac->add_option("--gain-db", c_gain, "front-end gain");

    CLI::App* budget = app.get_subcommand("budget");
    bool no_reference = false;
    budget->add_flag("--no-reference", no_reference, "skip the documented reference rows");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    pipeline::RunMode mode;
    if (app.got_subcommand(acquire))
        mode = probe_mode == "oa" ? pipeline::RunMode::acquire_oa : pipeline::RunMode::acquire_us;
    else if (app.got_subcommand(stress))
        mode = pipeline::RunMode::stress;
    else if (app.got_subcommand(charac))
        mode = pipeline::RunMode::characterize;
    else
        mode = pipeline::RunMode::budget;

    pipeline::RunConfig cfg = base_config(mode, config_path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (seed) cfg.afe.seed = *seed;

    if (app.got_subcommand(acquire)) {
        if (frames) cfg.frames = *frames;
        if (trigger_time) cfg.trigger_time_s = *trigger_time;
        if (window) cfg.trigger.window = *window;
        if (delay) cfg.trigger.delay = *delay;
        if (gain_db) cfg.afe.gain_db = *gain_db;
        if (noise_rms) cfg.afe.noise_rms = *noise_rms;
        if (batch) cfg.transport.batch = *batch;
        if (loss) cfg.transport.channel.loss_probability = *loss;
        if (reorder) cfg.transport.channel.reorder = true;
        if (no_scramble) {
            cfg.link.scrambling_enabled = false;
        }
    } else if (app.got_subcommand(stress)) {
        if (repeats) cfg.stress.repeats = *repeats;
        if (poll_us) cfg.stress.poll_overhead_s = *poll_us * 1e-6;
        if (!payloads.empty()) cfg.stress.payload_bytes = payloads;
        if (!batches.empty()) cfg.stress.batch_sizes = batches;
    } else if (app.got_subcommand(charac)) {
        if (grid_start) cfg.characterize.grid_start_hz = *grid_start;
        if (grid_step) cfg.characterize.grid_step_hz = *grid_step;
        if (record) cfg.characterize.record_samples = *record;
        if (!tones.empty()) cfg.characterize.tones = tones;
        if (hp) cfg.afe.response_hp_hz = *hp;
        if (lp) cfg.afe.response_lp_hz = *lp;
        if (c_noise) cfg.afe.noise_rms = *c_noise;
        if (c_gain) cfg.afe.gain_db = *c_gain;
    } else if (no_reference) {
        cfg.budget.include_reference = false;
    }

    const pipeline::RunReport rep = pipeline::run(cfg);
    print_report(rep, cfg);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const StageError& e) {
        std::fprintf(stderr, "error [%s]: %s\n", stage_name(e.stage()), e.what());
        return static_cast<int>(e.stage());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
