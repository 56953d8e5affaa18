#include <filesystem>
#include <fstream>

#include <doctest.h>
#include <json.hpp>

#include "rfdaq/pipeline/pipeline.hpp"

using namespace rfdaq;
using namespace rfdaq::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "rfdaq_pipeline_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("mode names round-trip") {
    for (RunMode m : {RunMode::acquire_us, RunMode::acquire_oa, RunMode::stress,
                      RunMode::characterize, RunMode::budget})
        CHECK(parse_mode(mode_name(m)) == m);
    CHECK_THROWS_AS(parse_mode("bogus"), StageError);
}

TEST_CASE("defaults validate for every mode") {
    for (RunMode m : {RunMode::acquire_us, RunMode::acquire_oa, RunMode::stress,
                      RunMode::characterize, RunMode::budget})
        CHECK_NOTHROW(default_config(m).validate());

    const RunConfig us = default_config(RunMode::acquire_us);
    CHECK(us.trigger.source == acq::TriggerConfig::Source::internal_pulser);
    CHECK(std::holds_alternative<afe::PulseEcho>(us.scenario.shape));
    CHECK(us.afe.channels == us.link.channels());

    const RunConfig oa = default_config(RunMode::acquire_oa);
    CHECK(oa.trigger.source == acq::TriggerConfig::Source::external);
    CHECK(oa.scenario.active_channels == std::vector<int>{4, 5, 6, 7});

    const RunConfig ch = default_config(RunMode::characterize);
    CHECK(ch.afe.sample_rate == 125e6);
    CHECK(ch.afe.noise_rms > 0.0);
}

TEST_CASE("json config applies overrides and tolerates comments") {
    const std::string text = R"({
        // tuned for a lossy bench
        "mode": "acquire_oa",
        "output_dir": "runs/lossy",
        "frames": 2,
        "afe": {"gain_db": 6.0, "noise_rms": 1.5},
        "trigger": {"delay": 100, "window": 1024},
        "transport": {
            "batch": 4,
            "channel": {"loss_probability": 0.02, "reorder": true, "seed": 9}
        },
        "bucket": {"tau_s": 1e-4}
    })";
    const RunConfig cfg = parse_config_json(text);
    CHECK(cfg.mode == RunMode::acquire_oa);
    CHECK(cfg.output_dir == fs::path("runs/lossy"));
    CHECK(cfg.frames == 2);
    CHECK(cfg.afe.gain_db == 6.0);
    CHECK(cfg.afe.noise_rms == 1.5);
    CHECK(cfg.trigger.delay == 100);
    CHECK(cfg.trigger.window == 1024);
    CHECK(cfg.transport.batch == 4);
    CHECK(cfg.transport.channel.loss_probability == 0.02);
    CHECK(cfg.transport.channel.reorder);
    CHECK(cfg.bucket.tau_s == 1e-4);
    // The OA default scenario survives when no scenario block is given.
    CHECK(!cfg.scenario_overridden);
    CHECK(std::holds_alternative<afe::OaPulse>(cfg.scenario.shape));

    CHECK_THROWS_AS(parse_config_json("{"), StageError);
    CHECK_THROWS_AS(parse_config_json(R"({"mode": "warp"})"), StageError);
    CHECK_THROWS_AS(parse_config_json(R"({"scenario": {"shape": "sawtooth"}})"), StageError);
}

TEST_CASE("validation rejects inconsistent setups") {
    auto expect_config_error = [](RunConfig cfg) {
        try {
            cfg.validate();
            FAIL("expected a config error");
        } catch (const StageError& e) {
            CHECK(e.stage() == Stage::config);
        }
    };

    RunConfig cfg = default_config(RunMode::acquire_us);
    cfg.afe.channels = 8;  // no longer matches the 16-channel link
    expect_config_error(cfg);

    cfg = default_config(RunMode::acquire_us);
    cfg.ring_capacity_bytes = cfg.ring_block_bytes * 3 + 1;
    expect_config_error(cfg);

    cfg = default_config(RunMode::acquire_us);
    cfg.transport.batch = 0;
    expect_config_error(cfg);

    cfg = default_config(RunMode::acquire_us);
    cfg.analysis.band_hi_hz = 50e6;  // past Nyquist at 80 MSPS
    expect_config_error(cfg);

    cfg = default_config(RunMode::characterize);
    cfg.characterize.record_samples = 32;
    expect_config_error(cfg);

    cfg = default_config(RunMode::stress);
    cfg.stress.payload_bytes.clear();
    expect_config_error(cfg);
}

TEST_CASE("report json carries stages, metrics and checksums") {
    RunReport rep;
    rep.mode = "acquire_us";
    rep.add_stage("config", "ok", "validated");
    rep.metrics["x"] = 1.5;
    rep.outputs.push_back("csv/a.csv");
    rep.checksum_source = 0xDEADBEEFCAFE1234ull;
    rep.checksum_host = 0xDEADBEEFCAFE1234ull;
    rep.payload_bit_exact = true;

    const auto j = nlohmann::json::parse(rep.to_json());
    CHECK(j["mode"] == "acquire_us");
    CHECK(j["stages"][0]["name"] == "config");
    CHECK(j["stages"][0]["status"] == "ok");
    CHECK(j["metrics"]["x"] == 1.5);
    CHECK(j["outputs"][0] == "csv/a.csv");
    CHECK(j["payload_bit_exact"] == true);
    CHECK(j["checksum_source"] == "deadbeefcafe1234");
}

TEST_CASE("budget workflow reproduces the documented operating points") {
    RunConfig cfg = default_config(RunMode::budget);
    cfg.output_dir = fresh_dir("budget");
    const RunReport rep = run(cfg);

    CHECK(rep.metrics.at("l_tau_zero") == 11566.0);
    CHECK(rep.metrics.at("fps_tau_zero") == doctest::Approx(2017.970236).epsilon(1e-6));
    CHECK(rep.metrics.at("l_buffer_4mib") == 5639.0);
    CHECK(rep.metrics.at("fps_buffer_4mib") == doctest::Approx(4139.004034).epsilon(1e-6));
    CHECK(rep.metrics.at("l_buffer_4mb") == 5639.0);
    CHECK(rep.metrics.at("fps_short_frame_2000") == doctest::Approx(11669.921875).epsilon(1e-6));

    const std::string csv = slurp(cfg.output_dir / "csv" / "budget.csv");
    CHECK(csv.starts_with("channels,bits,fs,B,R_out,tau_s,L_f_max,FPS_max\n"));
    CHECK(csv.find("11566") != std::string::npos);
    CHECK(fs::exists(cfg.output_dir / "report.json"));

    const auto j = nlohmann::json::parse(slurp(cfg.output_dir / "report.json"));
    CHECK(j["mode"] == "budget");
}

TEST_CASE("acquire micro-run moves one block bit-exactly") {
    RunConfig cfg = default_config(RunMode::acquire_us);
    cfg.output_dir = fresh_dir("acquire_us");
    cfg.trigger.window = 512;   // exactly one 256 KiB block at 256 padded channels
    cfg.trigger.delay = 2000;   // capture straddles the first phantom echo
    const RunReport rep = run(cfg);

    CHECK(rep.completions == 1);
    CHECK(rep.payload_bit_exact);
    CHECK(rep.checksum_source == rep.checksum_host);
    CHECK(rep.bytes_transferred == 256 * 1024);
    CHECK(rep.overflow_count == 0);
    CHECK(rep.metrics.at("frames_captured") == 1.0);
    for (const StageReport& s : rep.stages) CHECK(s.status == "ok");

    // The first phantom layer sits 20 mm deep.
    CHECK(rep.metrics.at("peak_depth_mm") == doctest::Approx(20.0).epsilon(0.01));

    CHECK(fs::exists(cfg.output_dir / "frames" / "frame_000.rfsb"));
    CHECK(fs::exists(cfg.output_dir / "images" / "frame_000.pgm"));
    CHECK(fs::exists(cfg.output_dir / "csv" / "image_frame_000.csv"));
    CHECK(fs::exists(cfg.output_dir / "report.json"));
}

TEST_CASE("oa micro-run concentrates energy in the illuminated channels") {
    RunConfig cfg = default_config(RunMode::acquire_oa);
    cfg.output_dir = fresh_dir("acquire_oa");
    cfg.trigger.window = 512;
    const RunReport rep = run(cfg);

    CHECK(rep.completions == 1);
    CHECK(rep.payload_bit_exact);
    CHECK(rep.metrics.at("oa_energy_fraction") >= 0.9);
}

TEST_CASE("acquire refuses a frame the buffer cannot sustain") {
    RunConfig cfg = default_config(RunMode::acquire_us);
    cfg.output_dir = fresh_dir("acquire_fail");
    cfg.trigger.window = 12000;  // beyond the 11566-sample bound
    try {
        run(cfg);
        FAIL("expected an acquisition error");
    } catch (const StageError& e) {
        CHECK(e.stage() == Stage::acquisition);
    }
}

TEST_CASE("stress micro-run reports a deterministic grid") {
    RunConfig cfg = default_config(RunMode::stress);
    cfg.output_dir = fresh_dir("stress");
    cfg.stress.payload_bytes = {64 * 1024, 256 * 1024};
    cfg.stress.batch_sizes = {1, 4};
    cfg.stress.repeats = 2;
    cfg.stress.bytes_per_run = 4 * 1024 * 1024;
    const RunReport rep = run(cfg);

    CHECK(rep.metrics.at("goodput_best_gbps") > 0.0);
    CHECK(rep.metrics.at("goodput_best_gbps") < 100.0);  // cannot beat the wire
    CHECK(rep.metrics.at("goodput_worst_spread_gbps") == 0.0);
    CHECK(rep.metrics.at("goodput_batch_gain") > 1.0);
    CHECK(fs::exists(cfg.output_dir / "csv" / "throughput_runs.csv"));
    CHECK(fs::exists(cfg.output_dir / "csv" / "throughput_summary.csv"));
}

TEST_CASE("characterize micro-run finds the programmed band") {
    RunConfig cfg = default_config(RunMode::characterize);
    cfg.output_dir = fresh_dir("characterize");
    cfg.afe.response_hp_hz = 2e6;
    cfg.afe.response_lp_hz = 20e6;
    cfg.characterize.record_samples = 4096;
    cfg.characterize.tones = {1e6, 2e6, 4e6, 6e6, 10e6, 16e6, 24e6, 32e6};
    const RunReport rep = run(cfg);

    // True corners of the 2/20 MHz first-order pair are 1.69 and 23.7 MHz.
    REQUIRE(rep.metrics.count("f_lo_hz") == 1);
    REQUIRE(rep.metrics.count("f_hi_hz") == 1);
    CHECK(rep.metrics.at("f_lo_hz") > 1e6);
    CHECK(rep.metrics.at("f_lo_hz") < 2e6);
    CHECK(rep.metrics.at("f_hi_hz") > 16e6);
    CHECK(rep.metrics.at("f_hi_hz") < 24e6);
    CHECK(rep.metrics.at("snr_min_db") > 0.0);
    CHECK(fs::exists(cfg.output_dir / "csv" / "gain_curve.csv"));
    CHECK(fs::exists(cfg.output_dir / "csv" / "snr.csv"));
}

}  // TEST_SUITE
