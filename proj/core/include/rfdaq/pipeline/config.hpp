#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "rfdaq/acq/framer.hpp"
#include "rfdaq/acq/leaky_bucket.hpp"
#include "rfdaq/afe/scenario.hpp"
#include "rfdaq/analysis/sweep.hpp"
#include "rfdaq/jesd/link.hpp"
#include "rfdaq/rdma/throughput.hpp"

namespace rfdaq::pipeline {

enum class RunMode { acquire_us, acquire_oa, stress, characterize, budget };

const char* mode_name(RunMode m);
RunMode parse_mode(const std::string& name);

struct TransportConfig {
    int batch = 8;           // work requests per post
    int pad_channels = 256;  // payload width after dummy-channel insertion
    uint32_t window_segments = 256;
    rdma::ChannelModel channel;
};

struct AnalysisConfig {
    double band_lo_hz = 2e6;  // receive bandpass corners
    double band_hi_hz = 8e6;
};

struct CharacterizeConfig {
    double grid_start_hz = 0.2e6;
    double grid_step_hz = 0.2e6;
    size_t record_samples = 32768;
    std::vector<double> tones;  // explicit tone list replaces the grid
    analysis::SnrConfig snr;
};

struct BudgetRow {
    std::string label;
    acq::LeakyBucketModel model;
    std::optional<uint64_t> frame_length;  // default: the model's maximum
};

struct BudgetConfig {
    bool include_reference = true;  // prepend the documented reference rows
    std::vector<BudgetRow> rows;
};

/// Everything one workflow run needs; loadable from JSON with per-field
/// defaults matching the validation setup (80 MSPS, 16 real channels padded
/// to 256, 60-cycle delay, 3072-sample window, 256 KiB blocks, batch 8).
struct RunConfig {
    RunMode mode = RunMode::acquire_us;
    std::filesystem::path output_dir = "out";

    afe::AfeConfig afe;
    afe::Scenario scenario;
    bool scenario_overridden = false;  // JSON supplied an explicit scenario

    jesd::LinkParams link;
    acq::TriggerConfig trigger;
    size_t ring_capacity_bytes = size_t{4} << 20;
    size_t ring_block_bytes = size_t{256} << 10;
    acq::LeakyBucketModel bucket;
    TransportConfig transport;
    AnalysisConfig analysis;
    rdma::BenchConfig stress;
    CharacterizeConfig characterize;
    BudgetConfig budget;

    // Scenario time zero is the acquisition epoch. The (first) trigger event
    // lands at trigger_time_s; later frames follow every frame_period_s.
    double trigger_time_s = 0.0;
    int frames = 1;
    double frame_period_s = 0.0;  // 0: window + delay + margin

    void validate() const;  // cross-field consistency, throws Stage::config
};

/// Mode-appropriate defaults (scenario, trigger source).
RunConfig default_config(RunMode mode);

RunConfig parse_config_json(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace rfdaq::pipeline
