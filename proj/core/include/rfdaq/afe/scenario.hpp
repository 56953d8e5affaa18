#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "rfdaq/common.hpp"

namespace rfdaq::afe {

enum class OutputMode { raw, iq };

/// Front-end channel configuration. Gain is applied before quantization and
/// saturation; noise_rms is converter-referred, in LSB.
struct AfeConfig {
    int channels = 16;
    OutputMode mode = OutputMode::raw;
    double sample_rate = 80e6;
    double gain_db = 0.0;  // [-3, 48]
    bool active_termination = true;
    double noise_rms = 0.0;
    uint64_t seed = 1;
    // Optional first-order response corners applied analytically to tones.
    // 0 disables; wideband scenarios are not shaped.
    double response_hp_hz = 0.0;
    double response_lp_hz = 0.0;

    void validate() const;  // throws StageError(Stage::generate)
};

struct Dc {
    double level = 0.0;  // full-scale fraction
};

struct SweptSine {
    double amplitude = 0.25;  // full-scale fraction
    double freq_hz = 5e6;
    double phase = 0.0;  // radians; value = A cos(2*pi*f*t + phase)
};

struct PulseEcho {
    double f0 = 5e6;
    int cycles = 3;
    double amplitude = 0.5;
    std::vector<double> depths_m = {0.02, 0.035, 0.05};
    std::vector<double> reflectivity = {1.0, 0.6, 0.35};
    double sound_speed = 1540.0;  // m/s
};

struct OaPulse {
    double delay_s = 2e-6;
    double width_s = 80e-9;
    double amplitude = 0.6;
};

struct Prbs {
    uint64_t seed = 0xACE1;
    double amplitude = 0.95;
};

struct Scenario {
    std::variant<Dc, SweptSine, PulseEcho, OaPulse, Prbs> shape = Dc{};
    std::vector<int> active_channels;  // empty: signal on every channel

    bool channel_active(int ch) const;

    /// Noiseless signal value in full-scale fraction for channel `ch` at
    /// absolute sample index `index`. Pure, so streams are continuous and
    /// deterministic regardless of block boundaries.
    double value(int ch, uint64_t index, const AfeConfig& cfg) const;
};

/// Conventional scenarios used by the acquisition workflows: a three-layer
/// pulse-echo phantom on all channels, and an optoacoustic pulse confined to
/// channels 5..8 (1-based) of the 16-channel probe.
Scenario default_us_scenario();
Scenario default_oa_scenario();

}  // namespace rfdaq::afe
