#pragma once

#include "rfdaq/afe/scenario.hpp"

namespace rfdaq::afe {

/// Pull-based sample source for one front-end. Streams are deterministic in
/// (scenario, config): splitting a pull into several smaller ones yields the
/// same bytes. Gain is applied before quantization; values that would exceed
/// the 16-bit range clip and bump the saturation counter.
class Frontend {
public:
    Frontend(Scenario scenario, AfeConfig config);

    SampleBlock next(size_t n);
    void seek(uint64_t index) { pos_ = index; }
    uint64_t position() const { return pos_; }
    uint64_t saturation_count() const { return saturated_; }
    const AfeConfig& config() const { return cfg_; }
    const Scenario& scenario() const { return scenario_; }

private:
    Scenario scenario_;
    AfeConfig cfg_;
    double gain_lin_ = 1.0;
    double noise_scale_ = 0.0;
    uint64_t pos_ = 0;
    uint64_t saturated_ = 0;
};

/// One-shot convenience wrapper around Frontend.
SampleBlock generate(const Scenario& scenario, const AfeConfig& config, size_t n,
                     uint64_t start_index = 0);

/// Mix to baseband at f_center, low-pass, decimate, and emit interleaved I/Q
/// as channel pairs (2k = I of input channel k, 2k+1 = Q). Output rate is
/// fs/decimation; amplitudes are restored so a tone at f_center of amplitude
/// A yields |I + jQ| = A.
SampleBlock iq_demodulate(const SampleBlock& raw, double f_center, int decimation);

}  // namespace rfdaq::afe
