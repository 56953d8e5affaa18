#pragma once

#include <cstdint>

#include "rfdaq/common.hpp"

namespace rfdaq::acq {

/// Capacity model of the buffering stage: the front-ends fill the ring at
/// R_in while the transport drains it at R_out, starting at worst tau_s
/// after the frame begins.
struct LeakyBucketModel {
    double r_in = 327.68e9;   // bits/s, effective write rate
    double r_out = 95.6e9;    // bits/s, effective worst-case read rate
    double capacity_bits = 33554432.0;  // usable buffer, bits (4 MiB)
    double tau_s = 0.0;       // worst-case read-start latency, seconds
    int channels = 256;
    int bits_per_sample = 16;

    double row_bits() const { return static_cast<double>(channels) * bits_per_sample; }
    void validate() const;  // throws StageError(Stage::acquisition)
};

struct FrameCapacity {
    enum class Kind { bounded, unbounded, infeasible };
    Kind kind = Kind::bounded;
    uint64_t samples_per_channel = 0;  // floor of the bit budget; 0 when infeasible
    double l_f_max_bits = 0.0;         // raw model value (bounded only)
    std::string diagnostic;            // set for infeasible
};

/// Largest frame the buffer sustains:
/// L = R_in (B - R_out tau_s) / (R_in - R_out), floored to whole samples.
/// R_in <= R_out makes the frame length unbounded; B <= R_out tau_s means
/// even an empty frame cannot be drained in time.
FrameCapacity max_frame_length(const LeakyBucketModel& model);

/// Sustainable frame rate at a given frame length: R_out / frame bits.
/// A frame longer than the model allows is a capacity error.
double max_fps(const LeakyBucketModel& model, uint64_t frame_len_samples);

struct OccupancyResult {
    double peak_bits = 0.0;
    bool overflow = false;
    uint64_t frames_completed = 0;
};

/// Discrete-event occupancy oracle, independent of the closed form. The
/// writer streams each frame at R_in; the reader starts at tau_s, drains at
/// R_out, and only sees whole blocks (a frame's tail block commits when its
/// burst ends). Frames are triggered at the max_fps cadence while the
/// trigger time is below duration_s, then the buffer drains to empty;
/// duration_s = 0 picks a duration long enough to reach the sustained
/// steady state the closed form describes. Overflow means occupancy
/// exceeded capacity_bits at some instant.
OccupancyResult simulate_occupancy(const LeakyBucketModel& model, uint64_t frame_len_samples,
                                   uint64_t block_bytes, double duration_s = 0.0);

}  // namespace rfdaq::acq
