#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "rfdaq/common.hpp"
#include "rfdaq/jesd/codec8b10b.hpp"

namespace rfdaq::jesd {

/// Serial link configuration. F and K follow the usual converter-interface
/// meaning: octets per frame per lane and frames per multiframe. The default
/// single-lane link moves one 8-channel, 16-bit sample instant per 80 MHz
/// frame: 16 octets * 10 bits * 80 MHz = 12.8 Gb/s on the wire, 10.24 Gb/s
/// of payload.
struct LinkParams {
    int lanes_per_link = 1;
    int octets_per_frame = 16;       // F
    int frames_per_multiframe = 32;  // K
    bool scrambling_enabled = true;
    int elastic_depth_octets = 1024;  // default: 2 multiframes
    double line_rate = 12.8e9;        // bits/s per lane
    double frame_clock = 80e6;        // Hz
    uint8_t device_id = 0;
    int cgs_multiframes = 2;  // comma preamble length

    int multiframe_octets() const { return octets_per_frame * frames_per_multiframe; }
    int channels() const { return lanes_per_link * octets_per_frame / 2; }
    double sysref_period() const { return frames_per_multiframe / frame_clock; }
    double payload_rate() const { return line_rate * 8.0 / 10.0 * lanes_per_link; }

    /// Lane slot at which the data phase nominally begins (CGS + 4 ILA
    /// multiframes), an LMFC boundary by construction.
    int64_t nominal_data_start() const {
        return int64_t{multiframe_octets()} * (cgs_multiframes + 4);
    }

    /// Deterministic release slot: the first LMFC boundary at least
    /// elastic_depth_octets after the nominal data start. Constant for a
    /// given configuration, which is what makes the latency skew-invariant.
    int64_t release_slot() const;

    void validate() const;  // throws StageError(Stage::link)
};

LinkParams make_link_params(int lanes, int octets_per_frame, int frames_per_multiframe,
                            bool scrambling, double frame_clock = 80e6);

/// Link configuration carried by the initial lane alignment sequence.
struct IlaConfig {
    uint8_t device_id = 0;
    uint8_t lane_id = 0;
    uint8_t octets_per_frame = 16;
    uint8_t frames_per_multiframe = 32;
    uint8_t scrambling = 1;

    uint8_t checksum() const {
        return static_cast<uint8_t>(device_id + lane_id + octets_per_frame +
                                    frames_per_multiframe + scrambling);
    }
};

/// One lane's symbol stream with per-symbol control annotations.
struct LaneStream {
    std::vector<uint16_t> symbols;
    std::vector<uint8_t> is_control;

    void push(uint16_t sym, bool ctrl) {
        symbols.push_back(sym);
        is_control.push_back(ctrl ? 1 : 0);
    }
    size_t size() const { return symbols.size(); }
};

/// Delay a lane by `skew_octets` symbol slots, modeled as a longer comma
/// preamble. Disparity continuity is preserved because K28.5 alternates RD.
LaneStream delayed(const LaneStream& lane, int skew_octets);

struct LinkStatus {
    bool cgs_locked = false;
    bool ila_valid = false;
    std::vector<int> lane_skew_octets;
    int64_t latency_octets = -1;
    int resync_events = 0;
    uint64_t symbol_errors = 0;
    std::vector<std::string> errors;

    bool ok() const { return errors.empty(); }
};

/// Serialize a sample stream onto the link's lanes: CGS preamble, 4-multiframe
/// ILA, then scrambled and encoded data frames. Transmission starts at
/// absolute sample index `sysref_phase`, which must be a multiple of K frames
/// so multiframe boundaries coincide with the SYSREF grid.
std::vector<LaneStream> tx_link(const SampleBlock& samples, const LinkParams& params,
                                uint64_t sysref_phase);

struct RxResult {
    SampleBlock samples;  // start_index is stream-relative; caller rebases to sysref_phase
    LinkStatus status;
};

/// Per-lane elastic buffer: decoded data octets waiting for the aligned
/// release point.
struct ElasticBuffer {
    std::deque<uint8_t> fifo;
    int64_t release_slot = 0;
};

/// Cycle-accurate link receiver. Lanes are consumed in lockstep, one symbol
/// per lane per step; per-lane state machines perform CGS, ILA validation and
/// descrambling, and elastic buffers absorb skew up to elastic_depth_octets.
/// Instances are independent; drive each from whichever thread owns it.
class LinkReceiver {
public:
    explicit LinkReceiver(const LinkParams& params);

    /// Process one symbol per lane. Returns false once the receiver has hit a
    /// fatal error and stops consuming.
    bool step(const std::vector<uint16_t>& symbol_per_lane);

    /// Aligned output octets released so far (frame-interleaved payload).
    const std::vector<uint8_t>& released() const { return released_; }
    const LinkStatus& status() const { return status_; }
    bool failed() const { return failed_; }

    /// Repackage released octets as channel-major samples (whole frames only).
    SampleBlock take_samples();

private:
    struct LaneState;
    void process_lane(LaneState& ls, uint16_t symbol);
    void try_release();
    void fail(Stage stage, const std::string& msg);

    LinkParams params_;
    std::vector<LaneState> lanes_;
    std::vector<ElasticBuffer> elastic_;
    LinkStatus status_;
    std::vector<uint8_t> released_;
    int64_t cycle_ = 0;
    int64_t release_slot_ = 0;
    bool failed_ = false;
};

/// Run a whole capture through a LinkReceiver. Streams shorter than the
/// longest lane are padded with commas (idle line).
RxResult rx_link(const std::vector<LaneStream>& lanes, const LinkParams& params);

}  // namespace rfdaq::jesd
