#include "rfdaq/jesd/link.hpp"

#include <algorithm>
#include <cmath>

#include "rfdaq/jesd/scrambler.hpp"

namespace rfdaq::jesd {

namespace {

// K28.5 wire images for the two disparities; used for raw comma hunting
// before the decoder disparity is trustworthy.
constexpr uint16_t kCommaNeg = 0b0011111010;  // encoded at RD-1, exits RD+1
constexpr uint16_t kCommaPos = 0b1100000101;  // encoded at RD+1, exits RD-1

constexpr int kIlaMultiframes = 4;
constexpr int kCfgOctets = 6;

}  // namespace

int64_t LinkParams::release_slot() const {
    const int64_t mf = multiframe_octets();
    const int64_t s0 = nominal_data_start();
    const int64_t depth_mf = (elastic_depth_octets + mf - 1) / mf;
    return s0 + depth_mf * mf;
}

void LinkParams::validate() const {
    auto bad = [](const std::string& msg) { throw StageError(Stage::link, msg); };
    if (lanes_per_link < 1 || lanes_per_link > 8) bad("lanes_per_link out of range");
    if (octets_per_frame < 1 || octets_per_frame > 256) bad("octets_per_frame out of range");
    if (frames_per_multiframe < 1 || frames_per_multiframe > 256)
        bad("frames_per_multiframe out of range");
    if (multiframe_octets() < 9) bad("multiframe too short for lane alignment sequence");
    if ((lanes_per_link * octets_per_frame) % 2 != 0) bad("frame must carry whole samples");
    if (elastic_depth_octets < 1) bad("elastic_depth_octets must be positive");
    if (cgs_multiframes < 1) bad("cgs_multiframes must be positive");
    if (!(frame_clock > 0)) bad("frame_clock must be positive");
    const double expected = frame_clock * octets_per_frame * 10.0;
    if (std::abs(line_rate - expected) > 1e-6 * expected)
        bad("line_rate inconsistent with frame_clock * octets_per_frame * 10");
}

LinkParams make_link_params(int lanes, int octets_per_frame, int frames_per_multiframe,
                            bool scrambling, double frame_clock) {
    LinkParams p;
    p.lanes_per_link = lanes;
    p.octets_per_frame = octets_per_frame;
    p.frames_per_multiframe = frames_per_multiframe;
    p.scrambling_enabled = scrambling;
    p.frame_clock = frame_clock;
    p.line_rate = frame_clock * octets_per_frame * 10.0;
    p.elastic_depth_octets = 2 * octets_per_frame * frames_per_multiframe;
    return p;
}

LaneStream delayed(const LaneStream& lane, int skew_octets) {
    if (skew_octets <= 0) return lane;
    LaneStream out;
    out.symbols.reserve(lane.size() + static_cast<size_t>(skew_octets));
    out.is_control.reserve(lane.size() + static_cast<size_t>(skew_octets));
    // The prepended run must leave the line at RD-1, where the original
    // stream's encoder started. Each comma flips disparity.
    CodecState st{skew_octets % 2 == 0 ? -1 : +1};
    for (int i = 0; i < skew_octets; ++i) out.push(encode_8b10b(K28_5, true, st), true);
    out.symbols.insert(out.symbols.end(), lane.symbols.begin(), lane.symbols.end());
    out.is_control.insert(out.is_control.end(), lane.is_control.begin(), lane.is_control.end());
    return out;
}

std::vector<LaneStream> tx_link(const SampleBlock& samples, const LinkParams& params,
                                uint64_t sysref_phase) {
    params.validate();
    const int lanes = params.lanes_per_link;
    const int F = params.octets_per_frame;
    const int n_ch = params.channels();
    if (samples.channels != n_ch)
        throw StageError(Stage::link, "sample block channel count does not match link");
    if (!samples.valid_shape()) throw StageError(Stage::link, "malformed sample block");
    if (sysref_phase % static_cast<uint64_t>(params.frames_per_multiframe) != 0)
        throw StageError(Stage::link, "sysref_phase must fall on a multiframe boundary");
    if (sysref_phase < samples.start_index)
        throw StageError(Stage::link, "sysref_phase precedes the sample block");
    const uint64_t offset = sysref_phase - samples.start_index;
    const uint64_t spc = samples.samples_per_channel();
    if (offset > spc) throw StageError(Stage::link, "sysref_phase past the sample block");
    const uint64_t n_frames = spc - offset;

    // One sample instant per frame, channel-interleaved big-endian octets,
    // striped across lanes in contiguous runs of F octets.
    std::vector<std::vector<uint8_t>> payload(static_cast<size_t>(lanes));
    for (auto& v : payload) v.reserve(n_frames * static_cast<size_t>(F));
    for (uint64_t f = 0; f < n_frames; ++f) {
        int lane = 0, in_lane = 0;
        for (int ch = 0; ch < n_ch; ++ch) {
            const uint16_t s = static_cast<uint16_t>(samples.sample(ch, offset + f));
            for (const uint8_t octet : {static_cast<uint8_t>(s >> 8), static_cast<uint8_t>(s)}) {
                payload[static_cast<size_t>(lane)].push_back(octet);
                if (++in_lane == F) {
                    in_lane = 0;
                    ++lane;
                }
            }
        }
    }

    const int mf = params.multiframe_octets();
    std::vector<LaneStream> out(static_cast<size_t>(lanes));
    for (int l = 0; l < lanes; ++l) {
        LaneStream& lane = out[static_cast<size_t>(l)];
        lane.symbols.reserve(static_cast<size_t>(params.nominal_data_start()) + payload[0].size());
        CodecState st;

        for (int i = 0; i < params.cgs_multiframes * mf; ++i)
            lane.push(encode_8b10b(K28_5, true, st), true);

        IlaConfig cfg;
        cfg.device_id = params.device_id;
        cfg.lane_id = static_cast<uint8_t>(l);
        cfg.octets_per_frame = static_cast<uint8_t>(F);
        cfg.frames_per_multiframe = static_cast<uint8_t>(params.frames_per_multiframe);
        cfg.scrambling = params.scrambling_enabled ? 1 : 0;
        const uint8_t cfg_bytes[kCfgOctets] = {cfg.device_id,         cfg.lane_id,
                                               cfg.octets_per_frame,  cfg.frames_per_multiframe,
                                               cfg.scrambling,        cfg.checksum()};
        for (int m = 0; m < kIlaMultiframes; ++m) {
            for (int off = 0; off < mf; ++off) {
                if (off == 0) {
                    lane.push(encode_8b10b(K28_0, true, st), true);
                } else if (off == mf - 1) {
                    lane.push(encode_8b10b(K28_3, true, st), true);
                } else if (m == 1 && off == 1) {
                    lane.push(encode_8b10b(K28_4, true, st), true);
                } else if (m == 1 && off >= 2 && off < 2 + kCfgOctets) {
                    lane.push(encode_8b10b(cfg_bytes[off - 2], false, st), false);
                } else {
                    const int pos = m * mf + off;  // deterministic ramp filler
                    lane.push(encode_8b10b(static_cast<uint8_t>(pos), false, st), false);
                }
            }
        }

        Scrambler scr(params.scrambling_enabled);
        for (const uint8_t octet : payload[static_cast<size_t>(l)])
            lane.push(encode_8b10b(scr.process(octet), false, st), false);
    }
    return out;
}

struct LinkReceiver::LaneState {
    enum class Phase { hunt, cgs, ila, data, idle, dead } phase = Phase::hunt;
    CodecState codec;
    int rd_after_comma = -1;
    int comma_run = 0;
    int invalid_run = 0;
    int64_t ila_pos = 0;
    uint8_t cfg[kCfgOctets] = {};
    Descrambler descrambler{true};
    bool locked = false;
    bool ila_ok = false;
    int skew = 0;
    std::vector<uint8_t> out;  // released, aligned octets
};

LinkReceiver::LinkReceiver(const LinkParams& params) : params_(params) {
    params_.validate();
    lanes_.resize(static_cast<size_t>(params_.lanes_per_link));
    elastic_.resize(lanes_.size());
    release_slot_ = params_.release_slot();
    for (auto& eb : elastic_) eb.release_slot = release_slot_;
    for (auto& ls : lanes_) ls.descrambler = Descrambler(params_.scrambling_enabled);
    status_.lane_skew_octets.assign(lanes_.size(), 0);
}

void LinkReceiver::fail(Stage stage, const std::string& msg) {
    (void)stage;
    failed_ = true;
    status_.errors.push_back(msg);
}

void LinkReceiver::process_lane(LaneState& ls, uint16_t symbol) {
    using Phase = LaneState::Phase;
    const size_t lane_idx = static_cast<size_t>(&ls - lanes_.data());

    switch (ls.phase) {
        case Phase::hunt:
        case Phase::cgs: {
            if (symbol == kCommaNeg || symbol == kCommaPos) {
                ls.rd_after_comma = symbol == kCommaNeg ? +1 : -1;
                if (++ls.comma_run >= 4 && ls.phase == Phase::hunt) {
                    ls.phase = Phase::cgs;
                    ls.locked = true;
                }
                return;
            }
            if (ls.phase == Phase::hunt) {  // noise before lock
                ls.comma_run = 0;
                return;
            }
            // First non-comma after sync must open the lane alignment sequence.
            ls.codec.running_disparity = ls.rd_after_comma;
            const DecodeResult r = decode_8b10b(symbol, ls.codec);
            if (r.error == CodeError::invalid_symbol || !r.is_control || r.octet != K28_0) {
                fail(Stage::link, "lane " + std::to_string(lane_idx) +
                                      ": expected alignment sequence after sync");
                ls.phase = Phase::dead;
                return;
            }
            ls.phase = Phase::ila;
            ls.ila_pos = 1;
            return;
        }
        case Phase::ila: {
            const int mf = params_.multiframe_octets();
            const DecodeResult r = decode_8b10b(symbol, ls.codec);
            if (r.error == CodeError::invalid_symbol) {
                fail(Stage::link,
                     "lane " + std::to_string(lane_idx) + ": invalid symbol in alignment sequence");
                ls.phase = Phase::dead;
                return;
            }
            if (r.error == CodeError::disparity) ++status_.symbol_errors;
            const int m = static_cast<int>(ls.ila_pos / mf);
            const int off = static_cast<int>(ls.ila_pos % mf);
            bool ok = true;
            if (off == 0) {
                ok = r.is_control && r.octet == K28_0;
            } else if (off == mf - 1) {
                ok = r.is_control && r.octet == K28_3;
            } else if (m == 1 && off == 1) {
                ok = r.is_control && r.octet == K28_4;
            } else if (m == 1 && off >= 2 && off < 2 + kCfgOctets) {
                ok = !r.is_control;
                ls.cfg[off - 2] = r.octet;
            } else {
                ok = !r.is_control;
            }
            if (!ok) {
                fail(Stage::link, "lane " + std::to_string(lane_idx) +
                                      ": malformed alignment sequence at octet " +
                                      std::to_string(ls.ila_pos));
                ls.phase = Phase::dead;
                return;
            }
            if (++ls.ila_pos < int64_t{kIlaMultiframes} * mf) return;

            IlaConfig cfg{ls.cfg[0], ls.cfg[1], ls.cfg[2], ls.cfg[3], ls.cfg[4]};
            if (cfg.checksum() != ls.cfg[5]) {
                fail(Stage::link,
                     "lane " + std::to_string(lane_idx) + ": alignment config checksum mismatch");
                ls.phase = Phase::dead;
                return;
            }
            if (cfg.device_id != params_.device_id || cfg.lane_id != lane_idx ||
                cfg.octets_per_frame != params_.octets_per_frame ||
                cfg.frames_per_multiframe != params_.frames_per_multiframe ||
                cfg.scrambling != (params_.scrambling_enabled ? 1 : 0)) {
                fail(Stage::link, "lane " + std::to_string(lane_idx) +
                                      ": alignment config does not match link parameters");
                ls.phase = Phase::dead;
                return;
            }
            const int64_t ila_end = cycle_ + 1;
            const int64_t skew = ila_end - params_.nominal_data_start();
            if (skew < 0) {
                fail(Stage::link,
                     "lane " + std::to_string(lane_idx) + ": alignment ahead of nominal timing");
                ls.phase = Phase::dead;
                return;
            }
            if (skew > params_.elastic_depth_octets) {
                fail(Stage::link, "lane " + std::to_string(lane_idx) + ": skew of " +
                                      std::to_string(skew) + " octets exceeds elastic depth " +
                                      std::to_string(params_.elastic_depth_octets));
                ls.phase = Phase::dead;
                return;
            }
            ls.skew = static_cast<int>(skew);
            status_.lane_skew_octets[lane_idx] = ls.skew;
            ls.ila_ok = true;
            ls.descrambler.reset();
            ls.phase = Phase::data;
            return;
        }
        case Phase::data: {
            if (symbol == kCommaNeg || symbol == kCommaPos) {
                ls.phase = Phase::idle;  // line fell back to idle commas
                return;
            }
            const DecodeResult r = decode_8b10b(symbol, ls.codec);
            if (r.error == CodeError::invalid_symbol || r.is_control) {
                ++status_.symbol_errors;
                if (++ls.invalid_run >= 3) {
                    ++status_.resync_events;
                    status_.errors.push_back("lane " + std::to_string(lane_idx) +
                                             ": lost code group sync in data phase");
                    ls.phase = Phase::dead;
                    return;
                }
                // Keep octet cadence so one bad symbol does not shift the frame.
                elastic_[lane_idx].fifo.push_back(ls.descrambler.process(0));
                return;
            }
            if (r.error == CodeError::disparity) ++status_.symbol_errors;
            ls.invalid_run = 0;
            elastic_[lane_idx].fifo.push_back(ls.descrambler.process(r.octet));
            return;
        }
        case Phase::idle:
        case Phase::dead:
            return;
    }
}

void LinkReceiver::try_release() {
    if (cycle_ < release_slot_) return;
    for (size_t l = 0; l < lanes_.size(); ++l) {
        if (lanes_[l].phase == LaneState::Phase::dead) return;
        if (elastic_[l].fifo.empty()) return;
    }
    for (size_t l = 0; l < lanes_.size(); ++l) {
        lanes_[l].out.push_back(elastic_[l].fifo.front());
        elastic_[l].fifo.pop_front();
    }
}

bool LinkReceiver::step(const std::vector<uint16_t>& symbol_per_lane) {
    if (failed_) return false;
    for (size_t l = 0; l < lanes_.size(); ++l) process_lane(lanes_[l], symbol_per_lane[l]);
    ++cycle_;
    try_release();

    status_.cgs_locked = true;
    status_.ila_valid = true;
    for (const auto& ls : lanes_) {
        status_.cgs_locked = status_.cgs_locked && ls.locked;
        status_.ila_valid = status_.ila_valid && ls.ila_ok;
    }
    if (status_.ila_valid) status_.latency_octets = release_slot_;
    return !failed_;
}

SampleBlock LinkReceiver::take_samples() {
    // Drain whatever the elastic buffers still hold once input has ended.
    bool more = !failed_;
    while (more) {
        for (const auto& eb : elastic_) more = more && !eb.fifo.empty();
        for (const auto& ls : lanes_)
            if (ls.phase == LaneState::Phase::dead) more = false;
        if (!more) break;
        for (size_t l = 0; l < lanes_.size(); ++l) {
            lanes_[l].out.push_back(elastic_[l].fifo.front());
            elastic_[l].fifo.pop_front();
        }
    }

    const size_t F = static_cast<size_t>(params_.octets_per_frame);
    size_t n_frames = SIZE_MAX;
    for (const auto& ls : lanes_) n_frames = std::min(n_frames, ls.out.size() / F);
    if (failed_) n_frames = 0;

    const int n_ch = params_.channels();
    SampleBlock block(n_ch, n_frames, 0, params_.frame_clock);
    for (size_t f = 0; f < n_frames; ++f) {
        size_t lane = 0, in_lane = 0;
        for (int ch = 0; ch < n_ch; ++ch) {
            uint16_t hi = 0, lo = 0;
            for (uint16_t* b : {&hi, &lo}) {
                *b = lanes_[lane].out[f * F + in_lane];
                if (++in_lane == F) {
                    in_lane = 0;
                    ++lane;
                }
            }
            block.sample(ch, f) = static_cast<int16_t>(static_cast<uint16_t>(hi << 8 | lo));
        }
    }
    return block;
}

RxResult rx_link(const std::vector<LaneStream>& lanes, const LinkParams& params) {
    params.validate();
    if (lanes.size() != static_cast<size_t>(params.lanes_per_link))
        throw StageError(Stage::link, "lane count does not match link parameters");

    size_t n = 0;
    for (const auto& l : lanes) n = std::max(n, l.size());

    LinkReceiver rx(params);
    std::vector<uint16_t> row(lanes.size());
    // Disparity-alternating idle commas for lanes that end early.
    CodecState idle_st;
    for (size_t i = 0; i < n; ++i) {
        for (size_t l = 0; l < lanes.size(); ++l) {
            if (i < lanes[l].size()) {
                row[l] = lanes[l].symbols[i];
            } else {
                CodecState st = idle_st;
                row[l] = encode_8b10b(K28_5, true, st);
            }
        }
        idle_st.running_disparity = -idle_st.running_disparity;
        if (!rx.step(row)) break;
    }

    RxResult result;
    result.samples = rx.take_samples();
    result.status = rx.status();
    return result;
}

}  // namespace rfdaq::jesd
