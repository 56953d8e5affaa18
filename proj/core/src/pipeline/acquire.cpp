#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <span>
#include <thread>

#include "rfdaq/acq/framer.hpp"
#include "rfdaq/acq/leaky_bucket.hpp"
#include "rfdaq/acq/ring_buffer.hpp"
#include "rfdaq/acq/trigger.hpp"
#include "rfdaq/afe/frontend.hpp"
#include "rfdaq/analysis/filters.hpp"
#include "rfdaq/analysis/image.hpp"
#include "rfdaq/io/csv.hpp"
#include "rfdaq/io/sample_file.hpp"
#include "rfdaq/jesd/link.hpp"
#include "rfdaq/pipeline/pipeline.hpp"
#include "rfdaq/rdma/simulation.hpp"

#include "dirs.hpp"

namespace rfdaq::pipeline {
namespace {

using detail::make_dir;

/// Block-filled notifications from the buffering stage to the transport.
class BlockQueue {
public:
    void push(uint64_t block_index) {
        {
            std::lock_guard lk(m_);
            q_.push_back(block_index);
        }
        cv_.notify_one();
    }

    void close() {
        {
            std::lock_guard lk(m_);
            closed_ = true;
        }
        cv_.notify_all();
    }

    /// Up to max_n indices; empty means closed and drained.
    std::vector<uint64_t> pop(size_t max_n) {
        std::unique_lock lk(m_);
        cv_.wait(lk, [&] { return closed_ || !q_.empty(); });
        std::vector<uint64_t> out;
        while (!q_.empty() && out.size() < max_n) {
            out.push_back(q_.front());
            q_.pop_front();
        }
        return out;
    }

private:
    std::mutex m_;
    std::condition_variable cv_;
    std::deque<uint64_t> q_;
    bool closed_ = false;
};

void append_le64(std::vector<uint8_t>& v, uint64_t x) {
    for (int i = 0; i < 8; ++i) v.push_back(static_cast<uint8_t>(x >> (8 * i)));
}

/// Reverse the transport packing: sample-major padded int16 back to a
/// channel-major block of the real channels.
SampleBlock unpack_frame(const uint8_t* base, uint64_t window, int pad_channels,
                         int real_channels, uint64_t start_index, double rate) {
    SampleBlock out(real_channels, window, start_index, rate);
    for (uint64_t i = 0; i < window; ++i) {
        for (int ch = 0; ch < real_channels; ++ch) {
            const size_t o = 2 * (i * static_cast<size_t>(pad_channels) + ch);
            const uint16_t v = static_cast<uint16_t>(base[o] | (base[o + 1] << 8));
            out.sample(ch, i) = static_cast<int16_t>(v);
        }
    }
    return out;
}

}  // namespace

RunReport run_acquire(const RunConfig& cfg) {
    cfg.validate();
    make_dir(cfg.output_dir / "frames");
    make_dir(cfg.output_dir / "images");
    make_dir(cfg.output_dir / "csv");

    RunReport rep;
    rep.mode = mode_name(cfg.mode);

    const double fs_hz = cfg.afe.sample_rate;
    const uint64_t window = cfg.trigger.window;
    const uint64_t delay = cfg.trigger.delay;
    const int real_ch = cfg.afe.channels;
    const int pad_ch = cfg.transport.pad_channels;
    const size_t block_size = cfg.ring_block_bytes;
    const uint64_t k_frames = static_cast<uint64_t>(cfg.link.frames_per_multiframe);

    // Capacity pre-check: the requested window must fit the buffering model
    // before any hardware is committed to the capture.
    const acq::FrameCapacity cap = acq::max_frame_length(cfg.bucket);
    if (cap.kind == acq::FrameCapacity::Kind::infeasible)
        throw StageError(Stage::acquisition, "buffer model infeasible: " + cap.diagnostic);
    if (cap.kind == acq::FrameCapacity::Kind::bounded && window > cap.samples_per_channel) {
        const auto occ = acq::simulate_occupancy(cfg.bucket, window, block_size);
        throw StageError(Stage::acquisition,
                         "window of " + std::to_string(window) + " samples exceeds the " +
                             std::to_string(cap.samples_per_channel) +
                             "-sample frame capacity (simulated peak occupancy " +
                             std::to_string(occ.peak_bits) + " bits, overflow=" +
                             (occ.overflow ? "yes" : "no") + ")");
    }
    const auto occ = acq::simulate_occupancy(cfg.bucket, window, block_size);
    if (cap.kind == acq::FrameCapacity::Kind::bounded)
        rep.metrics["frame_capacity_samples"] = static_cast<double>(cap.samples_per_channel);
    rep.metrics["occupancy_peak_bits"] = occ.peak_bits;
    rep.add_stage("capacity", "ok",
                  "window " + std::to_string(window) + " samples, peak occupancy " +
                      std::to_string(static_cast<uint64_t>(occ.peak_bits)) + " bits");

    acq::Framer framer(cfg.trigger, pad_ch, 16, block_size);
    const uint32_t bpf = framer.blocks_per_frame();
    acq::RingBuffer ring(cfg.ring_capacity_bytes, block_size);
    BlockQueue queue;

    const double period_s = cfg.frame_period_s > 0.0
                                ? cfg.frame_period_s
                                : static_cast<double>(delay + window + 64) / fs_hz;

    // Producer-side results, read after join.
    uint64_t bytes_generated = 0;
    uint64_t last_sample_end = 0;
    int64_t link_latency = -1;
    std::vector<uint8_t> src_digests;
    std::exception_ptr producer_error;

    // Consumer-side results.
    std::vector<uint8_t> host_buf(static_cast<size_t>(cfg.frames) * bpf * block_size);
    uint64_t bytes_transferred = 0;
    uint64_t completions = 0;
    double t_transport = 0.0;
    rdma::EndpointStats daq_stats;
    std::exception_ptr consumer_error;

    std::thread producer([&] {
        try {
            for (int f = 0; f < cfg.frames; ++f) {
                const double t_trig = cfg.trigger_time_s + f * period_s;
                const uint64_t trig = acq::latch_trigger(t_trig, fs_hz);
                const auto ev = framer.arm(trig);
                if (!ev) continue;

                // The link runs on the SYSREF grid; generation starts at the
                // multiframe boundary at or before the trigger.
                const uint64_t gen_start = (trig / k_frames) * k_frames;
                const uint64_t n_total = (trig - gen_start) + delay + window;
                const SampleBlock raw = afe::generate(cfg.scenario, cfg.afe, n_total, gen_start);
                const auto lanes = jesd::tx_link(raw, cfg.link, gen_start);
                jesd::RxResult rx = jesd::rx_link(lanes, cfg.link);
                if (!rx.status.ok()) {
                    std::string what = "link failure:";
                    for (const auto& e : rx.status.errors) what += " " + e;
                    throw StageError(Stage::link, what);
                }
                if (rx.samples.data != raw.data)
                    throw StageError(Stage::link, "payload corrupted crossing the link");
                rx.samples.start_index = gen_start;
                link_latency = rx.status.latency_octets;
                bytes_generated += raw.data.size() * sizeof(int16_t);

                // Merge the front-end's channels into the full-width system
                // word; the remaining channels idle at zero.
                SampleBlock merged(pad_ch, n_total, gen_start, fs_hz);
                std::copy(rx.samples.data.begin(), rx.samples.data.end(), merged.data.begin());
                const SampleBlock frame = framer.extract(merged, *ev);

                // Wire order: one padded sample instant at a time.
                std::vector<uint8_t> buf(static_cast<size_t>(bpf) * block_size, 0);
                for (uint64_t i = 0; i < window; ++i) {
                    for (int ch = 0; ch < pad_ch; ++ch) {
                        const uint16_t v = static_cast<uint16_t>(frame.sample(ch, i));
                        const size_t o = 2 * (i * static_cast<size_t>(pad_ch) + ch);
                        buf[o] = static_cast<uint8_t>(v);
                        buf[o + 1] = static_cast<uint8_t>(v >> 8);
                    }
                }
                for (uint32_t b = 0; b < bpf; ++b) {
                    const std::span<const uint8_t> blk(buf.data() + b * block_size, block_size);
                    append_le64(src_digests, fnv1a(blk.data(), blk.size()));
                    const uint64_t idx = ring.write_blocking(blk);
                    if (idx != ev->first_block_index + b)
                        throw StageError(Stage::acquisition, "block accounting mismatch");
                    queue.push(idx);
                }
                last_sample_end = std::max(last_sample_end, ev->capture_start(cfg.trigger) + window);
            }
        } catch (...) {
            producer_error = std::current_exception();
        }
        queue.close();
    });

    std::thread consumer([&] {
        try {
            rdma::SimChannel chan(cfg.transport.channel);
            rdma::Endpoint::Config ecfg;
            ecfg.mtu = cfg.transport.channel.mtu;
            ecfg.window_segments = cfg.transport.window_segments;
            rdma::Endpoint daq("daq", chan, 0, cfg.transport.channel, ecfg);
            rdma::Endpoint host("host", chan, 1, cfg.transport.channel, ecfg);
            host.listen(host.register_memory(host_buf));
            double t = rdma::cm_handshake(daq, host, chan, 0.0, 1.0);
            rdma::Endpoint* eps[2] = {&daq, &host};

            uint64_t target = 0;
            while (true) {
                const auto idxs = queue.pop(static_cast<size_t>(cfg.transport.batch));
                if (idxs.empty()) break;

                std::vector<rdma::WorkRequest> wrs;
                wrs.reserve(idxs.size());
                for (const uint64_t idx : idxs) {
                    rdma::WorkRequest wr;
                    wr.wr_id = idx;
                    wr.opcode = rdma::Opcode::write;
                    wr.payload = ring.read(idx);
                    wr.remote_offset = idx * block_size;
                    wr.rkey = daq.peer_region()->rkey;
                    wrs.push_back(std::move(wr));
                }
                if (daq.post_batch(wrs) != wrs.size())
                    throw StageError(Stage::transport, "send queue overflow");
                target += idxs.size();

                auto done = [&] {
                    for (const rdma::Completion& c : daq.poll_cq()) {
                        if (c.status != rdma::Completion::Status::success)
                            throw StageError(Stage::transport,
                                             "write failed for block " + std::to_string(c.wr_id));
                        ++completions;
                    }
                    return completions >= target;
                };
                const rdma::RunResult rr = rdma::run_until(chan, eps, t, t + 5.0, done);
                if (!rr.completed) throw StageError(Stage::transport, "transport stalled");
                t = rr.time;
                bytes_transferred += idxs.size() * block_size;
            }
            t_transport = t;
            daq_stats = daq.stats();
        } catch (...) {
            consumer_error = std::current_exception();
            ring.close();  // unblock a producer waiting on a full ring
        }
    });

    producer.join();
    consumer.join();
    if (producer_error) std::rethrow_exception(producer_error);
    if (consumer_error) std::rethrow_exception(consumer_error);

    rep.bytes_generated = bytes_generated;
    rep.bytes_transferred = bytes_transferred;
    rep.completions = completions;
    rep.overflow_count = ring.overflow_count();
    rep.busy_triggers = framer.busy_count();
    rep.t_acquire_s = static_cast<double>(last_sample_end) / fs_hz;
    rep.t_transport_s = t_transport;
    rep.metrics["frames_captured"] = static_cast<double>(framer.events().size());
    rep.metrics["link_latency_octets"] = static_cast<double>(link_latency);
    rep.metrics["rdma_retransmits"] = static_cast<double>(daq_stats.data_retransmitted);
    rep.metrics["rdma_timeouts"] = static_cast<double>(daq_stats.timeouts);
    rep.metrics["rdma_duplicates_dropped"] = static_cast<double>(daq_stats.duplicates_dropped);
    rep.add_stage("generate", "ok",
                  std::to_string(framer.events().size()) + " frame(s), " +
                      std::to_string(bytes_generated) + " bytes through the link");
    rep.add_stage("acquisition", "ok",
                  std::to_string(ring.blocks_written()) + " blocks of " +
                      std::to_string(block_size) + " bytes, " +
                      std::to_string(ring.overflow_count()) + " overflows");
    rep.add_stage("transport", "ok",
                  std::to_string(completions) + " completions, " +
                      std::to_string(daq_stats.data_retransmitted) + " retransmits");

    // End-to-end integrity: per-block digests on both sides of the fabric.
    std::vector<uint8_t> host_digests;
    for (uint64_t idx = 0; idx < ring.blocks_written(); ++idx)
        append_le64(host_digests, fnv1a(host_buf.data() + idx * block_size, block_size));
    rep.checksum_source = fnv1a(src_digests);
    rep.checksum_host = fnv1a(host_digests);
    rep.payload_bit_exact = rep.checksum_source == rep.checksum_host;
    if (!rep.payload_bit_exact)
        throw StageError(Stage::transport, "host payload differs from the source stream");
    rep.add_stage("verify", "ok", "payload bit-exact across the fabric");

    if (framer.events().empty()) {
        rep.add_stage("analysis", "ok", "no frames captured");
        return rep;
    }

    // Unpack every captured frame from host memory and keep it.
    const auto& events = framer.events();
    for (size_t f = 0; f < events.size(); ++f) {
        const auto& ev = events[f];
        const SampleBlock fr =
            unpack_frame(host_buf.data() + ev.first_block_index * block_size, window, pad_ch,
                         real_ch, ev.capture_start(cfg.trigger), fs_hz);
        char name[32];
        std::snprintf(name, sizeof(name), "frames/frame_%03zu.rfsb", f);
        io::save_block((cfg.output_dir / name).string(), fr);
        rep.outputs.push_back(name);
    }

    // Receive processing on the first frame: bandpass, envelope, image.
    const auto& ev0 = events.front();
    const SampleBlock f0 = unpack_frame(host_buf.data() + ev0.first_block_index * block_size,
                                        window, pad_ch, real_ch,
                                        ev0.capture_start(cfg.trigger), fs_hz);
    const SampleBlock bp =
        analysis::bandpass_block(f0, cfg.analysis.band_lo_hz, cfg.analysis.band_hi_hz);
    SampleBlock env(real_ch, window, f0.start_index, fs_hz);
    std::vector<double> channel_energy(static_cast<size_t>(real_ch), 0.0);
    double peak_val = -1.0;
    int peak_channel = 0;
    uint64_t peak_sample = 0;
    std::vector<double> row(window);
    for (int ch = 0; ch < real_ch; ++ch) {
        for (uint64_t i = 0; i < window; ++i) row[i] = bp.sample(ch, i);
        const std::vector<double> e = analysis::envelope(row);
        for (uint64_t i = 0; i < window; ++i) {
            env.sample(ch, i) = saturate16(e[i]);
            channel_energy[static_cast<size_t>(ch)] += e[i] * e[i];
            if (e[i] > peak_val) {
                peak_val = e[i];
                peak_channel = ch;
                peak_sample = i;
            }
        }
    }
    const analysis::RfImage img = analysis::render_image(env);
    {
        auto os = io::open_binary(cfg.output_dir / "images" / "frame_000.pgm");
        analysis::write_pgm(os, img);
        rep.outputs.push_back("images/frame_000.pgm");
    }
    {
        auto os = io::open_text(cfg.output_dir / "csv" / "image_frame_000.csv");
        analysis::write_image_csv(os, img);
        rep.outputs.push_back("csv/image_frame_000.csv");
    }

    if (cfg.mode == RunMode::acquire_oa) {
        // Energy share of the illuminated probe section, channels 5..8.
        double total = 0.0, active = 0.0;
        for (int ch = 0; ch < real_ch; ++ch) {
            total += channel_energy[static_cast<size_t>(ch)];
            if (ch >= 4 && ch <= 7) active += channel_energy[static_cast<size_t>(ch)];
        }
        rep.metrics["oa_energy_fraction"] = total > 0.0 ? active / total : 0.0;
        rep.metrics["oa_peak_sample"] = static_cast<double>(peak_sample);
    } else {
        rep.metrics["peak_envelope_channel"] = static_cast<double>(peak_channel);
        rep.metrics["peak_depth_sample"] = static_cast<double>(peak_sample);
        rep.metrics["peak_depth_mm"] =
            1540.0 / 2.0 * static_cast<double>(delay + peak_sample) / fs_hz * 1e3;
    }
    rep.add_stage("analysis", "ok", "bandpass + envelope + image on frame 0");
    return rep;
}

RunReport run(const RunConfig& cfg) {
    cfg.validate();
    RunReport rep;
    switch (cfg.mode) {
        case RunMode::acquire_us:
        case RunMode::acquire_oa:
            rep = run_acquire(cfg);
            break;
        case RunMode::stress:
            rep = run_stress(cfg);
            break;
        case RunMode::characterize:
            rep = run_characterize(cfg);
            break;
        case RunMode::budget:
            rep = run_budget(cfg);
            break;
    }
    rep.outputs.push_back("report.json");
    rep.save(cfg.output_dir / "report.json");
    return rep;
}

}  // namespace rfdaq::pipeline
