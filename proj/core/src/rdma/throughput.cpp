#include "rfdaq/rdma/throughput.hpp"

#include <algorithm>

#include "rfdaq/rdma/simulation.hpp"

namespace rfdaq::rdma {

double bench_single_run(size_t payload, int batch, const BenchConfig& cfg) {
    if (payload == 0 || batch <= 0)
        throw StageError(Stage::transport, "benchmark point must be positive");
    SimChannel channel(cfg.channel);
    Endpoint::Config ecfg;
    ecfg.mtu = cfg.channel.mtu;
    Endpoint initiator("bench-initiator", channel, 0, cfg.channel, ecfg);
    Endpoint responder("bench-responder", channel, 1, cfg.channel, ecfg);

    std::vector<uint8_t> sink(payload * static_cast<size_t>(batch));
    const MemoryRegion mr = responder.register_memory(sink);
    responder.listen(mr);
    double t = cm_handshake(initiator, responder, channel, 0.0, 1.0);

    std::vector<uint8_t> block(payload);
    for (size_t i = 0; i < payload; ++i) block[i] = static_cast<uint8_t>(i * 131 + 7);

    const uint64_t round_bytes = payload * static_cast<uint64_t>(batch);
    const uint64_t rounds = (cfg.bytes_per_run + round_bytes - 1) / round_bytes;
    Endpoint* eps[2] = {&initiator, &responder};

    const double t0 = t;
    uint64_t posted = 0;
    uint64_t completed = 0;
    for (uint64_t r = 0; r < rounds; ++r) {
        std::vector<WorkRequest> wrs(static_cast<size_t>(batch));
        for (int j = 0; j < batch; ++j) {
            WorkRequest& wr = wrs[static_cast<size_t>(j)];
            wr.wr_id = posted++;
            wr.opcode = Opcode::write;
            wr.payload = block;
            wr.remote_offset = static_cast<uint64_t>(j) * payload;
            wr.rkey = mr.rkey;
        }
        if (initiator.post_batch(wrs) != wrs.size())
            throw StageError(Stage::transport, "benchmark send queue overflow");
        const uint64_t target = posted;
        auto done = [&] {
            for (const Completion& c : initiator.poll_cq()) {
                if (c.status != Completion::Status::success)
                    throw StageError(Stage::transport, "benchmark transfer failed");
                ++completed;
            }
            return completed >= target;
        };
        const RunResult rr = run_until(channel, eps, t, t + 10.0, done);
        if (!rr.completed) throw StageError(Stage::transport, "benchmark transfer stalled");
        t = rr.time + cfg.poll_overhead_s;
    }
    const double elapsed = t - t0;
    return static_cast<double>(rounds * round_bytes) * 8.0 / elapsed / 1e9;
}

std::vector<BenchPoint> throughput_bench(const BenchConfig& cfg) {
    std::vector<BenchPoint> grid;
    for (size_t payload : cfg.payload_bytes) {
        for (int batch : cfg.batch_sizes) {
            BenchPoint pt;
            pt.payload_bytes = payload;
            pt.batch = batch;
            for (int r = 0; r < cfg.repeats; ++r)
                pt.runs_gbps.push_back(bench_single_run(payload, batch, cfg));
            const auto [lo, hi] = std::minmax_element(pt.runs_gbps.begin(), pt.runs_gbps.end());
            pt.spread_gbps = *hi - *lo;
            double sum = 0.0;
            for (double g : pt.runs_gbps) sum += g;
            pt.mean_gbps = sum / static_cast<double>(pt.runs_gbps.size());
            grid.push_back(std::move(pt));
        }
    }
    return grid;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchPoint>& points) {
    os << "payload_bytes,batch,run,goodput_gbps\n";
    for (const BenchPoint& pt : points)
        for (size_t r = 0; r < pt.runs_gbps.size(); ++r)
            os << pt.payload_bytes << ',' << pt.batch << ',' << r << ',' << pt.runs_gbps[r]
               << '\n';
}

void write_bench_summary_csv(std::ostream& os, const std::vector<BenchPoint>& points) {
    os << "payload_bytes,batch,mean_gbps,spread_gbps\n";
    for (const BenchPoint& pt : points)
        os << pt.payload_bytes << ',' << pt.batch << ',' << pt.mean_gbps << ','
           << pt.spread_gbps << '\n';
}

}  // namespace rfdaq::rdma
