#pragma once

#include <ostream>
#include <vector>

#include "rfdaq/rdma/channel.hpp"

namespace rfdaq::rdma {

struct BenchConfig {
    std::vector<size_t> payload_bytes{65536, 131072, 262144, 524288, 1048576};
    std::vector<int> batch_sizes{1, 2, 4, 8, 16};
    int repeats = 10;
    double poll_overhead_s = 10e-6;  // host cost charged per completed batch
    uint64_t bytes_per_run = 16ull * 1024 * 1024;
    ChannelModel channel;  // loss-free by default
};

struct BenchPoint {
    size_t payload_bytes = 0;
    int batch = 0;
    double mean_gbps = 0.0;
    double spread_gbps = 0.0;  // max - min across repeats
    std::vector<double> runs_gbps;
};

/// One measured transfer: fresh endpoints, handshake, then repost `batch`
/// WRITEs per round until bytes_per_run have landed. Virtual time covers
/// wire serialization, propagation, acks, and the per-batch poll overhead.
double bench_single_run(size_t payload, int batch, const BenchConfig& cfg);

/// Full payload x batch grid, `repeats` runs per point.
std::vector<BenchPoint> throughput_bench(const BenchConfig& cfg);

void write_bench_csv(std::ostream& os, const std::vector<BenchPoint>& points);
void write_bench_summary_csv(std::ostream& os, const std::vector<BenchPoint>& points);

}  // namespace rfdaq::rdma
