#include <algorithm>

#include "rfdaq/io/csv.hpp"
#include "rfdaq/pipeline/pipeline.hpp"
#include "rfdaq/rdma/throughput.hpp"

#include "dirs.hpp"

namespace rfdaq::pipeline {

RunReport run_stress(const RunConfig& cfg) {
    cfg.validate();
    detail::make_dir(cfg.output_dir / "csv");

    RunReport rep;
    rep.mode = mode_name(cfg.mode);

    const auto points = rdma::throughput_bench(cfg.stress);
    {
        auto os = io::open_text(cfg.output_dir / "csv" / "throughput_runs.csv");
        rdma::write_bench_csv(os, points);
        rep.outputs.push_back("csv/throughput_runs.csv");
    }
    {
        auto os = io::open_text(cfg.output_dir / "csv" / "throughput_summary.csv");
        rdma::write_bench_summary_csv(os, points);
        rep.outputs.push_back("csv/throughput_summary.csv");
    }

    const rdma::BenchPoint* lo = nullptr;  // smallest payload, batch 1 equivalent
    const rdma::BenchPoint* hi = nullptr;  // largest payload, deepest batch
    for (const auto& pt : points) {
        if (!lo || pt.payload_bytes < lo->payload_bytes ||
            (pt.payload_bytes == lo->payload_bytes && pt.batch < lo->batch))
            lo = &pt;
        if (!hi || pt.payload_bytes > hi->payload_bytes ||
            (pt.payload_bytes == hi->payload_bytes && pt.batch > hi->batch))
            hi = &pt;
    }
    double best = 0.0, spread = 0.0;
    uint64_t transferred = 0;
    for (const auto& pt : points) {
        best = std::max(best, pt.mean_gbps);
        spread = std::max(spread, pt.spread_gbps);
        transferred += cfg.stress.bytes_per_run * pt.runs_gbps.size();
    }
    rep.bytes_transferred = transferred;
    rep.metrics["goodput_best_gbps"] = best;
    rep.metrics["goodput_worst_spread_gbps"] = spread;
    if (lo && hi && lo != hi && lo->mean_gbps > 0.0) {
        rep.metrics["goodput_min_point_gbps"] = lo->mean_gbps;
        rep.metrics["goodput_max_point_gbps"] = hi->mean_gbps;
        rep.metrics["goodput_batch_gain"] = hi->mean_gbps / lo->mean_gbps;
    }
    rep.add_stage("transport", "ok",
                  std::to_string(points.size()) + " grid points, " +
                      std::to_string(cfg.stress.repeats) + " runs each");
    return rep;
}

}  // namespace rfdaq::pipeline
