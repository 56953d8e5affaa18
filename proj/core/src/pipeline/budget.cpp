#include <sstream>

#include "rfdaq/acq/leaky_bucket.hpp"
#include "rfdaq/io/csv.hpp"
#include "rfdaq/pipeline/pipeline.hpp"

#include "dirs.hpp"

namespace rfdaq::pipeline {
namespace {

/// Read-start latency that makes the given frame length exactly fill the
/// buffer model: the inverse of the max_frame_length closed form.
double solve_tau(const acq::LeakyBucketModel& m, uint64_t frame_samples) {
    const double l_bits = static_cast<double>(frame_samples) * m.row_bits();
    return (m.capacity_bits - l_bits * (m.r_in - m.r_out) / m.r_in) / m.r_out;
}

struct Row {
    std::string label;
    acq::LeakyBucketModel model;
    std::optional<uint64_t> frame_length;
};

}  // namespace

RunReport run_budget(const RunConfig& cfg) {
    cfg.validate();
    detail::make_dir(cfg.output_dir / "csv");

    RunReport rep;
    rep.mode = mode_name(cfg.mode);

    std::vector<Row> rows;
    if (cfg.budget.include_reference) {
        // The documented operating points of the 256-channel design: no
        // fabric latency, the two buffer readings with the read-out starting
        // late enough to cap the frame at its quoted maximum, and the short
        // high-rate frame.
        acq::LeakyBucketModel base;  // 256 ch x 16 bit @ 80 MSPS, 4 MiB, 95.6 Gb/s
        rows.push_back({"tau_zero", base, std::nullopt});

        acq::LeakyBucketModel mib = base;
        mib.tau_s = solve_tau(mib, 5639);
        rows.push_back({"buffer_4mib", mib, std::nullopt});

        acq::LeakyBucketModel mb = base;
        mb.capacity_bits = 32e6;
        mb.tau_s = solve_tau(mb, 5639);
        rows.push_back({"buffer_4mb", mb, std::nullopt});

        rows.push_back({"short_frame_2000", mib, 2000});
    }
    for (const auto& r : cfg.budget.rows) rows.push_back({r.label, r.model, r.frame_length});
    if (rows.empty()) throw StageError(Stage::config, "budget has no rows");

    std::ostringstream csv;
    csv << "channels,bits,fs,B,R_out,tau_s,L_f_max,FPS_max\n";
    for (const auto& row : rows) {
        const auto& m = row.model;
        csv << m.channels << ',' << m.bits_per_sample << ',' << m.r_in / m.row_bits() << ','
            << static_cast<uint64_t>(m.capacity_bits) << ',' << m.r_out << ',' << m.tau_s << ',';

        const acq::FrameCapacity cap = acq::max_frame_length(m);
        if (cap.kind == acq::FrameCapacity::Kind::infeasible) {
            csv << "infeasible,infeasible\n";
            rep.add_stage(row.label, "infeasible", cap.diagnostic);
            continue;
        }
        const bool unbounded = cap.kind == acq::FrameCapacity::Kind::unbounded;
        uint64_t used = 0;
        if (row.frame_length)
            used = *row.frame_length;
        else if (!unbounded)
            used = cap.samples_per_channel;

        if (used == 0) {
            csv << "unbounded,unbounded\n";
            rep.add_stage(row.label, "ok", "drain keeps up at any frame length");
            continue;
        }
        if (!unbounded && used > cap.samples_per_channel) {
            csv << used << ",exceeds_capacity\n";
            rep.add_stage(row.label, "exceeds_capacity",
                          std::to_string(used) + " > " +
                              std::to_string(cap.samples_per_channel) + " samples");
            continue;
        }
        const double fps = acq::max_fps(m, used);
        csv << used << ',' << fps << '\n';
        rep.metrics["l_" + row.label] = static_cast<double>(used);
        rep.metrics["fps_" + row.label] = fps;
        if (m.tau_s > 0.0) rep.metrics["tau_us_" + row.label] = m.tau_s * 1e6;
        rep.add_stage(row.label, "ok",
                      std::to_string(used) + " samples/frame, " + std::to_string(fps) + " fps");
    }

    auto os = io::open_text(cfg.output_dir / "csv" / "budget.csv");
    os << csv.str();
    rep.outputs.push_back("csv/budget.csv");
    return rep;
}

}  // namespace rfdaq::pipeline
