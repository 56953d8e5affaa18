#include <algorithm>
#include <utility>
#include <variant>

#include "rfdaq/afe/frontend.hpp"
#include "rfdaq/analysis/sweep.hpp"
#include "rfdaq/io/csv.hpp"
#include "rfdaq/pipeline/pipeline.hpp"

#include "dirs.hpp"

namespace rfdaq::pipeline {

RunReport run_characterize(const RunConfig& cfg) {
    cfg.validate();
    detail::make_dir(cfg.output_dir / "csv");

    RunReport rep;
    rep.mode = mode_name(cfg.mode);

    const double fs_hz = cfg.afe.sample_rate;
    std::vector<double> grid = cfg.characterize.tones;
    if (grid.empty()) {
        for (double f = cfg.characterize.grid_start_hz; f < fs_hz / 2.0;
             f += cfg.characterize.grid_step_hz)
            grid.push_back(f);
    }
    std::sort(grid.begin(), grid.end());
    if (grid.size() < 2)
        throw StageError(Stage::config, "characterization needs at least two tones");

    // One channel is representative: the stimulus and the noise process are
    // identical across the front-end's channels.
    afe::AfeConfig ch0 = cfg.afe;
    ch0.channels = 1;
    afe::SweptSine base;
    if (const auto* s = std::get_if<afe::SweptSine>(&cfg.scenario.shape)) base = *s;

    std::vector<analysis::SweepRecord> records;
    records.reserve(grid.size());
    std::vector<std::pair<double, analysis::SnrResult>> snr_rows;
    for (const double f : grid) {
        afe::Scenario sc;
        afe::SweptSine tone = base;
        tone.freq_hz = f;
        sc.shape = tone;
        const SampleBlock b = afe::generate(sc, ch0, cfg.characterize.record_samples, 0);
        analysis::SweepRecord rec;
        rec.tone_frequency = f;
        rec.samples = b.data;
        rec.sample_rate = fs_hz;
        // Tones below the estimator's DC clearance get a gain point only.
        if (analysis::snr_defined(rec.samples.size(), fs_hz, f, cfg.characterize.snr))
            snr_rows.emplace_back(f, analysis::snr_estimate(rec, f, cfg.characterize.snr));
        records.push_back(std::move(rec));
        rep.bytes_generated += cfg.characterize.record_samples * sizeof(int16_t);
    }
    rep.add_stage("generate", "ok",
                  std::to_string(grid.size()) + " tone records of " +
                      std::to_string(cfg.characterize.record_samples) + " samples");

    const analysis::BandwidthResult bw = analysis::analyze_bandwidth(records);
    {
        auto os = io::open_text(cfg.output_dir / "csv" / "gain_curve.csv");
        io::write_gain_csv(os, bw);
        rep.outputs.push_back("csv/gain_curve.csv");
    }
    {
        auto os = io::open_text(cfg.output_dir / "csv" / "snr.csv");
        io::write_snr_csv(os, snr_rows);
        rep.outputs.push_back("csv/snr.csv");
    }

    rep.metrics["f_peak_hz"] = bw.f_peak;
    if (bw.f_lo) rep.metrics["f_lo_hz"] = *bw.f_lo;
    if (bw.f_hi) rep.metrics["f_hi_hz"] = *bw.f_hi;
    if (!snr_rows.empty()) {
        double snr_min = 1e9, snr_max = -1e9;
        for (const auto& [f, r] : snr_rows) {
            snr_min = std::min(snr_min, r.snr_db);
            snr_max = std::max(snr_max, r.snr_db);
        }
        rep.metrics["snr_min_db"] = snr_min;
        rep.metrics["snr_max_db"] = snr_max;
    }

    std::string corners = "corners ";
    corners += bw.f_lo ? std::to_string(*bw.f_lo / 1e6) + " MHz" : "absent";
    corners += " / ";
    corners += bw.f_hi ? std::to_string(*bw.f_hi / 1e6) + " MHz" : "absent";
    rep.add_stage("analysis", "ok",
                  "peak at " + std::to_string(bw.f_peak / 1e6) + " MHz, " + corners);
    return rep;
}

}  // namespace rfdaq::pipeline
