#include "rfdaq/analysis/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "rfdaq/analysis/spectrum.hpp"

namespace rfdaq::analysis {

BandwidthResult gain_curve(std::span<const SweepRecord> records) {
    if (records.size() < 2)
        throw StageError(Stage::analysis, "gain curve needs at least two tones");
    BandwidthResult out;
    out.points.reserve(records.size());
    for (const SweepRecord& rec : records) {
        if (rec.samples.empty())
            throw StageError(Stage::analysis, "empty sweep record");
        const auto [lo, hi] = std::minmax_element(rec.samples.begin(), rec.samples.end());
        TonePoint pt;
        pt.frequency = rec.tone_frequency;
        pt.a_pp = static_cast<double>(*hi) - static_cast<double>(*lo);
        if (pt.a_pp <= 0.0)
            throw StageError(Stage::analysis, "all-zero record: gain undefined at this tone");
        out.points.push_back(pt);
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const TonePoint& a, const TonePoint& b) { return a.frequency < b.frequency; });
    double max_app = 0.0;
    for (const TonePoint& pt : out.points) max_app = std::max(max_app, pt.a_pp);
    for (TonePoint& pt : out.points) pt.gain_db = 20.0 * std::log10(pt.a_pp / max_app);
    const auto peak =
        std::max_element(out.points.begin(), out.points.end(),
                         [](const TonePoint& a, const TonePoint& b) { return a.gain_db < b.gain_db; });
    out.f_peak = peak->frequency;
    return out;
}

namespace {

std::optional<double> cross_down(const std::vector<TonePoint>& pts, size_t peak, bool left) {
    // Walk outward from the peak; the first pair straddling -3 dB gives the
    // corner by linear interpolation.
    const double target = -3.0;
    if (left) {
        for (size_t i = peak; i > 0; --i) {
            const TonePoint& inner = pts[i];
            const TonePoint& outer = pts[i - 1];
            if (outer.gain_db < target && inner.gain_db >= target) {
                const double t = (target - inner.gain_db) / (outer.gain_db - inner.gain_db);
                return inner.frequency + t * (outer.frequency - inner.frequency);
            }
        }
        return std::nullopt;
    }
    for (size_t i = peak; i + 1 < pts.size(); ++i) {
        const TonePoint& inner = pts[i];
        const TonePoint& outer = pts[i + 1];
        if (outer.gain_db < target && inner.gain_db >= target) {
            const double t = (target - inner.gain_db) / (outer.gain_db - inner.gain_db);
            return inner.frequency + t * (outer.frequency - inner.frequency);
        }
    }
    return std::nullopt;
}

}  // namespace

std::pair<std::optional<double>, std::optional<double>> corners_3db(const BandwidthResult& curve) {
    if (curve.points.empty()) return {std::nullopt, std::nullopt};
    size_t peak = 0;
    for (size_t i = 1; i < curve.points.size(); ++i)
        if (curve.points[i].gain_db > curve.points[peak].gain_db) peak = i;
    return {cross_down(curve.points, peak, true), cross_down(curve.points, peak, false)};
}

BandwidthResult analyze_bandwidth(std::span<const SweepRecord> records) {
    BandwidthResult out = gain_curve(records);
    std::tie(out.f_lo, out.f_hi) = corners_3db(out);
    return out;
}

std::vector<double> default_sweep_grid(double sample_rate, double step_hz) {
    if (sample_rate <= 0.0 || step_hz <= 0.0)
        throw StageError(Stage::analysis, "sweep grid needs positive rate and step");
    std::vector<double> grid;
    const double nyquist = sample_rate / 2.0;
    for (double f = step_hz; f < nyquist - 1e-9; f += step_hz) grid.push_back(f);
    return grid;
}

namespace {

void mask_range(std::vector<BinRange>& mask, size_t n_bins, ptrdiff_t lo, ptrdiff_t hi) {
    lo = std::max<ptrdiff_t>(lo, 0);
    hi = std::min<ptrdiff_t>(hi, static_cast<ptrdiff_t>(n_bins) - 1);
    if (lo <= hi) mask.push_back({static_cast<size_t>(lo), static_cast<size_t>(hi)});
}

bool masked(const std::vector<BinRange>& mask, size_t bin) {
    for (const BinRange& r : mask)
        if (bin >= r.lo && bin <= r.hi) return true;
    return false;
}

// Alias-fold a bin index into the one-sided range [0, n/2].
size_t fold_bin(double k, size_t n) {
    const double nn = static_cast<double>(n);
    double m = std::fmod(k, nn);
    if (m < 0.0) m += nn;
    if (m > nn / 2.0) m = nn - m;
    return static_cast<size_t>(std::llround(m));
}

// Fundamental half-span in bins for a tone landing on bin k0.
size_t fundamental_span(size_t k0, const SnrConfig& cfg) {
    return std::max<size_t>(
        static_cast<size_t>(cfg.span_bins),
        static_cast<size_t>(std::llround(cfg.span_fraction * static_cast<double>(k0))));
}

}  // namespace

bool snr_defined(size_t record_samples, double sample_rate, double f0, const SnrConfig& cfg) {
    if (record_samples < 64 || !(f0 > 0.0) || !(f0 < sample_rate / 2.0)) return false;
    const double bin_hz = sample_rate / static_cast<double>(record_samples);
    const size_t k0 = static_cast<size_t>(std::llround(f0 / bin_hz));
    return k0 > static_cast<size_t>(cfg.guard_bins) + fundamental_span(k0, cfg);
}

SnrResult snr_estimate(const SweepRecord& record, double f0, const SnrConfig& cfg) {
    const double fs = record.sample_rate;
    const size_t n = record.samples.size();
    if (n < 64) throw StageError(Stage::analysis, "record too short for an SNR estimate");
    if (!(f0 > 0.0) || !(f0 < fs / 2.0))
        throw StageError(Stage::analysis, "fundamental must lie inside (0, Nyquist)");

    std::vector<double> x(n);
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += record.samples[i];
    mean /= static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) x[i] = static_cast<double>(record.samples[i]) - mean;

    const std::vector<double> ps = power_spectrum_onesided(x);
    const size_t n_bins = ps.size();  // n/2 + 1

    const double bin_hz = fs / static_cast<double>(n);
    const size_t k0 = static_cast<size_t>(std::llround(f0 / bin_hz));
    const size_t span = fundamental_span(k0, cfg);

    SnrResult out;
    out.fundamental_bin = k0;
    if (k0 <= static_cast<size_t>(cfg.guard_bins) + span)
        throw StageError(Stage::analysis, "fundamental span reaches the DC exclusion");

    // Signal: the fundamental neighborhood.
    for (size_t k = k0 - span; k <= std::min(k0 + span, n_bins - 1); ++k) out.p_sig += ps[k];

    // Exclusions for the noise integral.
    mask_range(out.mask, n_bins, 0, cfg.guard_bins);  // DC
    mask_range(out.mask, n_bins, static_cast<ptrdiff_t>(k0 - span),
               static_cast<ptrdiff_t>(k0 + span));
    for (int m = 2; m <= 1 + cfg.harmonic_guards; ++m) {
        const size_t kh = fold_bin(static_cast<double>(m) * f0 / bin_hz, n);
        mask_range(out.mask, n_bins, static_cast<ptrdiff_t>(kh) - cfg.guard_bins,
                   static_cast<ptrdiff_t>(kh) + cfg.guard_bins);
    }
    const size_t ksub = fold_bin(0.5 * f0 / bin_hz, n);
    mask_range(out.mask, n_bins, static_cast<ptrdiff_t>(ksub) - cfg.guard_bins,
               static_cast<ptrdiff_t>(ksub) + cfg.guard_bins);

    const size_t k_floor = static_cast<size_t>(std::ceil(cfg.noise_floor_hz / bin_hz));
    for (size_t k = k_floor; k < n_bins; ++k)
        if (!masked(out.mask, k)) out.p_noise += ps[k];

    if (out.p_noise <= 0.0)
        throw StageError(Stage::analysis, "no unmasked noise bins with power");
    out.snr_db = 10.0 * std::log10(out.p_sig / out.p_noise);
    return out;
}

}  // namespace rfdaq::analysis
