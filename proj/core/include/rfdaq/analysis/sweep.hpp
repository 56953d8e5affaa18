#pragma once

#include <optional>
#include <span>

#include "rfdaq/common.hpp"

namespace rfdaq::analysis {

/// One captured record of a swept-sine characterization run.
struct SweepRecord {
    double tone_frequency = 0.0;  // Hz
    std::vector<int16_t> samples;
    double sample_rate = 125e6;  // Hz
};

struct TonePoint {
    double frequency = 0.0;  // Hz
    double a_pp = 0.0;       // peak-to-peak code excursion
    double gain_db = 0.0;    // relative to the sweep maximum
};

struct BandwidthResult {
    std::vector<TonePoint> points;  // in ascending tone order
    double f_peak = 0.0;            // frequency of maximum gain
    std::optional<double> f_lo;     // lower -3 dB corner, if crossed
    std::optional<double> f_hi;     // upper -3 dB corner, if crossed
};

/// Relative gain per tone: A_pp normalized by the sweep maximum, in dB.
/// Corner fields are left unset; see corners_3db.
BandwidthResult gain_curve(std::span<const SweepRecord> records);

/// First -3 dB crossings on each side of the peak-gain frequency, linearly
/// interpolated between the bracketing sweep points.
std::pair<std::optional<double>, std::optional<double>> corners_3db(const BandwidthResult& curve);

/// gain_curve with the corner fields filled in.
BandwidthResult analyze_bandwidth(std::span<const SweepRecord> records);

/// Default characterization grid: 0.2 MHz steps from 0.2 MHz up to Nyquist.
std::vector<double> default_sweep_grid(double sample_rate = 125e6, double step_hz = 0.2e6);

struct SnrConfig {
    int span_bins = 8;            // fixed fundamental half-span
    double span_fraction = 0.01;  // ... or this fraction of the fundamental bin
    int harmonic_guards = 3;      // guarded harmonics 2f0 .. (1+n)f0
    int guard_bins = 8;           // half-span of each guard and of DC
    double noise_floor_hz = 1e6;  // noise integration starts here
};

struct BinRange {
    size_t lo = 0;
    size_t hi = 0;  // inclusive
};

struct SnrResult {
    double p_sig = 0.0;
    double p_noise = 0.0;
    double snr_db = 0.0;
    size_t fundamental_bin = 0;
    std::vector<BinRange> mask;  // bins excluded from the noise integral
};

/// Whether the estimator is defined for this tone: the fundamental span must
/// clear the DC exclusion, which very low tones on short records cannot.
bool snr_defined(size_t record_samples, double sample_rate, double f0, const SnrConfig& cfg = {});

/// Masked-FFT in-band SNR: mean removed, one-sided power spectrum, signal
/// integrated around the fundamental, noise integrated from noise_floor_hz
/// to Nyquist excluding DC, the fundamental span, harmonic guards (alias
/// folded) and the first subharmonic.
SnrResult snr_estimate(const SweepRecord& record, double f0, const SnrConfig& cfg = {});

}  // namespace rfdaq::analysis
