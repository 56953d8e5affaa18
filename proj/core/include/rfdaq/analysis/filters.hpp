#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rfdaq/common.hpp"

namespace rfdaq::analysis {

/// Linear-phase FIR with an odd, symmetric tap set.
struct FirFilter {
    std::vector<double> taps;
    size_t group_delay() const { return taps.empty() ? 0 : (taps.size() - 1) / 2; }
};

/// Kaiser window shape parameter for a given stopband attenuation.
double kaiser_beta(double atten_db);

/// Estimated odd tap count for the attenuation and transition width
/// (cycles/sample).
size_t kaiser_tap_count(double atten_db, double transition_norm);

/// Windowed-sinc lowpass; cutoff in cycles/sample (f/fs). taps == 0 picks a
/// count from the attenuation and a default 0.05 transition width.
FirFilter design_lowpass(double cutoff_norm, double atten_db, size_t taps = 0);

/// Bandpass as a difference of lowpasses over (f1, f2), cycles/sample.
FirFilter design_bandpass(double f1_norm, double f2_norm, double atten_db, size_t taps = 0);

/// Convolve with group-delay compensation and symmetric edge extension; the
/// output has the input's length and no phase shift in the passband.
std::vector<double> apply_fir(const FirFilter& fir, std::span<const double> x);

/// Bandpass every channel of a block. Corners in Hz against the block's
/// sample rate.
SampleBlock bandpass_block(const SampleBlock& in, double f1_hz, double f2_hz,
                           double atten_db = 60.0);

/// Instantaneous amplitude: magnitude of the analytic signal.
std::vector<double> envelope(std::span<const double> x);

}  // namespace rfdaq::analysis
