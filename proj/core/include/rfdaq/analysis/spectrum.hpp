#pragma once

#include <complex>
#include <span>
#include <vector>

namespace rfdaq::analysis {

/// Forward DFT of a real sequence, full n-point complex result.
std::vector<std::complex<double>> fft(std::span<const double> x);

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x);

/// Inverse DFT, normalized by 1/n.
std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> X);

/// One-sided power spectrum with Parseval scaling: the sum over all bins
/// equals the mean square of the input. Bins 0..n/2 for even n.
std::vector<double> power_spectrum_onesided(std::span<const double> x);

/// Analytic signal via the frequency-domain Hilbert transform.
std::vector<std::complex<double>> analytic_signal(std::span<const double> x);

}  // namespace rfdaq::analysis
