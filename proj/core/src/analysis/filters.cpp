#include "rfdaq/analysis/filters.hpp"

#include <algorithm>
#include <cmath>

#include "rfdaq/analysis/spectrum.hpp"

namespace rfdaq::analysis {

namespace {

double bessel_i0(double x) {
    // Power series; converges quickly for the beta range used here.
    double sum = 1.0, term = 1.0;
    const double q = x * x / 4.0;
    for (int k = 1; k < 64; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-14 * sum) break;
    }
    return sum;
}

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

}  // namespace

double kaiser_beta(double atten_db) {
    if (atten_db > 50.0) return 0.1102 * (atten_db - 8.7);
    if (atten_db >= 21.0)
        return 0.5842 * std::pow(atten_db - 21.0, 0.4) + 0.07886 * (atten_db - 21.0);
    return 0.0;
}

size_t kaiser_tap_count(double atten_db, double transition_norm) {
    transition_norm = std::max(transition_norm, 1e-4);
    size_t n = static_cast<size_t>(std::ceil((atten_db - 7.95) / (14.36 * transition_norm))) + 1;
    if (n < 11) n = 11;
    if (n % 2 == 0) ++n;
    return n;
}

FirFilter design_lowpass(double cutoff_norm, double atten_db, size_t taps) {
    if (!(cutoff_norm > 0.0) || cutoff_norm >= 0.5)
        throw StageError(Stage::analysis, "lowpass cutoff outside (0, 0.5)");
    if (taps == 0) taps = kaiser_tap_count(atten_db, 0.05);
    if (taps % 2 == 0) ++taps;

    const double beta = kaiser_beta(atten_db);
    const double i0b = bessel_i0(beta);
    const double m = static_cast<double>(taps - 1);
    FirFilter fir;
    fir.taps.resize(taps);
    for (size_t k = 0; k < taps; ++k) {
        const double t = static_cast<double>(k) - m / 2.0;
        const double r = 2.0 * static_cast<double>(k) / m - 1.0;
        const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
        fir.taps[k] = 2.0 * cutoff_norm * sinc(2.0 * cutoff_norm * t) * w;
    }
    // Normalize DC gain to exactly one.
    double s = 0.0;
    for (double v : fir.taps) s += v;
    for (double& v : fir.taps) v /= s;
    return fir;
}

FirFilter design_bandpass(double f1_norm, double f2_norm, double atten_db, size_t taps) {
    if (!(f1_norm > 0.0) || !(f2_norm > f1_norm) || f2_norm >= 0.5)
        throw StageError(Stage::analysis, "bandpass corners outside 0 < f1 < f2 < 0.5");
    if (taps == 0) {
        // Size the transition to the narrower margin: below f1 or above f2.
        const double margin = std::min({f1_norm, 0.5 - f2_norm, 0.05});
        taps = kaiser_tap_count(atten_db, margin);
    }
    if (taps % 2 == 0) ++taps;
    FirFilter hi = design_lowpass(f2_norm, atten_db, taps);
    FirFilter lo = design_lowpass(f1_norm, atten_db, taps);
    FirFilter fir;
    fir.taps.resize(taps);
    for (size_t k = 0; k < taps; ++k) fir.taps[k] = hi.taps[k] - lo.taps[k];
    return fir;
}

std::vector<double> apply_fir(const FirFilter& fir, std::span<const double> x) {
    const size_t n = x.size();
    const size_t m = fir.taps.size();
    if (m == 0 || n == 0) return std::vector<double>(x.begin(), x.end());
    const size_t d = fir.group_delay();

    // Symmetric extension keeps the ends from ringing against zero padding.
    std::vector<double> ext(n + 2 * d);
    for (size_t i = 0; i < d; ++i) ext[i] = x[std::min(d - i, n - 1)];
    std::copy(x.begin(), x.end(), ext.begin() + static_cast<ptrdiff_t>(d));
    for (size_t i = 0; i < d; ++i) ext[d + n + i] = x[n - 1 - std::min(i + 1, n - 1)];

    std::vector<double> out(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (size_t k = 0; k < m; ++k) acc += fir.taps[k] * ext[i + 2 * d - k];
        out[i] = acc;
    }
    return out;
}

SampleBlock bandpass_block(const SampleBlock& in, double f1_hz, double f2_hz, double atten_db) {
    const double fs = in.sample_rate;
    FirFilter fir = design_bandpass(f1_hz / fs, f2_hz / fs, atten_db);
    SampleBlock out = in;
    const size_t spc = in.samples_per_channel();
    std::vector<double> ch(spc);
    for (int c = 0; c < in.channels; ++c) {
        for (size_t i = 0; i < spc; ++i) ch[i] = in.sample(c, i);
        auto y = apply_fir(fir, ch);
        for (size_t i = 0; i < spc; ++i) out.sample(c, i) = saturate16(y[i]);
    }
    return out;
}

std::vector<double> envelope(std::span<const double> x) {
    auto z = analytic_signal(x);
    std::vector<double> e(z.size());
    for (size_t i = 0; i < z.size(); ++i) e[i] = std::abs(z[i]);
    return e;
}

}  // namespace rfdaq::analysis
