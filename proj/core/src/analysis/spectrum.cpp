#include "rfdaq/analysis/spectrum.hpp"

#include <fftw3.h>

#include <mutex>

namespace rfdaq::analysis {

namespace {

// The FFTW planner is not thread-safe; plan creation and destruction must be
// serialized. Execution of a finished plan is safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<std::complex<double>> dft(std::span<const std::complex<double>> x, int sign) {
    const size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    if (n == 0) return out;
    std::vector<std::complex<double>> in(x.begin(), x.end());

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x) {
    return dft(x, FFTW_FORWARD);
}

std::vector<std::complex<double>> fft(std::span<const double> x) {
    std::vector<std::complex<double>> cx(x.size());
    for (size_t i = 0; i < x.size(); ++i) cx[i] = x[i];
    return fft(std::span<const std::complex<double>>(cx));
}

std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> X) {
    auto out = dft(X, FFTW_BACKWARD);
    const double scale = X.empty() ? 1.0 : 1.0 / static_cast<double>(X.size());
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<double> power_spectrum_onesided(std::span<const double> x) {
    const size_t n = x.size();
    auto X = fft(x);
    const size_t half = n / 2;
    std::vector<double> p(half + 1, 0.0);
    if (n == 0) return p;
    const double inv_n2 = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    for (size_t k = 0; k <= half; ++k) {
        const double mag2 = std::norm(X[k]) * inv_n2;
        const bool unique = k == 0 || (n % 2 == 0 && k == half);
        p[k] = unique ? mag2 : 2.0 * mag2;
    }
    return p;
}

std::vector<std::complex<double>> analytic_signal(std::span<const double> x) {
    const size_t n = x.size();
    auto X = fft(x);
    for (size_t k = 1; k < n; ++k) {
        const bool nyquist = n % 2 == 0 && k == n / 2;
        if (k < (n + 1) / 2)
            X[k] *= 2.0;
        else if (!nyquist)
            X[k] = 0.0;
    }
    return ifft(X);
}

}  // namespace rfdaq::analysis
