#include "rfdaq/afe/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace rfdaq::afe {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double uniform01(uint64_t h) {  // (0, 1)
    return (static_cast<double>(h >> 11) + 0.5) * 0x1p-53;
}

// Amplitude/phase of the optional first-order analog response at f.
std::complex<double> response_at(double f, const AfeConfig& cfg) {
    std::complex<double> h(1.0, 0.0);
    if (cfg.response_hp_hz > 0.0) {
        const std::complex<double> jf(0.0, f / cfg.response_hp_hz);
        h *= jf / (1.0 + jf);
    }
    if (cfg.response_lp_hz > 0.0) {
        const std::complex<double> jf(0.0, f / cfg.response_lp_hz);
        h *= 1.0 / (1.0 + jf);
    }
    return h;
}

}  // namespace

void AfeConfig::validate() const {
    auto bad = [](const std::string& m) { throw StageError(Stage::generate, m); };
    if (channels < 1 || channels > 4096) bad("channel count out of range");
    if (!(sample_rate > 0.0) || sample_rate > 125e6) bad("sample_rate outside (0, 125e6]");
    if (gain_db < -3.0 || gain_db > 48.0) bad("gain outside the -3..48 dB range");
    if (noise_rms < 0.0) bad("noise_rms must be non-negative");
    if (response_hp_hz < 0.0 || response_lp_hz < 0.0) bad("response corner must be non-negative");
}

bool Scenario::channel_active(int ch) const {
    if (active_channels.empty()) return true;
    return std::find(active_channels.begin(), active_channels.end(), ch) !=
           active_channels.end();
}

double Scenario::value(int ch, uint64_t index, const AfeConfig& cfg) const {
    if (!channel_active(ch)) return 0.0;
    const double t = static_cast<double>(index) / cfg.sample_rate;

    if (const auto* dc = std::get_if<Dc>(&shape)) return dc->level;

    if (const auto* sine = std::get_if<SweptSine>(&shape)) {
        double a = sine->amplitude, ph = sine->phase;
        const auto h = response_at(sine->freq_hz, cfg);
        a *= std::abs(h);
        ph += std::arg(h);
        return a * std::cos(2.0 * M_PI * sine->freq_hz * t + ph);
    }

    if (const auto* pe = std::get_if<PulseEcho>(&shape)) {
        // Gaussian-windowed bursts centered at the two-way time of flight.
        const double sigma = pe->cycles / (6.0 * pe->f0);
        double v = 0.0;
        for (size_t k = 0; k < pe->depths_m.size(); ++k) {
            const double tk = 2.0 * pe->depths_m[k] / pe->sound_speed;
            const double dt = t - tk;
            if (std::abs(dt) > 5.0 * sigma) continue;
            const double refl = k < pe->reflectivity.size() ? pe->reflectivity[k] : 1.0;
            v += refl * pe->amplitude * std::exp(-dt * dt / (2.0 * sigma * sigma)) *
                 std::cos(2.0 * M_PI * pe->f0 * dt);
        }
        return v;
    }

    if (const auto* oa = std::get_if<OaPulse>(&shape)) {
        // Bipolar pressure transient: normalized first derivative of a
        // gaussian, peak amplitude at delay_s - width_s.
        const double x = (t - oa->delay_s) / oa->width_s;
        if (std::abs(x) > 8.0) return 0.0;
        return -oa->amplitude * x * std::exp(-0.5 * x * x) / 0.6065306597126334;
    }

    const auto& prbs = std::get<Prbs>(shape);
    const uint64_t h = splitmix64(prbs.seed ^ splitmix64(static_cast<uint64_t>(ch) << 32 ^ index));
    return prbs.amplitude * (2.0 * uniform01(h) - 1.0);
}

Scenario default_us_scenario() {
    Scenario sc;
    sc.shape = PulseEcho{};
    return sc;
}

Scenario default_oa_scenario() {
    Scenario sc;
    sc.shape = OaPulse{};
    sc.active_channels = {4, 5, 6, 7};  // probe channels 5..8, 1-based
    return sc;
}

}  // namespace rfdaq::afe
