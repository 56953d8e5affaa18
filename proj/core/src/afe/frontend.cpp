#include "rfdaq/afe/frontend.hpp"

#include <cmath>
#include <complex>

#include "rfdaq/analysis/filters.hpp"

namespace rfdaq::afe {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Counter-based gaussian: the value at (seed, ch, index) never depends on
// block boundaries, which is what makes re-chunked streams bit-identical.
double gaussian_at(uint64_t seed, int ch, uint64_t index) {
    const uint64_t base = splitmix64(seed ^ (static_cast<uint64_t>(ch) * 0xD1342543DE82EF95ull));
    const uint64_t h1 = splitmix64(base ^ index);
    const uint64_t h2 = splitmix64(h1 ^ 0x2545F4914F6CDD1Dull);
    const double u1 = (static_cast<double>(h1 >> 11) + 0.5) * 0x1p-53;
    const double u2 = (static_cast<double>(h2 >> 11) + 0.5) * 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

Frontend::Frontend(Scenario scenario, AfeConfig config)
    : scenario_(std::move(scenario)), cfg_(config) {
    cfg_.validate();
    gain_lin_ = std::pow(10.0, cfg_.gain_db / 20.0);
    // Passive termination trades input matching for a higher noise floor.
    noise_scale_ = cfg_.noise_rms * (cfg_.active_termination ? 1.0 : 1.25);
}

SampleBlock Frontend::next(size_t n) {
    if (n == 0) throw StageError(Stage::generate, "sample count must be positive");
    SampleBlock block(cfg_.channels, n, pos_, cfg_.sample_rate);
    for (int ch = 0; ch < cfg_.channels; ++ch) {
        for (size_t i = 0; i < n; ++i) {
            const uint64_t idx = pos_ + i;
            double v = 32767.0 * gain_lin_ * scenario_.value(ch, idx, cfg_);
            if (noise_scale_ > 0.0) v += noise_scale_ * gaussian_at(cfg_.seed, ch, idx);
            const int16_t q = saturate16(v);
            if (q == 32767 || q == -32767) {
                if (std::abs(v) > 32767.0) ++saturated_;
            }
            block.sample(ch, i) = q;
        }
    }
    pos_ += n;
    return block;
}

SampleBlock generate(const Scenario& scenario, const AfeConfig& config, size_t n,
                     uint64_t start_index) {
    Frontend fe(scenario, config);
    fe.seek(start_index);
    return fe.next(n);
}

}  // namespace rfdaq::afe
