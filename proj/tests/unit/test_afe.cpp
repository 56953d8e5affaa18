#include <cmath>
#include <random>

#include <doctest.h>

#include "rfdaq/afe/frontend.hpp"

using namespace rfdaq;
using namespace rfdaq::afe;

namespace {

AfeConfig quiet_config() {
    AfeConfig cfg;
    cfg.noise_rms = 0.0;
    return cfg;
}

}  // namespace

TEST_SUITE("afe") {

TEST_CASE("streams are deterministic and independent of pull size") {
    AfeConfig cfg;
    cfg.noise_rms = 12.0;
    cfg.seed = 42;
    Scenario sc = default_us_scenario();

    const SampleBlock whole = generate(sc, cfg, 1000, 0);
    Frontend fe(sc, cfg);
    const SampleBlock a = fe.next(317);
    const SampleBlock b = fe.next(683);
    REQUIRE(whole.samples_per_channel() == 1000);
    for (int ch = 0; ch < cfg.channels; ++ch) {
        for (size_t i = 0; i < 317; ++i) CHECK(a.sample(ch, i) == whole.sample(ch, i));
        for (size_t i = 0; i < 683; ++i) CHECK(b.sample(ch, i) == whole.sample(ch, 317 + i));
    }
}

TEST_CASE("noise is keyed by absolute sample index") {
    AfeConfig cfg;
    cfg.noise_rms = 20.0;
    cfg.seed = 9;
    Scenario sc;  // dc zero, pure noise
    const SampleBlock from0 = generate(sc, cfg, 600, 0);
    const SampleBlock from100 = generate(sc, cfg, 500, 100);
    for (int ch = 0; ch < cfg.channels; ++ch)
        for (size_t i = 0; i < 500; ++i)
            CHECK(from100.sample(ch, i) == from0.sample(ch, 100 + i));
}

TEST_CASE("pulse-echo places the first reflection at its time of flight") {
    const AfeConfig cfg = quiet_config();
    Scenario sc = default_us_scenario();
    const auto& pe = std::get<PulseEcho>(sc.shape);
    const uint64_t expected =
        static_cast<uint64_t>(std::llround(2.0 * pe.depths_m[0] / pe.sound_speed *
                                           cfg.sample_rate));

    const SampleBlock b = generate(sc, cfg, 4096, 0);
    size_t peak = 0;
    int16_t best = 0;
    for (size_t i = 0; i < b.samples_per_channel(); ++i) {
        const int16_t v = static_cast<int16_t>(std::abs(b.sample(0, i)));
        if (v > best) {
            best = v;
            peak = i;
        }
    }
    CHECK(best > 0);
    // The peak lies inside the transmitted burst around the arrival time.
    const double cycles_span = pe.cycles / pe.f0 * cfg.sample_rate;
    CHECK(std::llabs(static_cast<long long>(peak) - static_cast<long long>(expected)) <=
          std::llround(cycles_span));
}

TEST_CASE("optoacoustic scenario drives only the illuminated channels") {
    const AfeConfig cfg = quiet_config();
    Scenario sc = default_oa_scenario();
    const SampleBlock b = generate(sc, cfg, 1024, 0);
    for (int ch = 0; ch < cfg.channels; ++ch) {
        int64_t energy = 0;
        for (size_t i = 0; i < b.samples_per_channel(); ++i)
            energy += std::abs(b.sample(ch, i));
        const bool active = ch >= 4 && ch <= 7;
        if (active) CHECK(energy > 0);
        else CHECK(energy == 0);
    }
}

TEST_CASE("gain scales the signal ahead of quantization") {
    AfeConfig lo = quiet_config();
    AfeConfig hi = quiet_config();
    hi.gain_db = 6.0206;  // one amplitude doubling
    Scenario sc;
    sc.shape = SweptSine{0.1, 5e6, 0.0};

    const SampleBlock a = generate(sc, lo, 2048, 0);
    const SampleBlock b = generate(sc, hi, 2048, 0);
    int16_t pa = 0, pb = 0;
    for (size_t i = 0; i < 2048; ++i) {
        pa = std::max(pa, static_cast<int16_t>(std::abs(a.sample(0, i))));
        pb = std::max(pb, static_cast<int16_t>(std::abs(b.sample(0, i))));
    }
    CHECK(pb == doctest::Approx(2.0 * pa).epsilon(0.01));
}

TEST_CASE("overdrive saturates instead of wrapping") {
    AfeConfig cfg = quiet_config();
    cfg.gain_db = 12.0;
    Scenario sc;
    sc.shape = SweptSine{0.9, 5e6, 0.0};
    Frontend fe(sc, cfg);
    const SampleBlock b = fe.next(4096);
    CHECK(fe.saturation_count() > 0);
    int peak = 0;
    for (const int16_t v : b.data) peak = std::max(peak, std::abs(static_cast<int>(v)));
    CHECK(peak == 32767);
}

TEST_CASE("passive termination raises the noise floor by a quarter") {
    AfeConfig on = quiet_config();
    on.noise_rms = 40.0;
    on.active_termination = true;
    AfeConfig off = on;
    off.active_termination = false;
    Scenario sc;  // dc zero

    auto rms = [&](const AfeConfig& cfg) {
        const SampleBlock b = generate(sc, cfg, 65536, 0);
        double acc = 0.0;
        for (size_t i = 0; i < b.samples_per_channel(); ++i) {
            const double v = b.sample(0, i);
            acc += v * v;
        }
        return std::sqrt(acc / static_cast<double>(b.samples_per_channel()));
    };
    CHECK(rms(off) / rms(on) == doctest::Approx(1.25).epsilon(0.03));
}

TEST_CASE("iq demodulation recovers the tone amplitude at the mix frequency") {
    AfeConfig cfg = quiet_config();
    Scenario sc;
    sc.shape = SweptSine{0.25, 5e6, 0.3};
    const SampleBlock raw = generate(sc, cfg, 8192, 0);
    const int decim = 8;
    const SampleBlock iq = iq_demodulate(raw, 5e6, decim);
    REQUIRE(iq.channels == 2 * raw.channels);
    REQUIRE(iq.samples_per_channel() == raw.samples_per_channel() / decim);
    CHECK(iq.sample_rate == doctest::Approx(cfg.sample_rate / decim));

    const double expect = 0.25 * 32767.0;
    const size_t n = iq.samples_per_channel();
    for (size_t i = n / 4; i < 3 * n / 4; ++i) {
        const double I = iq.sample(0, i);
        const double Q = iq.sample(1, i);
        CHECK(std::hypot(I, Q) == doctest::Approx(expect).epsilon(0.05));
    }
}

}  // TEST_SUITE
