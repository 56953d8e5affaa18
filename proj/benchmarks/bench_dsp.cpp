#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "rfdaq/analysis/filters.hpp"
#include "rfdaq/analysis/spectrum.hpp"
#include "rfdaq/analysis/sweep.hpp"
#include "rfdaq/common.hpp"

using namespace rfdaq;

namespace {

// Characterization-sized record: a 10 MHz tone in noise at 125 MSPS.
analysis::SweepRecord make_record(size_t n) {
    analysis::SweepRecord rec;
    rec.tone_frequency = 10e6;
    rec.sample_rate = 125e6;
    rec.samples.resize(n);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 40.0);
    for (size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rec.sample_rate;
        rec.samples[i] =
            saturate16(12000.0 * std::cos(2.0 * M_PI * rec.tone_frequency * t) + noise(rng));
    }
    return rec;
}

}  // namespace

static void BM_PowerSpectrum(benchmark::State& state) {
    const auto n = static_cast<size_t>(state.range(0));
    std::vector<double> x(n);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> d(0.0, 1.0);
    for (auto& v : x) v = d(rng);
    for (auto _ : state) benchmark::DoNotOptimize(analysis::power_spectrum_onesided(x));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * n));
}
BENCHMARK(BM_PowerSpectrum)->Arg(4096)->Arg(32768);

static void BM_SnrEstimate(benchmark::State& state) {
    const auto rec = make_record(32768);
    for (auto _ : state)
        benchmark::DoNotOptimize(analysis::snr_estimate(rec, rec.tone_frequency));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * rec.samples.size()));
}
BENCHMARK(BM_SnrEstimate);

// The receive-side conditioning applied to every captured ultrasound frame.
static void BM_BandpassBlock(benchmark::State& state) {
    SampleBlock frame(16, 3072, 0, 80e6);
    std::mt19937_64 rng(13);
    for (auto& s : frame.data) s = static_cast<int16_t>(rng());
    for (auto _ : state)
        benchmark::DoNotOptimize(analysis::bandpass_block(frame, 2e6, 8e6));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * frame.data.size()));
}
BENCHMARK(BM_BandpassBlock)->Unit(benchmark::kMillisecond);

static void BM_Envelope(benchmark::State& state) {
    const auto rec = make_record(3072);
    std::vector<double> x(rec.samples.begin(), rec.samples.end());
    for (auto _ : state) benchmark::DoNotOptimize(analysis::envelope(x));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * x.size()));
}
BENCHMARK(BM_Envelope);
