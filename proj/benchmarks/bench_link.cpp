#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "rfdaq/jesd/codec8b10b.hpp"
#include "rfdaq/jesd/link.hpp"
#include "rfdaq/jesd/scrambler.hpp"

using namespace rfdaq;

namespace {

std::vector<uint8_t> random_octets(size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<uint8_t> v(n);
    for (auto& b : v) b = static_cast<uint8_t>(rng());
    return v;
}

}  // namespace

static void BM_Encode8b10b(benchmark::State& state) {
    const auto data = random_octets(64 * 1024, 1);
    jesd::CodecState st;
    for (auto _ : state)
        for (const uint8_t b : data) benchmark::DoNotOptimize(jesd::encode_8b10b(b, false, st));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * data.size()));
}
BENCHMARK(BM_Encode8b10b);

static void BM_Decode8b10b(benchmark::State& state) {
    const auto data = random_octets(64 * 1024, 2);
    std::vector<uint16_t> symbols;
    symbols.reserve(data.size());
    jesd::CodecState enc;
    for (const uint8_t b : data) symbols.push_back(jesd::encode_8b10b(b, false, enc));

    for (auto _ : state) {
        jesd::CodecState dec;  // disparity tracking restarts with the stream
        for (const uint16_t s : symbols) benchmark::DoNotOptimize(jesd::decode_8b10b(s, dec));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * data.size()));
}
BENCHMARK(BM_Decode8b10b);

static void BM_Scrambler(benchmark::State& state) {
    const auto data = random_octets(1 << 20, 3);
    std::vector<uint8_t> out(data.size());
    jesd::Scrambler scr;
    for (auto _ : state) {
        scr.process(data, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * data.size()));
}
BENCHMARK(BM_Scrambler);

// Full serialize/deserialize cycle of the two-lane link: CGS + ILA + 4096
// scrambled data frames each way.
static void BM_LinkRoundTrip(benchmark::State& state) {
    const jesd::LinkParams p = jesd::make_link_params(2, 16, 32, true, 80e6);
    std::mt19937_64 rng(4);
    SampleBlock src(p.channels(), 4096, 0, 80e6);
    for (auto& s : src.data) s = static_cast<int16_t>(rng());

    for (auto _ : state) {
        const auto lanes = jesd::tx_link(src, p, 0);
        const jesd::RxResult rx = jesd::rx_link(lanes, p);
        benchmark::DoNotOptimize(rx.samples.data.data());
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * src.data.size() * 2));
}
BENCHMARK(BM_LinkRoundTrip);
