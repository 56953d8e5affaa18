#include <thread>
#include <vector>

#include <benchmark/benchmark.h>

#include "rfdaq/acq/ring_buffer.hpp"

using namespace rfdaq;

static void BM_RingWriteRead(benchmark::State& state) {
    acq::RingBuffer ring;  // 4 MiB of 256 KiB blocks
    const std::vector<uint8_t> block(ring.block_size(), 0x5A);
    uint64_t idx = 0;
    for (auto _ : state) {
        idx = ring.write_blocking(block);
        benchmark::DoNotOptimize(ring.read(idx));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * ring.block_size()));
}
BENCHMARK(BM_RingWriteRead);

// Producer and consumer on their own threads, 64 blocks per iteration; the
// 16-slot ring forces the handoff machinery into play.
static void BM_RingThreaded(benchmark::State& state) {
    constexpr int kBlocks = 64;
    for (auto _ : state) {
        acq::RingBuffer ring;
        const std::vector<uint8_t> block(ring.block_size(), 0xA5);
        std::thread producer([&] {
            for (int i = 0; i < kBlocks; ++i) ring.write_blocking(block);
        });
        uint64_t sum = 0;
        for (int i = 0; i < kBlocks; ++i) {
            while (ring.blocks_written() <= static_cast<uint64_t>(i)) std::this_thread::yield();
            sum += ring.read(static_cast<uint64_t>(i)).size();
        }
        producer.join();
        benchmark::DoNotOptimize(sum);
    }
    state.SetBytesProcessed(
        static_cast<int64_t>(state.iterations() * kBlocks * (size_t{256} << 10)));
}
BENCHMARK(BM_RingThreaded)->Unit(benchmark::kMicrosecond);
