#include <doctest.h>

#include "rfdaq/acq/leaky_bucket.hpp"

using namespace rfdaq;
using namespace rfdaq::acq;

namespace {

constexpr uint64_t kBlockBytes = 256 * 1024;            // 512 samples per block
constexpr double kBlockBits = 8.0 * kBlockBytes;

// Read-start latency that makes `samples` the exact sustainable maximum.
double solve_tau(const LeakyBucketModel& m, uint64_t samples) {
    const double l_bits = static_cast<double>(samples) * m.row_bits();
    return (m.capacity_bits - l_bits * (m.r_in - m.r_out) / m.r_in) / m.r_out;
}

}  // namespace

TEST_SUITE("bucket") {

TEST_CASE("documented operating points") {
    LeakyBucketModel m;  // 256ch x 16bit @ 80 MSPS into 4 MiB, 95.6 Gb/s out
    REQUIRE(m.row_bits() == 4096.0);

    SUBCASE("immediate read start") {
        const FrameCapacity fc = max_frame_length(m);
        REQUIRE(fc.kind == FrameCapacity::Kind::bounded);
        CHECK(fc.samples_per_channel == 11566);
        CHECK(max_fps(m, fc.samples_per_channel) == doctest::Approx(2017.970236).epsilon(1e-6));
    }

    SUBCASE("read start solved for a 5639-sample frame") {
        m.tau_s = solve_tau(m, 5639);
        CHECK(m.tau_s == doctest::Approx(179.8713e-6).epsilon(1e-4));
        CHECK(max_frame_length(m).samples_per_channel == 5639);
        CHECK(max_fps(m, 5639) == doctest::Approx(4139.004034).epsilon(1e-6));
    }

    SUBCASE("decimal 4 MB buffer reaches the same frame length") {
        m.capacity_bits = 32e6;
        m.tau_s = solve_tau(m, 5639);
        CHECK(m.tau_s == doctest::Approx(163.6115e-6).epsilon(1e-4));
        CHECK(max_frame_length(m).samples_per_channel == 5639);
    }

    SUBCASE("short frames repeat faster") {
        CHECK(max_fps(m, 2000) == doctest::Approx(11669.921875).epsilon(1e-6));
    }
}

TEST_CASE("capacity kinds") {
    LeakyBucketModel m;

    SUBCASE("drain at or above fill never bounds the frame") {
        m.r_out = m.r_in;
        CHECK(max_frame_length(m).kind == FrameCapacity::Kind::unbounded);
        m.r_out = 2.0 * m.r_in;
        CHECK(max_frame_length(m).kind == FrameCapacity::Kind::unbounded);
    }

    SUBCASE("latency that eats the buffer is infeasible") {
        m.tau_s = m.capacity_bits / m.r_out;  // R_out*tau == B
        const FrameCapacity fc = max_frame_length(m);
        CHECK(fc.kind == FrameCapacity::Kind::infeasible);
        CHECK(!fc.diagnostic.empty());
        CHECK_THROWS_AS(max_fps(m, 1), StageError);
    }

    SUBCASE("oversized frames are refused, not clamped") {
        const uint64_t cap = max_frame_length(m).samples_per_channel;
        CHECK_THROWS_AS(max_fps(m, cap + 1), StageError);
        CHECK_THROWS_AS(max_fps(m, 0), StageError);
    }
}

TEST_CASE("parameter validation") {
    LeakyBucketModel m;
    m.r_in = 0.0;
    CHECK_THROWS_AS(max_frame_length(m), StageError);
    m = LeakyBucketModel{};
    m.tau_s = -1e-6;
    CHECK_THROWS_AS(max_frame_length(m), StageError);
    m = LeakyBucketModel{};
    m.channels = 0;
    CHECK_THROWS_AS(max_frame_length(m), StageError);
}

TEST_CASE("occupancy simulation agrees with the closed form") {
    // With the read start at least one block-fill time out, whole blocks are
    // always ready when the drain wants them, so the discrete model and the
    // closed form meet exactly at the capacity boundary.
    LeakyBucketModel m;
    m.tau_s = solve_tau(m, 5639);
    REQUIRE(m.tau_s > kBlockBits / m.r_in);

    const OccupancyResult ok = simulate_occupancy(m, 5639, kBlockBytes);
    CHECK(!ok.overflow);
    CHECK(ok.peak_bits <= m.capacity_bits * (1.0 + 1e-9));
    CHECK(ok.frames_completed >= 1);

    const OccupancyResult over = simulate_occupancy(m, 5639 + 1024, kBlockBytes);
    CHECK(over.overflow);
    CHECK(over.peak_bits > m.capacity_bits);
}

TEST_CASE("immediate read start costs at most one block of headroom") {
    LeakyBucketModel m;  // tau = 0: the drain waits for the first full block
    const uint64_t cap = max_frame_length(m).samples_per_channel;

    const OccupancyResult under = simulate_occupancy(m, cap - 512, kBlockBytes);
    CHECK(!under.overflow);
    const OccupancyResult over = simulate_occupancy(m, cap + 1024, kBlockBytes);
    CHECK(over.overflow);
}

TEST_CASE("an unbounded link never overflows at frame cadence") {
    LeakyBucketModel m;
    m.r_out = m.r_in;  // drain keeps pace with fill
    const OccupancyResult res = simulate_occupancy(m, 4096, kBlockBytes, 1e-3);
    CHECK(!res.overflow);
    CHECK(res.frames_completed >= 1);
}

}  // TEST_SUITE
