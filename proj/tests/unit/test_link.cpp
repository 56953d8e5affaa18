#include <cstdio>
#include <filesystem>
#include <random>

#include <doctest.h>

#include "rfdaq/jesd/lane_capture.hpp"
#include "rfdaq/jesd/link.hpp"

using namespace rfdaq;
using namespace rfdaq::jesd;

namespace {

SampleBlock random_block(int channels, size_t spc, uint32_t seed, double rate = 80e6) {
    std::mt19937 rng(seed);
    SampleBlock b(channels, spc, 0, rate);
    for (auto& s : b.data) s = static_cast<int16_t>(rng());
    return b;
}

}  // namespace

TEST_SUITE("link") {

TEST_CASE("round trip is bit-exact with scrambling on and off") {
    for (const bool scrambled : {true, false}) {
        const LinkParams p = make_link_params(2, 16, 32, scrambled);
        const SampleBlock tx = random_block(p.channels(), 3072, scrambled ? 11u : 12u);
        const RxResult rx = rx_link(tx_link(tx, p, 0), p);
        REQUIRE(rx.status.ok());
        CHECK(rx.status.cgs_locked);
        CHECK(rx.status.ila_valid);
        CHECK(rx.samples.channels == tx.channels);
        CHECK(rx.samples.data == tx.data);
    }
}

TEST_CASE("stream length does not have to fill whole multiframes") {
    const LinkParams p = make_link_params(2, 16, 32, true);
    const SampleBlock tx = random_block(p.channels(), 1000, 3);
    const RxResult rx = rx_link(tx_link(tx, p, 0), p);
    REQUIRE(rx.status.ok());
    CHECK(rx.samples.data == tx.data);
}

TEST_CASE("latency and payload are invariant under lane skew") {
    const LinkParams p = make_link_params(4, 16, 32, true);
    const SampleBlock tx = random_block(p.channels(), 2048, 17);
    const auto lanes = tx_link(tx, p, 0);

    const RxResult ref = rx_link(lanes, p);
    REQUIRE(ref.status.ok());
    CHECK(ref.status.latency_octets == p.release_slot());

    std::mt19937 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<LaneStream> skewed;
        std::vector<int> skews;
        for (const auto& lane : lanes) {
            const int skew = static_cast<int>(rng() % (p.elastic_depth_octets / 2));
            skews.push_back(skew);
            skewed.push_back(delayed(lane, skew));
        }
        const RxResult rx = rx_link(skewed, p);
        REQUIRE(rx.status.ok());
        CHECK(rx.samples.data == ref.samples.data);
        CHECK(rx.status.latency_octets == ref.status.latency_octets);
        CHECK(rx.status.lane_skew_octets == skews);
    }
}

TEST_CASE("skew beyond the elastic depth is a hard failure") {
    const LinkParams p = make_link_params(2, 16, 32, true);
    const SampleBlock tx = random_block(p.channels(), 512, 4);
    auto lanes = tx_link(tx, p, 0);
    lanes[1] = delayed(lanes[1], p.elastic_depth_octets + p.multiframe_octets());
    const RxResult rx = rx_link(lanes, p);
    CHECK_FALSE(rx.status.ok());
}

TEST_CASE("lane configuration mismatch is reported") {
    LinkParams tx_p = make_link_params(2, 16, 32, true);
    tx_p.device_id = 3;
    LinkParams rx_p = tx_p;
    rx_p.device_id = 4;
    const SampleBlock tx = random_block(tx_p.channels(), 256, 8);
    const RxResult rx = rx_link(tx_link(tx, tx_p, 0), rx_p);
    CHECK_FALSE(rx.status.ok());
    CHECK_FALSE(rx.status.errors.empty());
}

TEST_CASE("sysref phase must land on a multiframe boundary") {
    const LinkParams p = make_link_params(2, 16, 32, true);
    SampleBlock tx = random_block(p.channels(), 64, 5);
    tx.start_index = 30;
    CHECK_THROWS_AS(static_cast<void>(tx_link(tx, p, 30)), StageError);
    tx.start_index = 32;
    CHECK_NOTHROW(static_cast<void>(tx_link(tx, p, 32)));
}

TEST_CASE("lane captures round trip through the file format") {
    const LinkParams p = make_link_params(2, 16, 32, true);
    const SampleBlock tx = random_block(p.channels(), 640, 31);
    LaneCapture cap{p, tx_link(tx, p, 0)};

    const auto path =
        (std::filesystem::temp_directory_path() / "rfdaq_lane_capture_test.lane").string();
    save_lane_capture(path, cap);
    const LaneCapture loaded = load_lane_capture(path);
    std::filesystem::remove(path);

    REQUIRE(loaded.lanes.size() == cap.lanes.size());
    for (size_t l = 0; l < cap.lanes.size(); ++l) {
        CHECK(loaded.lanes[l].symbols == cap.lanes[l].symbols);
        CHECK(loaded.lanes[l].is_control == cap.lanes[l].is_control);
    }
    const RxResult rx = rx_link(loaded.lanes, loaded.params);
    REQUIRE(rx.status.ok());
    CHECK(rx.samples.data == tx.data);
}

}  // TEST_SUITE
