#include <algorithm>
#include <array>
#include <random>

#include <doctest.h>

#include "rfdaq/rdma/endpoint.hpp"
#include "rfdaq/rdma/simulation.hpp"
#include "rfdaq/rdma/wire.hpp"

using namespace rfdaq;
using namespace rfdaq::rdma;

namespace {

// One connected initiator/responder pair over a shared channel; the responder
// exposes `sink` for remote writes.
struct Rig {
    SimChannel channel;
    Endpoint initiator;
    Endpoint responder;
    std::vector<uint8_t> sink;
    MemoryRegion mr;
    double t = 0.0;

    Rig(const ChannelModel& m, size_t sink_bytes, EndpointConfig cfg = {})
        : channel(m),
          initiator("fe", channel, 0, m, cfg),
          responder("host", channel, 1, m, cfg),
          sink(sink_bytes, 0) {
        mr = responder.register_memory(sink);
        responder.listen(mr);
        t = cm_handshake(initiator, responder, channel, 0.0, 1.0);
    }

    std::array<Endpoint*, 2> eps() { return {&initiator, &responder}; }

    // Drives the pair until `target` completions, recording them in order.
    std::vector<Completion> run_to(uint64_t target, double t_limit = 10.0) {
        std::vector<Completion> got;
        auto done = [&] {
            for (const Completion& c : initiator.poll_cq()) got.push_back(c);
            return got.size() >= target;
        };
        const auto arr = eps();
        const RunResult rr = run_until(channel, arr, t, t + t_limit, done);
        REQUIRE(rr.completed);
        t = rr.time;
        return got;
    }
};

WorkRequest make_write(uint64_t id, std::vector<uint8_t> payload, uint64_t offset,
                       uint32_t rkey) {
    WorkRequest wr;
    wr.wr_id = id;
    wr.opcode = Opcode::write;
    wr.payload = std::move(payload);
    wr.remote_offset = offset;
    wr.rkey = rkey;
    return wr;
}

// Posts `count` writes of random size at cumulative offsets and returns the
// expected sink image.
std::vector<uint8_t> post_random_writes(Rig& rig, int count, size_t max_len, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> len_dist(1, max_len);
    std::vector<uint8_t> expect(rig.sink.size(), 0);
    uint64_t offset = 0;
    std::vector<WorkRequest> wrs;
    for (int i = 0; i < count; ++i) {
        std::vector<uint8_t> payload(len_dist(rng));
        for (auto& b : payload) b = static_cast<uint8_t>(rng());
        REQUIRE(offset + payload.size() <= expect.size());
        std::copy(payload.begin(), payload.end(), expect.begin() + static_cast<long>(offset));
        wrs.push_back(make_write(static_cast<uint64_t>(i), std::move(payload), offset,
                                 rig.mr.rkey));
        offset += wrs.back().payload.size();
    }
    REQUIRE(rig.initiator.post_batch(wrs) == wrs.size());
    return expect;
}

void check_in_order_success(const std::vector<Completion>& cs) {
    for (size_t i = 0; i < cs.size(); ++i) {
        CHECK(cs[i].status == Completion::Status::success);
        CHECK(cs[i].wr_id == i);
    }
}

}  // namespace

TEST_SUITE("rdma") {

TEST_CASE("packet header survives the wire") {
    Packet p;
    p.header.opcode = Opcode::write;
    p.header.flags = flag::last_segment;
    p.header.qp_id = 0xBEEF;
    p.header.psn = 0xFFFFFF;             // full 24 bits
    p.header.rkey = 0xDEADC0DE;
    p.header.remote_addr = 0xFFFFFFFFFFFFull;  // full 48 bits
    p.payload = {1, 2, 3, 4, 5};
    p.header.length = static_cast<uint32_t>(p.payload.size());

    const std::vector<uint8_t> wire = encode_packet(p);
    CHECK(wire.size() == kHeaderSize + p.payload.size());
    const Packet q = decode_packet(wire);
    CHECK(q.header.opcode == p.header.opcode);
    CHECK(q.header.flags == p.header.flags);
    CHECK(q.header.qp_id == p.header.qp_id);
    CHECK(q.header.psn == p.header.psn);
    CHECK(q.header.rkey == p.header.rkey);
    CHECK(q.header.remote_addr == p.header.remote_addr);
    CHECK(q.header.length == p.header.length);
    CHECK(q.payload == p.payload);

    CHECK_THROWS_AS(decode_packet(std::vector<uint8_t>(kHeaderSize - 1)), StageError);
}

TEST_CASE("psn arithmetic wraps at 24 bits") {
    CHECK(psn_add(0xFFFFFF, 1) == 0);
    CHECK(psn_less(0xFFFFFF, 0));      // wraparound keeps ordering
    CHECK(psn_less(0xFFFFF0, 0x00000F));
    CHECK(!psn_less(0, 0xFFFFFF));
    CHECK(!psn_less(5, 5));
}

TEST_CASE("writes land bit-exactly and complete in posting order") {
    ChannelModel m;  // clean path
    Rig rig(m, 1 << 20);
    const auto expect = post_random_writes(rig, 64, 12000, 101);
    const auto cs = rig.run_to(64);
    REQUIRE(cs.size() == 64);
    check_in_order_success(cs);
    CHECK(rig.sink == expect);
    CHECK(rig.initiator.stats().data_retransmitted == 0);
    CHECK(rig.initiator.stats().timeouts == 0);
    CHECK(rig.responder.stats().naks_sent == 0);
}

TEST_CASE("sends are delivered in order and exactly once under duplication") {
    ChannelModel m;
    m.duplicate_probability = 0.25;
    m.seed = 3;
    Rig rig(m, 4096);

    std::mt19937_64 rng(5);
    std::vector<std::vector<uint8_t>> msgs;
    std::vector<WorkRequest> wrs;
    for (int i = 0; i < 20; ++i) {
        std::vector<uint8_t> body(1 + (rng() % 9000));  // some need segmentation
        for (auto& b : body) b = static_cast<uint8_t>(rng());
        WorkRequest wr;
        wr.wr_id = static_cast<uint64_t>(i);
        wr.opcode = Opcode::send;
        wr.payload = body;
        wrs.push_back(wr);
        msgs.push_back(std::move(body));
    }
    REQUIRE(rig.initiator.post_batch(wrs) == wrs.size());
    const auto cs = rig.run_to(20);
    check_in_order_success(cs);

    const auto got = rig.responder.drain_messages();
    REQUIRE(got.size() == msgs.size());  // duplicates must not re-deliver
    CHECK(got == msgs);
    CHECK(rig.responder.stats().duplicates_dropped > 0);
}

TEST_CASE("heavy loss is repaired by retransmission") {
    ChannelModel m;  // handshake over a clean path
    m.seed = 17;
    EndpointConfig cfg;
    cfg.window_segments = 32;
    Rig rig(m, 1 << 20, cfg);
    rig.channel.set_loss(0.3);  // then the cable degrades
    const auto expect = post_random_writes(rig, 32, 8192, 23);
    const auto cs = rig.run_to(32, 60.0);
    check_in_order_success(cs);
    CHECK(rig.sink == expect);
    CHECK(rig.initiator.stats().data_retransmitted > 0);
}

TEST_CASE("loss with reordering and duplication stays exactly-once and in order") {
    ChannelModel m;
    m.loss_probability = 0.01;
    m.duplicate_probability = 0.02;
    m.reorder = true;
    m.seed = 29;
    EndpointConfig cfg;
    cfg.window_segments = 32;

    auto run_once = [&] {
        Rig rig(m, 1 << 20, cfg);
        const auto expect = post_random_writes(rig, 100, 12000, 31);
        const auto cs = rig.run_to(100, 60.0);
        check_in_order_success(cs);
        CHECK(rig.sink == expect);
        struct Result {
            std::vector<uint8_t> sink;
            EndpointStats tx;
            double t;
        };
        return Result{rig.sink, rig.initiator.stats(), rig.t};
    };

    const auto a = run_once();
    const auto b = run_once();  // same seeds: bit-identical evolution
    CHECK(a.sink == b.sink);
    CHECK(a.t == b.t);
    CHECK(a.tx.data_sent == b.tx.data_sent);
    CHECK(a.tx.data_retransmitted == b.tx.data_retransmitted);
    CHECK(a.tx.timeouts == b.tx.timeouts);
}

TEST_CASE("out-of-bounds writes fail without touching memory") {
    ChannelModel m;
    Rig rig(m, 8192);
    std::vector<uint8_t> payload(2048, 0xEE);
    const auto wr = make_write(0, payload, 7000, rig.mr.rkey);  // crosses the end
    REQUIRE(rig.initiator.post_batch(std::array{wr}) == 1);
    const auto cs = rig.run_to(1);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].status == Completion::Status::remote_access_error);
    CHECK(std::all_of(rig.sink.begin(), rig.sink.end(), [](uint8_t v) { return v == 0; }));
    CHECK(rig.responder.stats().naks_sent > 0);
}

TEST_CASE("a stale rkey is refused") {
    ChannelModel m;
    Rig rig(m, 8192);
    rig.responder.deregister_memory(rig.mr.rkey);
    const auto wr = make_write(0, std::vector<uint8_t>(256, 1), 0, rig.mr.rkey);
    REQUIRE(rig.initiator.post_batch(std::array{wr}) == 1);
    const auto cs = rig.run_to(1);
    CHECK(cs[0].status == Completion::Status::remote_access_error);
}

TEST_CASE("an unreachable peer exhausts the retry budget") {
    ChannelModel m;
    Rig rig(m, 8192);          // handshake over a clean path
    rig.channel.set_loss(1.0);  // then the cable is cut
    const auto wr = make_write(0, std::vector<uint8_t>(1024, 7), 0, rig.mr.rkey);
    REQUIRE(rig.initiator.post_batch(std::array{wr}) == 1);
    const auto cs = rig.run_to(1, 60.0);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].status == Completion::Status::retry_exceeded);
    CHECK(rig.initiator.stats().timeouts >= 7);
}

TEST_CASE("the send queue applies backpressure instead of failing") {
    ChannelModel m;
    EndpointConfig cfg;
    cfg.sq_capacity = 4;
    Rig rig(m, 1 << 20, cfg);

    std::vector<WorkRequest> wrs;
    for (int i = 0; i < 8; ++i)
        wrs.push_back(make_write(static_cast<uint64_t>(i), std::vector<uint8_t>(512, 0x11),
                                 static_cast<uint64_t>(i) * 512, rig.mr.rkey));
    const size_t accepted = rig.initiator.post_batch(wrs);
    CHECK(accepted == 4);
    const auto cs = rig.run_to(4);
    check_in_order_success(cs);
    CHECK(rig.initiator.sq_depth() == 0);
}

}  // TEST_SUITE
