#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <vector>

namespace rfdaq::rdma {

/// Fault and rate model of the datagram path between two endpoints.
struct ChannelModel {
    size_t mtu = 4096;  // payload bytes per segment
    double loss_probability = 0.0;
    double duplicate_probability = 0.0;
    double one_way_delay = 2e-6;     // seconds
    double bandwidth_bps = 100e9;    // serialization rate; 0 = infinite
    bool reorder = false;            // adds delivery jitter so packets overtake
    uint64_t seed = 1;

    /// Upper bound of the reorder jitter; part of the worst-case RTT.
    double max_jitter() const { return reorder ? 4.0 * one_way_delay + 1e-6 : 0.0; }

    void validate() const;
};

/// Bidirectional datagram transport between two ports (0 and 1). Time is
/// explicit: sends are stamped with the sender's clock and receives return
/// only datagrams whose delivery time has passed.
class Channel {
public:
    virtual ~Channel() = default;
    virtual void send(int from_port, std::vector<uint8_t> datagram, double now) = 0;
    virtual std::optional<std::vector<uint8_t>> receive(int port, double now) = 0;
    /// Earliest pending delivery time, or +inf when nothing is in flight.
    virtual double next_event_time() const = 0;
};

/// Deterministic in-process channel: seeded loss, duplication and reorder
/// jitter, store-and-forward serialization at bandwidth_bps per direction.
class SimChannel : public Channel {
public:
    explicit SimChannel(ChannelModel model);

    void send(int from_port, std::vector<uint8_t> datagram, double now) override;
    std::optional<std::vector<uint8_t>> receive(int port, double now) override;
    double next_event_time() const override;

    void set_loss(double p) { model_.loss_probability = p; }
    const ChannelModel& model() const { return model_; }
    uint64_t dropped() const { return dropped_; }
    uint64_t duplicated() const { return duplicated_; }

private:
    struct InFlight {
        double deliver_at;
        uint64_t seq;  // tie-break so equal times stay FIFO
        std::vector<uint8_t> data;
    };

    void enqueue(int to_port, const std::vector<uint8_t>& datagram, double ready);

    ChannelModel model_;
    std::mt19937_64 rng_;
    std::deque<InFlight> queue_[2];  // indexed by destination port
    double busy_until_[2] = {0.0, 0.0};  // per direction (indexed by source)
    uint64_t seq_ = 0;
    uint64_t dropped_ = 0;
    uint64_t duplicated_ = 0;
};

}  // namespace rfdaq::rdma
