#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfdaq/rdma/channel.hpp"
#include "rfdaq/rdma/wire.hpp"

namespace rfdaq::rdma {

enum class QpKind : uint8_t { unreliable_datagram, reliable_connection };
enum class QpState : uint8_t { reset, init, ready, error };

struct MemoryRegion {
    uint64_t base = 0;    // abstract remote address
    uint64_t length = 0;  // bytes
    uint32_t rkey = 0;
};

struct WorkRequest {
    uint64_t wr_id = 0;
    Opcode opcode = Opcode::write;  // write or send
    std::vector<uint8_t> payload;
    uint64_t remote_offset = 0;  // write: offset into the peer's region
    uint32_t rkey = 0;           // write: peer region key
};

struct Completion {
    enum class Status : uint8_t { success, remote_access_error, retry_exceeded };
    uint64_t wr_id = 0;
    Status status = Status::success;
};

/// One reliable connection's protocol state.
struct QueuePair {
    uint16_t qp_id = 0;
    QpKind kind = QpKind::reliable_connection;
    QpState state = QpState::reset;
    uint32_t send_psn = 0;      // next PSN to assign
    uint32_t expected_psn = 0;  // next PSN the receiver accepts
};

struct EndpointStats {
    uint64_t data_sent = 0;
    uint64_t data_retransmitted = 0;
    uint64_t acks_sent = 0;
    uint64_t naks_sent = 0;
    uint64_t duplicates_dropped = 0;
    uint64_t cm_retries = 0;
    uint64_t timeouts = 0;
};

struct EndpointConfig {
    size_t mtu = 4096;
    uint32_t window_segments = 256;  // in-flight cap
    size_t sq_capacity = 1024;       // posted, not yet completed
    int max_retries = 7;             // timeout budget per work request
    double rto = 0.0;                // 0: derive 3x RTT from the model
    double cm_retry_interval = 0.0;  // 0: derive from rto
};

/// One side of the emulated RDMA NIC. The engine is single-threaded: all
/// protocol work happens inside step(now), which consumes deliverable
/// datagrams, applies writes, emits segments within the window, and runs the
/// retransmission timer. Reliability is go-back-N with cumulative ACKs and
/// NAK-triggered fast retransmit; duplicate PSNs are dropped on receive, so
/// payloads apply exactly once.
class Endpoint {
public:
    using Config = EndpointConfig;

    Endpoint(std::string name, Channel& channel, int port, const ChannelModel& model,
             Config cfg = {});

    /// Expose a local buffer for remote writes. The region's abstract base
    /// address and fresh rkey identify it on the wire.
    MemoryRegion register_memory(std::span<uint8_t> buffer);
    void deregister_memory(uint32_t rkey);

    /// Responder role: accept a connection request and answer it; once the
    /// RC pair is up, send the given region to the peer in a SEND.
    void listen(const MemoryRegion& advertised);

    /// Initiator role: start the CM handshake (request retried on a timer).
    void connect(double now);
    bool connected() const { return qp_.state == QpState::ready; }

    /// The peer's memory region, once its SEND arrived (initiator side).
    const std::optional<MemoryRegion>& peer_region() const { return peer_region_; }

    /// Queue work requests in order. Returns how many were accepted before
    /// the send queue filled (backpressure, never an error).
    size_t post_batch(std::span<const WorkRequest> wrs);

    /// Drain completions accumulated so far, in posting order.
    std::vector<Completion> poll_cq();

    /// Messages received on the RC QP via SEND, in order.
    std::vector<std::vector<uint8_t>> drain_messages();

    void step(double now);
    /// Earliest pending timer deadline (retransmit or CM retry), or +inf.
    double next_timer() const;

    const QueuePair& qp() const { return qp_; }
    const EndpointStats& stats() const { return stats_; }
    const std::string& name() const { return name_; }
    size_t sq_depth() const { return pending_.size(); }

private:
    struct Segment {
        uint32_t psn = 0;
        Packet packet;
        uint64_t wr_slot = 0;  // absolute slot: pending_[wr_slot - completion_base_]
    };

    struct PendingWr {
        WorkRequest wr;
        uint32_t first_psn = 0;
        uint32_t last_psn = 0;
        bool segmented = false;
        int retries = 0;
    };

    void handle_packet(Packet&& p, double now);
    void handle_data(const Packet& p, double now);
    void handle_ack(uint32_t psn);
    void handle_nak(const Packet& p, double now);
    void segment_ready_wrs();
    void transmit_window(double now);
    void retransmit_from(uint32_t psn, double now, bool count_retry);
    void fail_all(Completion::Status status);
    void send_packet(Packet p, double now);
    void send_cm_request(double now);

    std::string name_;
    Channel& channel_;
    int port_;
    ChannelModel model_;
    Config cfg_;

    QueuePair qp_;
    uint16_t peer_qp_id_ = 0;
    uint32_t initial_psn_ = 0;
    double rto_ = 0.0;
    double cm_interval_ = 0.0;
    double last_now_ = 0.0;

    // Initiator handshake state.
    bool initiating_ = false;
    double cm_deadline_ = 0.0;
    int cm_attempts_ = 0;

    // Responder state.
    bool listening_ = false;
    std::optional<MemoryRegion> advertised_;

    // TX reliability state.
    std::deque<PendingWr> pending_;  // completion_base_ + i = slot of pending_[i]
    uint64_t completion_base_ = 0;
    std::deque<Segment> unsent_;
    std::deque<Segment> inflight_;
    uint32_t snd_una_ = 0;  // oldest unacknowledged PSN
    double retx_deadline_ = 0.0;
    uint32_t last_fast_retx_psn_ = UINT32_MAX;
    double last_fast_retx_time_ = -1.0;

    // RX state.
    struct Registration {
        uint8_t* ptr = nullptr;
        uint64_t length = 0;
        uint64_t base = 0;
    };
    std::map<uint32_t, Registration> regions_;  // by rkey; views into caller-owned memory
    std::optional<MemoryRegion> peer_region_;
    std::vector<std::vector<uint8_t>> messages_;
    std::vector<uint8_t> rx_message_;     // SEND reassembly
    uint32_t last_nak_psn_ = UINT32_MAX;  // gap already reported

    std::vector<Completion> cq_;
    EndpointStats stats_;
    uint64_t next_va_ = 0x10000000;
    uint32_t next_rkey_ = 0x5EED0001;
};

/// Drive both endpoints until the initiator holds a ready QP and the peer's
/// region, or until t_limit. Returns the virtual completion time.
double cm_handshake(Endpoint& initiator, Endpoint& responder, Channel& channel, double start,
                    double t_limit);

}  // namespace rfdaq::rdma
