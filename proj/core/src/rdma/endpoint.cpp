#include "rfdaq/rdma/endpoint.hpp"

#include <algorithm>
#include <cmath>

namespace rfdaq::rdma {

namespace {

constexpr uint64_t kInternalWr = UINT64_MAX;  // responder's region-advertising SEND

std::vector<uint8_t> encode_region(const MemoryRegion& mr) {
    std::vector<uint8_t> out(20);
    for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(mr.base >> (56 - 8 * i));
    for (int i = 0; i < 8; ++i) out[8 + i] = static_cast<uint8_t>(mr.length >> (56 - 8 * i));
    for (int i = 0; i < 4; ++i) out[16 + i] = static_cast<uint8_t>(mr.rkey >> (24 - 8 * i));
    return out;
}

MemoryRegion decode_region(const std::vector<uint8_t>& in) {
    if (in.size() != 20) throw StageError(Stage::transport, "malformed region advertisement");
    MemoryRegion mr;
    for (int i = 0; i < 8; ++i) mr.base = mr.base << 8 | in[i];
    for (int i = 0; i < 8; ++i) mr.length = mr.length << 8 | in[8 + i];
    for (int i = 0; i < 4; ++i) mr.rkey = mr.rkey << 8 | in[16 + i];
    return mr;
}

}  // namespace

Endpoint::Endpoint(std::string name, Channel& channel, int port, const ChannelModel& model,
                   Config cfg)
    : name_(std::move(name)), channel_(channel), port_(port), model_(model), cfg_(cfg) {
    model_.validate();
    if (cfg_.mtu == 0) cfg_.mtu = model_.mtu;
    const double ser = model_.bandwidth_bps > 0.0
                           ? static_cast<double>(cfg_.mtu + kHeaderSize) * 8.0 / model_.bandwidth_bps
                           : 0.0;
    const double rtt = 2.0 * (model_.one_way_delay + model_.max_jitter() + ser);
    rto_ = cfg_.rto > 0.0 ? cfg_.rto : std::max(3.0 * rtt, 10e-6);
    cm_interval_ = cfg_.cm_retry_interval > 0.0 ? cfg_.cm_retry_interval
                                                : std::max(4.0 * rtt, 50e-6);
    retx_deadline_ = INFINITY;
    qp_.qp_id = static_cast<uint16_t>(0x1000 + port_);
    initial_psn_ = static_cast<uint32_t>(0x100 + 0x40 * port_);
    qp_.send_psn = initial_psn_;
}

MemoryRegion Endpoint::register_memory(std::span<uint8_t> buffer) {
    if (buffer.empty()) throw StageError(Stage::transport, "cannot register an empty buffer");
    MemoryRegion mr;
    mr.base = next_va_;
    mr.length = buffer.size();
    mr.rkey = next_rkey_++;
    next_va_ += (buffer.size() + 0xFFF) & ~uint64_t{0xFFF};
    regions_[mr.rkey] = Registration{buffer.data(), buffer.size(), mr.base};
    return mr;
}

void Endpoint::deregister_memory(uint32_t rkey) { regions_.erase(rkey); }

void Endpoint::listen(const MemoryRegion& advertised) {
    listening_ = true;
    advertised_ = advertised;
    qp_.state = QpState::init;
}

void Endpoint::connect(double now) {
    initiating_ = true;
    qp_.state = QpState::init;
    cm_attempts_ = 1;
    cm_deadline_ = now + cm_interval_;
    send_cm_request(now);
}

void Endpoint::send_cm_request(double now) {
    Packet p;
    p.header.opcode = Opcode::cm_connect_request;
    p.header.qp_id = qp_.qp_id;  // source: the QP the peer should talk to
    p.header.psn = qp_.send_psn;
    send_packet(std::move(p), now);
}

size_t Endpoint::post_batch(std::span<const WorkRequest> wrs) {
    if (qp_.state != QpState::ready)
        throw StageError(Stage::transport, name_ + ": queue pair not ready");
    size_t accepted = 0;
    for (const WorkRequest& wr : wrs) {
        if (pending_.size() >= cfg_.sq_capacity) break;  // backpressure
        if (wr.payload.empty())
            throw StageError(Stage::transport, "work request with empty payload");
        PendingWr pw;
        pw.wr = wr;
        pending_.push_back(std::move(pw));
        ++accepted;
    }
    segment_ready_wrs();
    return accepted;
}

void Endpoint::segment_ready_wrs() {
    for (size_t i = 0; i < pending_.size(); ++i) {
        PendingWr& pw = pending_[i];
        if (pw.segmented) continue;
        pw.segmented = true;
        pw.first_psn = qp_.send_psn;
        const uint64_t slot = completion_base_ + i;
        const std::vector<uint8_t>& data = pw.wr.payload;
        const uint64_t remote_base =
            pw.wr.opcode == Opcode::write && peer_region_ ? peer_region_->base : 0;
        for (size_t off = 0; off < data.size(); off += cfg_.mtu) {
            const size_t len = std::min(cfg_.mtu, data.size() - off);
            Segment seg;
            seg.psn = qp_.send_psn;
            seg.wr_slot = slot;
            seg.packet.header.opcode = pw.wr.opcode;
            seg.packet.header.qp_id = peer_qp_id_;
            seg.packet.header.psn = seg.psn;
            seg.packet.header.rkey = pw.wr.rkey;
            seg.packet.header.remote_addr = remote_base + pw.wr.remote_offset + off;
            seg.packet.header.length = static_cast<uint32_t>(len);
            if (off + len == data.size()) seg.packet.header.flags |= flag::last_segment;
            seg.packet.payload.assign(data.begin() + static_cast<ptrdiff_t>(off),
                                      data.begin() + static_cast<ptrdiff_t>(off + len));
            qp_.send_psn = psn_add(qp_.send_psn, 1);
            unsent_.push_back(std::move(seg));
        }
        pw.last_psn = psn_add(qp_.send_psn, kPsnMask);  // send_psn - 1
    }
}

void Endpoint::transmit_window(double now) {
    while (!unsent_.empty() && inflight_.size() < cfg_.window_segments) {
        Segment seg = std::move(unsent_.front());
        unsent_.pop_front();
        send_packet(seg.packet, now);
        ++stats_.data_sent;
        if (inflight_.empty()) snd_una_ = seg.psn;
        inflight_.push_back(std::move(seg));
        retx_deadline_ = now + rto_;  // timer slides while the burst drains
    }
}

void Endpoint::retransmit_from(uint32_t psn, double now, bool count_retry) {
    // Go-back-N: everything from `psn` returns to the head of the unsent
    // queue in order and the window refills from there.
    size_t moved = 0;
    while (!inflight_.empty() && !psn_less(inflight_.back().psn, psn)) {
        unsent_.push_front(std::move(inflight_.back()));
        inflight_.pop_back();
        ++moved;
    }
    stats_.data_retransmitted += moved;
    if (count_retry) ++stats_.timeouts;
    retx_deadline_ = inflight_.empty() ? INFINITY : now + rto_;
    transmit_window(now);
    if (!unsent_.empty() || !inflight_.empty()) retx_deadline_ = now + rto_;
}

void Endpoint::fail_all(Completion::Status status) {
    for (PendingWr& pw : pending_)
        if (pw.wr.wr_id != kInternalWr) cq_.push_back({pw.wr.wr_id, status});
    completion_base_ += pending_.size();
    pending_.clear();
    unsent_.clear();
    inflight_.clear();
    retx_deadline_ = INFINITY;
    qp_.state = QpState::error;
}

void Endpoint::handle_ack(uint32_t psn) {
    if (inflight_.empty()) return;
    if (psn_less(psn, snd_una_)) return;  // stale
    while (!inflight_.empty() && !psn_less(psn, inflight_.front().psn))
        inflight_.pop_front();
    snd_una_ = psn_add(psn, 1);
    // Forward progress: the retry budget counts consecutive stalls only.
    if (!pending_.empty()) pending_.front().retries = 0;
    while (!pending_.empty() && pending_.front().segmented &&
           psn_less(pending_.front().last_psn, snd_una_)) {
        if (pending_.front().wr.wr_id != kInternalWr)
            cq_.push_back({pending_.front().wr.wr_id, Completion::Status::success});
        pending_.pop_front();
        ++completion_base_;
    }
    retx_deadline_ = inflight_.empty() && unsent_.empty() ? INFINITY : last_now_ + rto_;
}

void Endpoint::handle_nak(const Packet& p, double now) {
    if (p.header.flags & flag::access_error) {
        // The offending request completes with the access error; the queue
        // pair goes to error and flushes everything else the same way.
        fail_all(Completion::Status::remote_access_error);
        return;
    }
    if (psn_less(p.header.psn, snd_una_)) return;  // already resolved
    if (p.header.psn == last_fast_retx_psn_ && now < last_fast_retx_time_ + 0.5 * rto_)
        return;  // suppress duplicate NAK bursts
    last_fast_retx_psn_ = p.header.psn;
    last_fast_retx_time_ = now;
    retransmit_from(p.header.psn, now, false);
}

void Endpoint::handle_data(const Packet& p, double now) {
    if (p.header.qp_id != qp_.qp_id) return;  // not for this QP
    const uint32_t psn = p.header.psn;
    if (psn == qp_.expected_psn) {
        bool ok = true;
        if (p.header.opcode == Opcode::write) {
            auto it = regions_.find(p.header.rkey);
            if (it == regions_.end()) {
                ok = false;
            } else {
                const Registration& reg = it->second;
                const uint64_t addr = p.header.remote_addr;
                if (addr < reg.base || addr + p.payload.size() > reg.base + reg.length)
                    ok = false;
                else
                    std::copy(p.payload.begin(), p.payload.end(), reg.ptr + (addr - reg.base));
            }
            if (!ok) {
                Packet nak;
                nak.header.opcode = Opcode::nak;
                nak.header.flags = flag::access_error;
                nak.header.qp_id = peer_qp_id_;
                nak.header.psn = psn;
                send_packet(std::move(nak), now);
                ++stats_.naks_sent;
                qp_.state = QpState::error;
                return;
            }
        } else {  // SEND
            rx_message_.insert(rx_message_.end(), p.payload.begin(), p.payload.end());
            if (p.header.flags & flag::last_segment) {
                if (initiating_ && !peer_region_) {
                    peer_region_ = decode_region(rx_message_);
                } else {
                    messages_.push_back(rx_message_);
                }
                rx_message_.clear();
            }
        }
        qp_.expected_psn = psn_add(psn, 1);
        last_nak_psn_ = UINT32_MAX;  // gap closed
        Packet ack;
        ack.header.opcode = Opcode::ack;
        ack.header.qp_id = peer_qp_id_;
        ack.header.psn = psn;
        send_packet(std::move(ack), now);
        ++stats_.acks_sent;
        return;
    }
    if (psn_less(psn, qp_.expected_psn)) {
        // Duplicate: drop the payload, refresh the peer's view of progress.
        ++stats_.duplicates_dropped;
        Packet ack;
        ack.header.opcode = Opcode::ack;
        ack.header.qp_id = peer_qp_id_;
        ack.header.psn = psn_add(qp_.expected_psn, kPsnMask);
        send_packet(std::move(ack), now);
        ++stats_.acks_sent;
        return;
    }
    // Gap: ask for the first missing segment, once per gap; every other
    // out-of-order arrival re-acks the last in-order delivery so cumulative
    // progress survives lost acks.
    if (last_nak_psn_ != qp_.expected_psn) {
        last_nak_psn_ = qp_.expected_psn;
        Packet nak;
        nak.header.opcode = Opcode::nak;
        nak.header.qp_id = peer_qp_id_;
        nak.header.psn = qp_.expected_psn;
        send_packet(std::move(nak), now);
        ++stats_.naks_sent;
    } else {
        Packet ack;
        ack.header.opcode = Opcode::ack;
        ack.header.qp_id = peer_qp_id_;
        ack.header.psn = psn_add(qp_.expected_psn, kPsnMask);
        send_packet(std::move(ack), now);
        ++stats_.acks_sent;
    }
}

void Endpoint::handle_packet(Packet&& p, double now) {
    switch (p.header.opcode) {
        case Opcode::cm_connect_request: {
            if (!listening_) return;
            if (qp_.state == QpState::init) {
                peer_qp_id_ = p.header.qp_id;
                qp_.expected_psn = p.header.psn;
                qp_.state = QpState::ready;
                if (advertised_) {
                    WorkRequest wr;
                    wr.wr_id = kInternalWr;
                    wr.opcode = Opcode::send;
                    wr.payload = encode_region(*advertised_);
                    PendingWr pw;
                    pw.wr = std::move(wr);
                    pending_.push_back(std::move(pw));
                    segment_ready_wrs();
                }
            }
            if (qp_.state == QpState::ready && peer_qp_id_ == p.header.qp_id) {
                Packet resp;
                resp.header.opcode = Opcode::cm_connect_response;
                resp.header.qp_id = qp_.qp_id;
                resp.header.psn = initial_psn_;
                send_packet(std::move(resp), now);
            }
            return;
        }
        case Opcode::cm_connect_response: {
            if (!initiating_ || qp_.state != QpState::init) return;
            peer_qp_id_ = p.header.qp_id;
            qp_.expected_psn = p.header.psn;
            qp_.state = QpState::ready;
            return;
        }
        case Opcode::write:
        case Opcode::send:
            if (qp_.state == QpState::ready) handle_data(p, now);
            return;
        case Opcode::ack:
            if (p.header.qp_id == qp_.qp_id) handle_ack(p.header.psn);
            return;
        case Opcode::nak:
            if (p.header.qp_id == qp_.qp_id) handle_nak(p, now);
            return;
    }
}

void Endpoint::step(double now) {
    last_now_ = now;
    if (qp_.state == QpState::error) {
        while (channel_.receive(port_, now)) {
        }
        return;
    }
    while (auto d = channel_.receive(port_, now)) handle_packet(decode_packet(*d), now);

    if (initiating_ && qp_.state == QpState::init && now + 1e-15 >= cm_deadline_) {
        if (cm_attempts_ > cfg_.max_retries) {
            qp_.state = QpState::error;
            return;
        }
        ++cm_attempts_;
        ++stats_.cm_retries;
        send_cm_request(now);
        cm_deadline_ = now + cm_interval_;
    }

    if (!inflight_.empty() && now + 1e-15 >= retx_deadline_) {
        const uint64_t owner = inflight_.front().wr_slot;
        PendingWr& pw = pending_[owner - completion_base_];
        if (++pw.retries > cfg_.max_retries) {
            fail_all(Completion::Status::retry_exceeded);
            return;
        }
        retransmit_from(snd_una_, now, true);
    }

    transmit_window(now);
}

double Endpoint::next_timer() const {
    double t = INFINITY;
    if (initiating_ && qp_.state == QpState::init) t = std::min(t, cm_deadline_);
    if (!inflight_.empty()) t = std::min(t, retx_deadline_);
    return t;
}

std::vector<Completion> Endpoint::poll_cq() {
    std::vector<Completion> out;
    out.swap(cq_);
    return out;
}

std::vector<std::vector<uint8_t>> Endpoint::drain_messages() {
    std::vector<std::vector<uint8_t>> out;
    out.swap(messages_);
    return out;
}

void Endpoint::send_packet(Packet p, double now) {
    channel_.send(port_, encode_packet(p), now);
}

double cm_handshake(Endpoint& initiator, Endpoint& responder, Channel& channel, double start,
                    double t_limit) {
    double t = start;
    if (!initiator.connected() && initiator.qp().state != QpState::init) initiator.connect(t);
    for (int guard = 0; guard < 1'000'000; ++guard) {
        initiator.step(t);
        responder.step(t);
        initiator.step(t);
        if (initiator.connected() && initiator.peer_region() && responder.connected()) return t;
        if (initiator.qp().state == QpState::error || responder.qp().state == QpState::error)
            throw StageError(Stage::transport, "connection handshake failed");
        const double tn = std::min({channel.next_event_time(), initiator.next_timer(),
                                    responder.next_timer()});
        if (!std::isfinite(tn) || tn > t_limit)
            throw StageError(Stage::transport, "connection handshake timed out");
        t = std::max(t, tn);
    }
    throw StageError(Stage::transport, "connection handshake did not settle");
}

}  // namespace rfdaq::rdma
