#include "rfdaq/rdma/channel.hpp"

#include <algorithm>
#include <cmath>

#include "rfdaq/common.hpp"

namespace rfdaq::rdma {

void ChannelModel::validate() const {
    auto bad = [](const std::string& m) { throw StageError(Stage::transport, m); };
    if (mtu < 64 || mtu > (1u << 20)) bad("mtu out of range");
    if (loss_probability < 0.0 || loss_probability > 1.0) bad("loss probability outside [0, 1]");
    if (duplicate_probability < 0.0 || duplicate_probability >= 1.0)
        bad("duplicate probability outside [0, 1)");
    if (one_way_delay < 0.0) bad("delay must be non-negative");
    if (bandwidth_bps < 0.0) bad("bandwidth must be non-negative");
}

SimChannel::SimChannel(ChannelModel model) : model_(model), rng_(model.seed) {
    model_.validate();
}

void SimChannel::enqueue(int to_port, const std::vector<uint8_t>& datagram, double ready) {
    double deliver = ready + model_.one_way_delay;
    if (model_.reorder) {
        // Jitter larger than a serialization slot lets packets overtake.
        std::uniform_real_distribution<double> jitter(0.0, model_.max_jitter());
        deliver += jitter(rng_);
    }
    auto& q = queue_[to_port];
    InFlight f{deliver, seq_++, datagram};
    // Keep the queue sorted by delivery time (stable for ties).
    auto it = std::upper_bound(q.begin(), q.end(), f, [](const InFlight& a, const InFlight& b) {
        return a.deliver_at < b.deliver_at || (a.deliver_at == b.deliver_at && a.seq < b.seq);
    });
    q.insert(it, std::move(f));
}

void SimChannel::send(int from_port, std::vector<uint8_t> datagram, double now) {
    const int to = from_port == 0 ? 1 : 0;
    const double start = std::max(now, busy_until_[from_port]);
    const double ser =
        model_.bandwidth_bps > 0.0 ? static_cast<double>(datagram.size()) * 8.0 / model_.bandwidth_bps
                                   : 0.0;
    busy_until_[from_port] = start + ser;

    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng_) < model_.loss_probability) {
        ++dropped_;
        return;
    }
    enqueue(to, datagram, busy_until_[from_port]);
    if (model_.duplicate_probability > 0.0 && u(rng_) < model_.duplicate_probability) {
        ++duplicated_;
        enqueue(to, datagram, busy_until_[from_port]);
    }
}

std::optional<std::vector<uint8_t>> SimChannel::receive(int port, double now) {
    auto& q = queue_[port];
    if (q.empty() || q.front().deliver_at > now) return std::nullopt;
    std::vector<uint8_t> data = std::move(q.front().data);
    q.pop_front();
    return data;
}

double SimChannel::next_event_time() const {
    double t = INFINITY;
    for (const auto& q : queue_)
        if (!q.empty()) t = std::min(t, q.front().deliver_at);
    return t;
}

}  // namespace rfdaq::rdma
