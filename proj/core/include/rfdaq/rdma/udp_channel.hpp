#pragma once

#include "rfdaq/rdma/channel.hpp"

namespace rfdaq::rdma {

/// Real kernel datagrams over loopback: two UDP sockets on 127.0.0.1 with
/// ephemeral ports, one per endpoint slot. Timing is physical, so
/// next_event_time() is unknowable (+inf) and drivers must poll with a
/// wall-clock loop instead of run_until().
class UdpChannel : public Channel {
public:
    UdpChannel();
    ~UdpChannel() override;
    UdpChannel(const UdpChannel&) = delete;
    UdpChannel& operator=(const UdpChannel&) = delete;

    void send(int from_port, std::vector<uint8_t> datagram, double now) override;
    std::optional<std::vector<uint8_t>> receive(int port, double now) override;
    double next_event_time() const override;

    uint16_t udp_port(int port) const;

private:
    int fd_[2] = {-1, -1};
    uint16_t bound_port_[2] = {0, 0};
};

}  // namespace rfdaq::rdma
