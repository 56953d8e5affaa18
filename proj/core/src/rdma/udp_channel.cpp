#include "rfdaq/rdma/udp_channel.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>

#include "rfdaq/common.hpp"

namespace rfdaq::rdma {

UdpChannel::UdpChannel() {
    for (int i = 0; i < 2; ++i) {
        fd_[i] = ::socket(AF_INET, SOCK_DGRAM, 0);
        if (fd_[i] < 0) throw StageError(Stage::transport, "socket() failed");
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = 0;  // ephemeral
        if (::bind(fd_[i], reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
            throw StageError(Stage::transport, "bind() failed");
        socklen_t len = sizeof(addr);
        if (::getsockname(fd_[i], reinterpret_cast<sockaddr*>(&addr), &len) != 0)
            throw StageError(Stage::transport, "getsockname() failed");
        bound_port_[i] = ntohs(addr.sin_port);
        const int flags = ::fcntl(fd_[i], F_GETFL, 0);
        ::fcntl(fd_[i], F_SETFL, flags | O_NONBLOCK);
    }
}

UdpChannel::~UdpChannel() {
    for (int fd : fd_)
        if (fd >= 0) ::close(fd);
}

uint16_t UdpChannel::udp_port(int port) const { return bound_port_[port & 1]; }

void UdpChannel::send(int from_port, std::vector<uint8_t> datagram, double) {
    const int to = 1 - (from_port & 1);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(bound_port_[to]);
    ::sendto(fd_[from_port & 1], datagram.data(), datagram.size(), 0,
             reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
    // A full socket buffer behaves like loss; reliability above recovers it.
}

std::optional<std::vector<uint8_t>> UdpChannel::receive(int port, double) {
    std::vector<uint8_t> buf(65536);
    const ssize_t n = ::recvfrom(fd_[port & 1], buf.data(), buf.size(), 0, nullptr, nullptr);
    if (n < 0) {
        if (errno == EAGAIN || errno == EWOULDBLOCK) return std::nullopt;
        throw StageError(Stage::transport, "recvfrom() failed");
    }
    buf.resize(static_cast<size_t>(n));
    return buf;
}

double UdpChannel::next_event_time() const { return INFINITY; }

}  // namespace rfdaq::rdma
