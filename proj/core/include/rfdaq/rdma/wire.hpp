#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rfdaq/common.hpp"

namespace rfdaq::rdma {

/// Datagram types. CM messages ride an unreliable-datagram QP; everything
/// else belongs to the reliable connection.
enum class Opcode : uint8_t {
    cm_connect_request = 1,
    cm_connect_response = 2,
    send = 3,   // message to the peer's receive queue (carries the memory region)
    write = 4,  // remote memory write segment
    ack = 5,    // cumulative: psn = highest in-order PSN received
    nak = 6,    // psn = first missing PSN; flags may mark a fatal access error
};

namespace flag {
inline constexpr uint8_t last_segment = 0x01;  // final segment of a work request
inline constexpr uint8_t access_error = 0x02;  // on nak: remote access violation
}  // namespace flag

/// Fixed 20-byte header, big-endian on the wire:
/// opcode:1 flags:1 qp_id:2 psn:3 rkey:4 remote_addr:6 length:3.
/// remote_addr is the absolute target address for write segments; length is
/// the payload byte count that follows the header.
struct PacketHeader {
    Opcode opcode = Opcode::ack;
    uint8_t flags = 0;
    uint16_t qp_id = 0;
    uint32_t psn = 0;          // 24-bit
    uint32_t rkey = 0;
    uint64_t remote_addr = 0;  // 48-bit
    uint32_t length = 0;       // 24-bit
};

inline constexpr size_t kHeaderSize = 20;
inline constexpr uint32_t kPsnMask = 0xFFFFFF;

struct Packet {
    PacketHeader header;
    std::vector<uint8_t> payload;
};

std::vector<uint8_t> encode_packet(const Packet& p);
Packet decode_packet(std::span<const uint8_t> datagram);  // throws StageError(transport)

/// Modular 24-bit sequence comparison: true when a precedes b.
inline bool psn_less(uint32_t a, uint32_t b) {
    return a != b && (((b - a) & kPsnMask) < 0x800000);
}
inline uint32_t psn_add(uint32_t a, uint32_t d) { return (a + d) & kPsnMask; }

}  // namespace rfdaq::rdma
