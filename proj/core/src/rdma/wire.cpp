#include "rfdaq/rdma/wire.hpp"

namespace rfdaq::rdma {

std::vector<uint8_t> encode_packet(const Packet& p) {
    std::vector<uint8_t> out;
    out.reserve(kHeaderSize + p.payload.size());
    out.push_back(static_cast<uint8_t>(p.header.opcode));
    out.push_back(p.header.flags);
    out.push_back(static_cast<uint8_t>(p.header.qp_id >> 8));
    out.push_back(static_cast<uint8_t>(p.header.qp_id));
    for (int s = 16; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(p.header.psn >> s));
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(p.header.rkey >> s));
    for (int s = 40; s >= 0; s -= 8)
        out.push_back(static_cast<uint8_t>(p.header.remote_addr >> s));
    for (int s = 16; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(p.header.length >> s));
    out.insert(out.end(), p.payload.begin(), p.payload.end());
    return out;
}

Packet decode_packet(std::span<const uint8_t> d) {
    if (d.size() < kHeaderSize)
        throw StageError(Stage::transport, "datagram shorter than a header");
    Packet p;
    const uint8_t op = d[0];
    if (op < 1 || op > 6) throw StageError(Stage::transport, "unknown opcode");
    p.header.opcode = static_cast<Opcode>(op);
    p.header.flags = d[1];
    p.header.qp_id = static_cast<uint16_t>(d[2] << 8 | d[3]);
    p.header.psn = static_cast<uint32_t>(d[4]) << 16 | static_cast<uint32_t>(d[5]) << 8 | d[6];
    p.header.rkey = static_cast<uint32_t>(d[7]) << 24 | static_cast<uint32_t>(d[8]) << 16 |
                    static_cast<uint32_t>(d[9]) << 8 | d[10];
    p.header.remote_addr = 0;
    for (int i = 0; i < 6; ++i) p.header.remote_addr = p.header.remote_addr << 8 | d[11 + i];
    p.header.length =
        static_cast<uint32_t>(d[17]) << 16 | static_cast<uint32_t>(d[18]) << 8 | d[19];
    if (d.size() != kHeaderSize + p.header.length)
        throw StageError(Stage::transport, "datagram length disagrees with header");
    p.payload.assign(d.begin() + kHeaderSize, d.end());
    return p;
}

}  // namespace rfdaq::rdma
