#include "rfdaq/jesd/scrambler.hpp"

namespace rfdaq::jesd {

uint8_t Scrambler::process(uint8_t octet) {
    if (!enabled_) return octet;
    uint8_t out = 0;
    for (int b = 7; b >= 0; --b) {
        uint32_t d = (octet >> b) & 1u;
        uint32_t s = d ^ ((reg_ >> 13) & 1u) ^ ((reg_ >> 14) & 1u);
        reg_ = ((reg_ << 1) | s) & 0x7FFF;
        out = static_cast<uint8_t>((out << 1) | s);
    }
    return out;
}

void Scrambler::process(std::span<const uint8_t> in, std::span<uint8_t> out) {
    for (size_t i = 0; i < in.size(); ++i) out[i] = process(in[i]);
}

std::vector<uint8_t> Scrambler::process(std::span<const uint8_t> in) {
    std::vector<uint8_t> out(in.size());
    process(in, out);
    return out;
}

uint8_t Descrambler::process(uint8_t octet) {
    if (!enabled_) return octet;
    uint8_t out = 0;
    for (int b = 7; b >= 0; --b) {
        uint32_t r = (octet >> b) & 1u;
        uint32_t d = r ^ ((reg_ >> 13) & 1u) ^ ((reg_ >> 14) & 1u);
        reg_ = ((reg_ << 1) | r) & 0x7FFF;
        out = static_cast<uint8_t>((out << 1) | d);
    }
    return out;
}

void Descrambler::process(std::span<const uint8_t> in, std::span<uint8_t> out) {
    for (size_t i = 0; i < in.size(); ++i) out[i] = process(in[i]);
}

std::vector<uint8_t> Descrambler::process(std::span<const uint8_t> in) {
    std::vector<uint8_t> out(in.size());
    process(in, out);
    return out;
}

}  // namespace rfdaq::jesd
