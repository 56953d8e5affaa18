#include "rfdaq/jesd/codec8b10b.hpp"

#include <array>
#include <bit>

namespace rfdaq::jesd {
namespace {

// 5b/6b sub-block, indexed by the five LSBs (EDCBA). Values are in abcdei
// transmission order, bit 5 = a. Column 0 applies when the running disparity
// at the sub-block boundary is -1, column 1 when it is +1.
constexpr uint8_t six_neg[32] = {
    0b100111, 0b011101, 0b101101, 0b110001, 0b110101, 0b101001, 0b011001, 0b111000,
    0b111001, 0b100101, 0b010101, 0b110100, 0b001101, 0b101100, 0b011100, 0b010111,
    0b011011, 0b100011, 0b010011, 0b110010, 0b001011, 0b101010, 0b011010, 0b111010,
    0b110011, 0b100110, 0b010110, 0b110110, 0b001110, 0b101110, 0b011110, 0b101011,
};
constexpr uint8_t six_pos[32] = {
    0b011000, 0b100010, 0b010010, 0b110001, 0b001010, 0b101001, 0b011001, 0b000111,
    0b000110, 0b100101, 0b010101, 0b110100, 0b001101, 0b101100, 0b011100, 0b101000,
    0b100100, 0b100011, 0b010011, 0b110010, 0b001011, 0b101010, 0b011010, 0b000101,
    0b001100, 0b100110, 0b010110, 0b001001, 0b001110, 0b010001, 0b100001, 0b010100,
};

// K.28 uses its own 6b code; the other control codes reuse the data column.
constexpr uint8_t six_k28_neg = 0b001111;
constexpr uint8_t six_k28_pos = 0b110000;

// 3b/4b sub-block for data, indexed by the three MSBs (HGF), fghj order.
// Index 7 is the primary encoding; the alternate x.A7 is handled separately.
constexpr uint8_t four_neg[8] = {0b1011, 0b1001, 0b0101, 0b1100, 0b1101, 0b1010, 0b0110, 0b1110};
constexpr uint8_t four_pos[8] = {0b0100, 0b1001, 0b0101, 0b0011, 0b0010, 0b1010, 0b0110, 0b0001};
constexpr uint8_t four_a7_neg = 0b0111;
constexpr uint8_t four_a7_pos = 0b1000;

// 3b/4b sub-block for K.28.y. Unlike data, the balanced entries flip with
// disparity so every control word is the complement of its counterpart.
constexpr uint8_t four_k28_neg[8] = {0b1011, 0b0110, 0b1010, 0b1100, 0b1101, 0b0101, 0b1001, 0b0111};
constexpr uint8_t four_k28_pos[8] = {0b0100, 0b1001, 0b0101, 0b0011, 0b0010, 0b1010, 0b0110, 0b1000};

constexpr bool is_kx7(uint8_t x) { return x == 23 || x == 27 || x == 29 || x == 30; }

// D.x.A7 substitutes for D.x.P7 to break runs of five identical bits.
constexpr bool use_a7(int mid_rd, uint8_t x) {
    return (mid_rd < 0 && (x == 17 || x == 18 || x == 20)) ||
           (mid_rd > 0 && (x == 11 || x == 13 || x == 14));
}

int block_disparity(uint8_t code, int bits) {
    return 2 * std::popcount(static_cast<unsigned>(code)) - bits;
}

struct DecodeEntry {
    uint8_t octet = 0;
    bool is_control = false;
    bool valid = false;
    int8_t exit_rd = 0;
};

// symbol -> entry per starting disparity (index 0: RD=-1, 1: RD=+1).
struct DecodeTable {
    std::array<std::array<DecodeEntry, 1024>, 2> map{};
};

uint16_t encode_raw(uint8_t octet, bool is_control, int& rd) {
    const uint8_t x = octet & 0x1F;
    const uint8_t y = (octet >> 5) & 0x07;

    uint8_t six;
    if (!is_control) {
        six = (rd < 0) ? six_neg[x] : six_pos[x];
    } else if (x == 28) {
        six = (rd < 0) ? six_k28_neg : six_k28_pos;
    } else {
        six = (rd < 0) ? six_neg[x] : six_pos[x];  // K.23/27/29/30, y == 7
    }
    int mid = rd + block_disparity(six, 6);

    uint8_t four;
    if (is_control && x == 28) {
        four = (mid < 0) ? four_k28_neg[y] : four_k28_pos[y];
    } else if (y == 7 && (is_control || use_a7(mid, x))) {
        four = (mid < 0) ? four_a7_neg : four_a7_pos;
    } else {
        four = (mid < 0) ? four_neg[y] : four_pos[y];
    }
    rd = mid + block_disparity(four, 4);

    return static_cast<uint16_t>((six << 4) | four);
}

const DecodeTable& decode_table() {
    static const DecodeTable table = [] {
        DecodeTable t;
        for (int start = 0; start < 2; ++start) {
            const int entry_rd = start == 0 ? -1 : +1;
            for (int v = 0; v < 256; ++v) {
                int rd = entry_rd;
                uint16_t sym = encode_raw(static_cast<uint8_t>(v), false, rd);
                auto& e = t.map[start][sym];
                e = {static_cast<uint8_t>(v), false, true, static_cast<int8_t>(rd)};
            }
            for (int v = 0; v < 256; ++v) {
                if (!is_valid_control(static_cast<uint8_t>(v))) continue;
                int rd = entry_rd;
                uint16_t sym = encode_raw(static_cast<uint8_t>(v), true, rd);
                auto& e = t.map[start][sym];
                e = {static_cast<uint8_t>(v), true, true, static_cast<int8_t>(rd)};
            }
        }
        return t;
    }();
    return table;
}

}  // namespace

bool is_valid_control(uint8_t octet) {
    const uint8_t x = octet & 0x1F;
    const uint8_t y = (octet >> 5) & 0x07;
    if (x == 28) return true;           // K.28.0 .. K.28.7
    return y == 7 && is_kx7(x);         // K.23.7, K.27.7, K.29.7, K.30.7
}

uint16_t encode_8b10b(uint8_t octet, bool is_control, CodecState& state) {
    if (is_control && !is_valid_control(octet)) {
        throw CodingError("not a defined 8b/10b control code");
    }
    int rd = state.running_disparity;
    uint16_t sym = encode_raw(octet, is_control, rd);
    state.running_disparity = rd;
    return sym;
}

DecodeResult decode_8b10b(uint16_t symbol, CodecState& state) {
    symbol &= 0x3FF;
    const auto& t = decode_table();
    const int cur = state.running_disparity < 0 ? 0 : 1;
    const auto& own = t.map[cur][symbol];
    if (own.valid) {
        state.running_disparity = own.exit_rd;
        return {own.octet, own.is_control, CodeError::none};
    }
    const auto& other = t.map[cur ^ 1][symbol];
    if (other.valid) {
        // Wrong running disparity: report it, adopt the stream's disparity.
        state.running_disparity = other.exit_rd;
        return {other.octet, other.is_control, CodeError::disparity};
    }
    return {0, false, CodeError::invalid_symbol};
}

bool contains_comma(uint32_t window, int bits) {
    // Scan every 7-bit window for 0011111 or 1100000.
    for (int shift = 0; shift + 7 <= bits; ++shift) {
        uint32_t w = (window >> (bits - 7 - shift)) & 0x7F;
        if (w == 0b0011111 || w == 0b1100000) return true;
    }
    return false;
}

}  // namespace rfdaq::jesd
