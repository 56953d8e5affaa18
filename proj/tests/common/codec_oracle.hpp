#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>

// Table-driven 8b/10b reference encoder, kept deliberately separate from the
// library implementation. The RD- columns are transcribed from the published
// code tables in transmission order (abcdei, fghj); the RD+ columns follow
// from the complement rule. Composition, the running-disparity bookkeeping,
// the D.x.A7 substitution and the control-code handling are implemented here
// from the coding rules, not shared with the library.
namespace codec_oracle {

inline constexpr const char* kSixNeg[32] = {
    "100111", "011101", "101101", "110001", "110101", "101001", "011001", "111000",
    "111001", "100101", "010101", "110100", "001101", "101100", "011100", "010111",
    "011011", "100011", "010011", "110010", "001011", "101010", "011010", "111010",
    "110011", "100110", "010110", "110110", "001110", "101110", "011110", "101011",
};
inline constexpr const char* kFourNeg[8] = {"1011", "1001", "0101", "1100",
                                            "1101", "1010", "0110", "1110"};
inline constexpr const char* kFourA7Neg = "0111";
inline constexpr const char* kSixK28Neg = "001111";
inline constexpr const char* kFourK28Neg[8] = {"1011", "0110", "1010", "1100",
                                               "1101", "0101", "1001", "0111"};

inline unsigned parse_bits(const char* s) {
    unsigned v = 0;
    for (const char* p = s; *p; ++p) v = (v << 1) | unsigned(*p == '1');
    return v;
}

inline int ones(unsigned v) { return std::popcount(v); }

// RD+ encoding of a sub-block: complement when unbalanced; balanced codes
// are shared between the columns except the two alternate pairs (the 6b
// 111000/000111 pair and the 4b 1100/0011 pair) and every K.28 sub-block.
inline unsigned plus_column(unsigned neg, int bits, bool always_flip) {
    const unsigned mask = (1u << bits) - 1;
    if (always_flip || 2 * ones(neg) != bits) return ~neg & mask;
    if (bits == 6 && neg == 0b111000) return ~neg & mask;
    if (bits == 4 && neg == 0b1100) return ~neg & mask;
    return neg;
}

inline int update_rd(int rd, unsigned code, int bits) {
    const int d = 2 * ones(code) - bits;
    if (d == 0) return rd;
    return d > 0 ? +1 : -1;
}

inline bool oracle_is_control(uint8_t octet) {
    const uint8_t x = octet & 0x1F;
    const uint8_t y = octet >> 5;
    if (x == 28) return true;
    return y == 7 && (x == 23 || x == 27 || x == 29 || x == 30);
}

// Encode one octet; rd is -1 or +1 and is updated. Returns the 10-bit group
// with the first wire bit (a) in bit 9.
inline uint16_t oracle_encode(uint8_t octet, bool is_control, int& rd) {
    const uint8_t x = octet & 0x1F;
    const uint8_t y = octet >> 5;
    if (is_control && !oracle_is_control(octet)) throw std::invalid_argument("not a K code");

    unsigned six_neg, four_neg;
    bool k28 = is_control && x == 28;
    six_neg = k28 ? parse_bits(kSixK28Neg) : parse_bits(kSixNeg[x]);

    const unsigned six = rd < 0 ? six_neg : plus_column(six_neg, 6, k28);
    const int mid = update_rd(rd, six, 6);

    if (k28) {
        four_neg = parse_bits(kFourK28Neg[y]);
    } else if (is_control) {
        four_neg = parse_bits(kFourA7Neg);  // K.23/27/29/30 always use A7
    } else if (y == 7) {
        const bool a7 = (mid < 0 && (x == 17 || x == 18 || x == 20)) ||
                        (mid > 0 && (x == 11 || x == 13 || x == 14));
        four_neg = parse_bits(a7 ? kFourA7Neg : kFourNeg[7]);
    } else {
        four_neg = parse_bits(kFourNeg[y]);
    }
    const unsigned four = mid < 0 ? four_neg : plus_column(four_neg, 4, k28);
    rd = update_rd(mid, four, 4);
    return static_cast<uint16_t>((six << 4) | four);
}

}  // namespace codec_oracle
