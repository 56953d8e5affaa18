#pragma once

#include <cstdint>
#include <stdexcept>

namespace rfdaq::jesd {

// Running disparity is the only codec state. It is -1 or +1 at every symbol
// boundary and evolves deterministically with the encoded sequence.
struct CodecState {
    int running_disparity = -1;
};

enum class CodeError : uint8_t {
    none = 0,
    invalid_control,  // encode: octet is not a defined control code
    invalid_symbol,   // decode: 10-bit group not in the code
    disparity,        // decode: valid group, wrong running disparity
};

struct DecodeResult {
    uint8_t octet = 0;
    bool is_control = false;
    CodeError error = CodeError::none;
};

class CodingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Control characters used by the link layer.
inline constexpr uint8_t K28_0 = 0x1C;  // multiframe alignment start /R/
inline constexpr uint8_t K28_3 = 0x7C;  // lane alignment /A/
inline constexpr uint8_t K28_4 = 0x9C;  // configuration marker /Q/
inline constexpr uint8_t K28_5 = 0xBC;  // comma /K/

bool is_valid_control(uint8_t octet);

/// Encode one octet to a 10-bit code group, bit 9 = first bit on the wire
/// (abcdei fghj order). Throws CodingError for an undefined control octet.
uint16_t encode_8b10b(uint8_t octet, bool is_control, CodecState& state);

/// Decode one 10-bit code group. Invalid groups report invalid_symbol and
/// leave the disparity untouched; groups valid only under the opposite
/// disparity report CodeError::disparity but still yield the octet and
/// resynchronize the tracked disparity.
DecodeResult decode_8b10b(uint16_t symbol, CodecState& state);

/// True if the 7 MSBs of two concatenated symbols could begin a comma
/// sequence; used by scan tests. The singular comma patterns are 0011111
/// and 1100000.
bool contains_comma(uint32_t window20, int bits);

}  // namespace rfdaq::jesd
