#include <random>
#include <vector>

#include <doctest.h>

#include "rfdaq/jesd/codec8b10b.hpp"

#include "../common/codec_oracle.hpp"

using namespace rfdaq::jesd;

namespace {

const uint8_t kControls[12] = {0x1C, 0x3C, 0x5C, 0x7C, 0x9C, 0xBC, 0xDC, 0xFC,
                               0xF7, 0xFB, 0xFD, 0xFE};

}  // namespace

TEST_SUITE("codec8b10b") {

TEST_CASE("oracle tables are internally consistent") {
    // RD- data sub-blocks carry disparity 0 or +2, never -2.
    for (const char* s : codec_oracle::kSixNeg) {
        const int n = codec_oracle::ones(codec_oracle::parse_bits(s));
        CHECK((n == 3 || n == 4));
    }
    for (const char* s : codec_oracle::kFourNeg) {
        const int n = codec_oracle::ones(codec_oracle::parse_bits(s));
        CHECK((n == 2 || n == 3));
    }
}

TEST_CASE("encode matches the table oracle for every data octet and disparity") {
    for (int rd0 : {-1, +1}) {
        for (int octet = 0; octet < 256; ++octet) {
            CodecState st{rd0};
            int rd = rd0;
            const uint16_t got = encode_8b10b(static_cast<uint8_t>(octet), false, st);
            const uint16_t want = codec_oracle::oracle_encode(static_cast<uint8_t>(octet), false, rd);
            CHECK(got == want);
            CHECK(st.running_disparity == rd);
        }
    }
}

TEST_CASE("encode matches the table oracle for all twelve control codes") {
    for (int rd0 : {-1, +1}) {
        for (uint8_t k : kControls) {
            CHECK(is_valid_control(k));
            CodecState st{rd0};
            int rd = rd0;
            CHECK(encode_8b10b(k, true, st) == codec_oracle::oracle_encode(k, true, rd));
            CHECK(st.running_disparity == rd);
        }
    }
    CHECK_FALSE(is_valid_control(0x00));
    CodecState st;
    CHECK_THROWS_AS(encode_8b10b(0x00, true, st), CodingError);
}

TEST_CASE("comma wire images anchor the code") {
    CodecState st{-1};
    CHECK(encode_8b10b(K28_5, true, st) == 0b0011111010);
    CHECK(st.running_disparity == +1);
    CHECK(encode_8b10b(K28_5, true, st) == 0b1100000101);
    CHECK(st.running_disparity == -1);
}

TEST_CASE("decode inverts encode and tracks disparity") {
    std::mt19937 rng(7);
    CodecState enc, dec;
    for (int i = 0; i < 4096; ++i) {
        const bool ctrl = (rng() & 0xFF) < 16;
        const uint8_t octet =
            ctrl ? kControls[rng() % 12] : static_cast<uint8_t>(rng());
        const uint16_t sym = encode_8b10b(octet, ctrl, enc);
        const DecodeResult r = decode_8b10b(sym, dec);
        CHECK(r.error == CodeError::none);
        CHECK(r.octet == octet);
        CHECK(r.is_control == ctrl);
        CHECK(enc.running_disparity == dec.running_disparity);
    }
}

TEST_CASE("decode flags invalid groups and disparity violations") {
    CodecState st{-1};
    CHECK(decode_8b10b(0b0000000000, st).error == CodeError::invalid_symbol);
    CHECK(decode_8b10b(0b1111111111, st).error == CodeError::invalid_symbol);
    CHECK(st.running_disparity == -1);  // invalid groups leave the state

    // D.0 encoded for RD=- arriving at a receiver that believes RD=+.
    CodecState tx{-1};
    const uint16_t sym = encode_8b10b(0, false, tx);
    CodecState rx{+1};
    const DecodeResult r = decode_8b10b(sym, rx);
    CHECK(r.error == CodeError::disparity);
    CHECK(r.octet == 0);
    CHECK(rx.running_disparity == tx.running_disparity);  // resynchronized
}

TEST_CASE("no comma pattern forms across random data symbols") {
    // The singular comma property: 0011111 / 1100000 cannot appear anywhere
    // in a valid data-only stream, at any bit alignment.
    std::mt19937 rng(1234);
    CodecState st;
    const size_t n_symbols = 200000;  // 2e6 bits; the acceptance run does 1e7
    unsigned window = 0;
    int have = 0;
    size_t hits = 0;
    for (size_t i = 0; i < n_symbols; ++i) {
        const uint16_t sym = encode_8b10b(static_cast<uint8_t>(rng()), false, st);
        for (int b = 9; b >= 0; --b) {
            window = ((window << 1) | ((sym >> b) & 1u)) & 0x7F;
            if (++have >= 7 && (window == 0b0011111 || window == 0b1100000)) ++hits;
        }
    }
    CHECK(hits == 0);
}

}  // TEST_SUITE
