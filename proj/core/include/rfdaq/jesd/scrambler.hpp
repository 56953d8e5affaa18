#pragma once

#include <cstdint>
#include <cstddef>
#include <span>
#include <vector>

namespace rfdaq::jesd {

// Self-synchronous scrambler over 1 + x^14 + x^15, processed MSB first per
// octet. The descrambler shift register is fed with the received bits, so it
// re-synchronizes within 15 bits after any corruption.
class Scrambler {
public:
    explicit Scrambler(bool enabled = true) : enabled_(enabled) {}

    uint8_t process(uint8_t octet);
    void process(std::span<const uint8_t> in, std::span<uint8_t> out);
    std::vector<uint8_t> process(std::span<const uint8_t> in);

    void reset() { reg_ = kSeed; }
    bool enabled() const { return enabled_; }

private:
    static constexpr uint32_t kSeed = 0x7FFF;
    uint32_t reg_ = kSeed;
    bool enabled_;
};

class Descrambler {
public:
    explicit Descrambler(bool enabled = true) : enabled_(enabled) {}

    uint8_t process(uint8_t octet);
    void process(std::span<const uint8_t> in, std::span<uint8_t> out);
    std::vector<uint8_t> process(std::span<const uint8_t> in);

    void reset() { reg_ = kSeed; }
    bool enabled() const { return enabled_; }

private:
    static constexpr uint32_t kSeed = 0x7FFF;
    uint32_t reg_ = kSeed;
    bool enabled_;
};

}  // namespace rfdaq::jesd
