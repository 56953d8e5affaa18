#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfdaq {

// Pipeline stage identifiers. Values double as process exit codes so a
// failing run can be attributed to a stage from the shell.
enum class Stage : int {
    config = 2,
    generate = 3,
    link = 4,
    acquisition = 5,
    transport = 6,
    analysis = 7,
    io = 8,
};

const char* stage_name(Stage s);

class StageError : public std::runtime_error {
public:
    StageError(Stage stage, const std::string& what)
        : std::runtime_error(what), stage_(stage) {}
    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

/// Channel-major block of signed 16-bit samples: data[ch * samples_per_channel() + i]
/// holds sample i of channel ch. start_index counts sample-clock ticks since the
/// acquisition epoch and stays monotone across blocks of one stream.
struct SampleBlock {
    int channels = 1;
    uint64_t start_index = 0;
    double sample_rate = 80e6;
    std::vector<int16_t> data;

    SampleBlock() = default;
    SampleBlock(int ch, size_t samples_per_ch, uint64_t start = 0, double rate = 80e6)
        : channels(ch), start_index(start), sample_rate(rate),
          data(static_cast<size_t>(ch) * samples_per_ch, 0) {}

    size_t samples_per_channel() const {
        return channels > 0 ? data.size() / static_cast<size_t>(channels) : 0;
    }

    int16_t sample(int ch, size_t i) const {
        return data[static_cast<size_t>(ch) * samples_per_channel() + i];
    }
    int16_t& sample(int ch, size_t i) {
        return data[static_cast<size_t>(ch) * samples_per_channel() + i];
    }

    bool valid_shape() const {
        return channels > 0 && data.size() % static_cast<size_t>(channels) == 0;
    }
};

/// Clamp to the int16 range. DAQ convention: saturate, never wrap.
int16_t saturate16(double v);

/// Payload bit rate of a channel group: channels * bits * fs.
double payload_rate_bps(int channels, int bits_per_sample, double sample_rate);

/// FNV-1a over a byte range; used for end-to-end payload integrity checks.
uint64_t fnv1a(const uint8_t* data, size_t len);
uint64_t fnv1a(const std::vector<uint8_t>& data);

}  // namespace rfdaq
