#include "rfdaq/common.hpp"

#include <cmath>

namespace rfdaq {

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::config: return "config";
        case Stage::generate: return "generate";
        case Stage::link: return "link";
        case Stage::acquisition: return "acquisition";
        case Stage::transport: return "transport";
        case Stage::analysis: return "analysis";
        case Stage::io: return "io";
    }
    return "unknown";
}

int16_t saturate16(double v) {
    double r = std::nearbyint(v);
    if (r > 32767.0) return 32767;
    if (r < -32767.0) return -32767;
    return static_cast<int16_t>(r);
}

double payload_rate_bps(int channels, int bits_per_sample, double sample_rate) {
    return static_cast<double>(channels) * bits_per_sample * sample_rate;
}

uint64_t fnv1a(const uint8_t* data, size_t len) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t fnv1a(const std::vector<uint8_t>& data) {
    return fnv1a(data.data(), data.size());
}

}  // namespace rfdaq
