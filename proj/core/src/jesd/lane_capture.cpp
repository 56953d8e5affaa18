#include "rfdaq/jesd/lane_capture.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

namespace rfdaq::jesd {

namespace {

constexpr char kMagic[4] = {'L', 'A', 'N', 'E'};
constexpr uint32_t kVersion = 1;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void put(std::FILE* f, const void* p, size_t n) {
    if (std::fwrite(p, 1, n, f) != n) throw StageError(Stage::io, "lane capture write failed");
}

void get(std::FILE* f, void* p, size_t n) {
    if (std::fread(p, 1, n, f) != n) throw StageError(Stage::io, "lane capture truncated");
}

template <typename T>
void put_le(std::FILE* f, T v) {
    uint8_t buf[sizeof(T)];
    for (size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<uint8_t>(v >> (8 * i));
    put(f, buf, sizeof(T));
}

template <typename T>
T get_le(std::FILE* f) {
    uint8_t buf[sizeof(T)];
    get(f, buf, sizeof(T));
    T v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
}

bool classify_control(uint16_t symbol) {
    CodecState st;  // either-disparity decode still reports control-ness
    const DecodeResult r = decode_8b10b(symbol, st);
    return r.error != CodeError::invalid_symbol && r.is_control;
}

}  // namespace

void save_lane_capture(const std::string& path, const LaneCapture& capture) {
    capture.params.validate();
    if (capture.lanes.size() != static_cast<size_t>(capture.params.lanes_per_link))
        throw StageError(Stage::io, "lane capture lane count mismatch");

    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw StageError(Stage::io, "cannot open " + path + " for writing");

    put(f.get(), kMagic, 4);
    put_le<uint32_t>(f.get(), kVersion);
    put_le<uint32_t>(f.get(), static_cast<uint32_t>(capture.params.lanes_per_link));
    put_le<uint32_t>(f.get(), static_cast<uint32_t>(capture.params.octets_per_frame));
    put_le<uint32_t>(f.get(), static_cast<uint32_t>(capture.params.frames_per_multiframe));
    put_le<uint8_t>(f.get(), capture.params.scrambling_enabled ? 1 : 0);
    put_le<uint8_t>(f.get(), capture.params.device_id);
    put_le<uint16_t>(f.get(), 0);
    uint64_t rate_bits;
    static_assert(sizeof(rate_bits) == sizeof(double));
    std::memcpy(&rate_bits, &capture.params.frame_clock, sizeof(double));
    put_le<uint64_t>(f.get(), rate_bits);
    put_le<uint32_t>(f.get(), static_cast<uint32_t>(capture.params.elastic_depth_octets));
    put_le<uint32_t>(f.get(), static_cast<uint32_t>(capture.params.cgs_multiframes));

    for (const auto& lane : capture.lanes) {
        put_le<uint64_t>(f.get(), lane.size());
        // Pack 10-bit groups MSB first: bit 9 (first on the wire) leads.
        uint32_t acc = 0;
        int nbits = 0;
        std::vector<uint8_t> packed;
        packed.reserve(lane.size() * 10 / 8 + 1);
        for (const uint16_t sym : lane.symbols) {
            acc = (acc << 10) | (sym & 0x3FF);
            nbits += 10;
            while (nbits >= 8) {
                packed.push_back(static_cast<uint8_t>(acc >> (nbits - 8)));
                nbits -= 8;
            }
        }
        if (nbits > 0) packed.push_back(static_cast<uint8_t>(acc << (8 - nbits)));
        put(f.get(), packed.data(), packed.size());
    }
}

LaneCapture load_lane_capture(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw StageError(Stage::io, "cannot open " + path);

    char magic[4];
    get(f.get(), magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw StageError(Stage::io, path + " is not a lane capture");
    if (get_le<uint32_t>(f.get()) != kVersion)
        throw StageError(Stage::io, "unsupported lane capture version");

    LaneCapture cap;
    cap.params.lanes_per_link = static_cast<int>(get_le<uint32_t>(f.get()));
    cap.params.octets_per_frame = static_cast<int>(get_le<uint32_t>(f.get()));
    cap.params.frames_per_multiframe = static_cast<int>(get_le<uint32_t>(f.get()));
    cap.params.scrambling_enabled = get_le<uint8_t>(f.get()) != 0;
    cap.params.device_id = get_le<uint8_t>(f.get());
    get_le<uint16_t>(f.get());
    const uint64_t rate_bits = get_le<uint64_t>(f.get());
    std::memcpy(&cap.params.frame_clock, &rate_bits, sizeof(double));
    cap.params.elastic_depth_octets = static_cast<int>(get_le<uint32_t>(f.get()));
    cap.params.cgs_multiframes = static_cast<int>(get_le<uint32_t>(f.get()));
    cap.params.line_rate = cap.params.frame_clock * cap.params.octets_per_frame * 10.0;
    cap.params.validate();

    cap.lanes.resize(static_cast<size_t>(cap.params.lanes_per_link));
    for (auto& lane : cap.lanes) {
        const uint64_t count = get_le<uint64_t>(f.get());
        const size_t nbytes = static_cast<size_t>((count * 10 + 7) / 8);
        std::vector<uint8_t> packed(nbytes);
        get(f.get(), packed.data(), nbytes);
        lane.symbols.reserve(count);
        lane.is_control.reserve(count);
        uint32_t acc = 0;
        int nbits = 0;
        size_t byte = 0;
        for (uint64_t i = 0; i < count; ++i) {
            while (nbits < 10) {
                acc = (acc << 8) | packed[byte++];
                nbits += 8;
            }
            const uint16_t sym = static_cast<uint16_t>((acc >> (nbits - 10)) & 0x3FF);
            nbits -= 10;
            lane.push(sym, classify_control(sym));
        }
    }
    return cap;
}

}  // namespace rfdaq::jesd
