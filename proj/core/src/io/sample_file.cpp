#include "rfdaq/io/sample_file.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

namespace rfdaq::io {

namespace {

constexpr char kMagic[4] = {'R', 'F', 'S', 'B'};
constexpr uint32_t kVersion = 1;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void put(std::FILE* f, const void* p, size_t n) {
    if (std::fwrite(p, 1, n, f) != n) throw StageError(Stage::io, "sample file write failed");
}

void get(std::FILE* f, void* p, size_t n) {
    if (std::fread(p, 1, n, f) != n) throw StageError(Stage::io, "sample file truncated");
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

}  // namespace

void save_block(const std::string& path, const SampleBlock& block) {
    if (!block.valid_shape()) throw StageError(Stage::io, "refusing to save a malformed block");
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw StageError(Stage::io, "cannot open " + path + " for writing");
    put(f.get(), kMagic, sizeof(kMagic));
    put_le<uint32_t>(f.get(), kVersion);
    put_le<uint32_t>(f.get(), static_cast<uint32_t>(block.channels));
    put_le<uint64_t>(f.get(), block.samples_per_channel());
    uint64_t rate_bits;
    std::memcpy(&rate_bits, &block.sample_rate, sizeof(rate_bits));
    put_le<uint64_t>(f.get(), rate_bits);
    put_le<uint64_t>(f.get(), block.start_index);
    for (int16_t s : block.data) put_le<uint16_t>(f.get(), static_cast<uint16_t>(s));
}

SampleBlock load_block(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw StageError(Stage::io, "cannot open " + path);
    char magic[4];
    get(f.get(), magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw StageError(Stage::io, path + " is not a sample dump");
    if (get_le<uint32_t>(f.get()) != kVersion)
        throw StageError(Stage::io, "unsupported sample file version");
    const uint32_t channels = get_le<uint32_t>(f.get());
    const uint64_t per_channel = get_le<uint64_t>(f.get());
    if (channels == 0 || channels > 4096 || per_channel > (1ull << 32))
        throw StageError(Stage::io, "implausible sample file header");
    const uint64_t rate_bits = get_le<uint64_t>(f.get());
    SampleBlock block(static_cast<int>(channels), per_channel);
    std::memcpy(&block.sample_rate, &rate_bits, sizeof(rate_bits));
    block.start_index = get_le<uint64_t>(f.get());
    for (int16_t& s : block.data) s = static_cast<int16_t>(get_le<uint16_t>(f.get()));
    return block;
}

}  // namespace rfdaq::io
