#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "rfdaq/common.hpp"

namespace rfdaq::acq {

/// Fixed-capacity circular block buffer for one writer and one reader.
/// Blocks are identified by their absolute write sequence number; a slot is
/// reusable once its block has been read. Filled blocks may be read out of
/// order. Block completion happens-before block visibility to the reader
/// (release/acquire on the slot state).
class RingBuffer {
public:
    explicit RingBuffer(size_t capacity_bytes = size_t{4} << 20,
                        size_t block_size_bytes = size_t{256} << 10);

    size_t block_size() const { return block_size_; }
    size_t block_count() const { return n_blocks_; }
    size_t capacity_bytes() const { return block_size_ * n_blocks_; }

    /// Store one block; payloads shorter than block_size are zero-padded.
    /// Returns the absolute block index, or nothing when the target slot is
    /// still unread (overflow, counted; committed blocks stay intact).
    std::optional<uint64_t> try_write(std::span<const uint8_t> payload);

    /// Store one block, waiting for the slot to free instead of overflowing.
    uint64_t write_blocking(std::span<const uint8_t> payload);

    /// Read a filled block bit-exactly and release its slot for reuse.
    /// Reading a block that was never written, already consumed, or already
    /// recycled is a sequencing error.
    std::vector<uint8_t> read(uint64_t block_index);

    uint64_t overflow_count() const { return overflows_.load(std::memory_order_relaxed); }
    uint64_t blocks_written() const { return next_write_.load(std::memory_order_relaxed); }
    size_t occupied_blocks() const;

    /// Unblock writers; later blocking writes fail with an acquisition error.
    void close();

private:
    enum : uint8_t { kEmpty = 0, kFilled = 1 };

    struct Slot {
        std::atomic<uint8_t> state{kEmpty};
        uint64_t block_index = 0;  // valid while state == kFilled
    };

    size_t block_size_;
    size_t n_blocks_;
    std::vector<uint8_t> storage_;
    std::vector<Slot> slots_;
    std::atomic<uint64_t> next_write_{0};
    std::atomic<uint64_t> overflows_{0};
    std::mutex m_;
    std::condition_variable slot_free_;
    bool closed_ = false;
};

}  // namespace rfdaq::acq
