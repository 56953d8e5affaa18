#include "rfdaq/acq/ring_buffer.hpp"

#include <algorithm>
#include <cstring>

namespace rfdaq::acq {

RingBuffer::RingBuffer(size_t capacity_bytes, size_t block_size_bytes)
    : block_size_(block_size_bytes) {
    if (block_size_ == 0 || capacity_bytes == 0 || capacity_bytes % block_size_ != 0)
        throw StageError(Stage::acquisition, "capacity must be a whole number of blocks");
    n_blocks_ = capacity_bytes / block_size_;
    storage_.resize(capacity_bytes);
    slots_ = std::vector<Slot>(n_blocks_);
}

std::optional<uint64_t> RingBuffer::try_write(std::span<const uint8_t> payload) {
    if (payload.size() > block_size_)
        throw StageError(Stage::acquisition, "payload larger than a block");
    const uint64_t index = next_write_.load(std::memory_order_relaxed);
    Slot& slot = slots_[index % n_blocks_];
    if (slot.state.load(std::memory_order_acquire) != kEmpty) {
        overflows_.fetch_add(1, std::memory_order_relaxed);
        return std::nullopt;
    }
    uint8_t* dst = storage_.data() + (index % n_blocks_) * block_size_;
    std::memcpy(dst, payload.data(), payload.size());
    std::memset(dst + payload.size(), 0, block_size_ - payload.size());
    slot.block_index = index;
    slot.state.store(kFilled, std::memory_order_release);
    next_write_.store(index + 1, std::memory_order_relaxed);
    return index;
}

uint64_t RingBuffer::write_blocking(std::span<const uint8_t> payload) {
    for (;;) {
        if (auto idx = try_write(payload)) return *idx;
        overflows_.fetch_sub(1, std::memory_order_relaxed);  // waiting, not losing
        std::unique_lock<std::mutex> lock(m_);
        const uint64_t index = next_write_.load(std::memory_order_relaxed);
        Slot& slot = slots_[index % n_blocks_];
        slot_free_.wait(lock, [&] {
            return closed_ || slot.state.load(std::memory_order_acquire) == kEmpty;
        });
        if (closed_) throw StageError(Stage::acquisition, "ring buffer closed");
    }
}

std::vector<uint8_t> RingBuffer::read(uint64_t block_index) {
    Slot& slot = slots_[block_index % n_blocks_];
    if (slot.state.load(std::memory_order_acquire) != kFilled || slot.block_index != block_index)
        throw StageError(Stage::acquisition,
                         "read of block " + std::to_string(block_index) + " out of sequence");
    const uint8_t* src = storage_.data() + (block_index % n_blocks_) * block_size_;
    std::vector<uint8_t> out(src, src + block_size_);
    slot.state.store(kEmpty, std::memory_order_release);
    {
        std::lock_guard<std::mutex> lock(m_);
    }
    slot_free_.notify_all();
    return out;
}

size_t RingBuffer::occupied_blocks() const {
    size_t n = 0;
    for (const Slot& s : slots_)
        if (s.state.load(std::memory_order_acquire) == kFilled) ++n;
    return n;
}

void RingBuffer::close() {
    {
        std::lock_guard<std::mutex> lock(m_);
        closed_ = true;
    }
    slot_free_.notify_all();
}

}  // namespace rfdaq::acq
