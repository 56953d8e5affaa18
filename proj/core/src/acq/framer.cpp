#include "rfdaq/acq/framer.hpp"

namespace rfdaq::acq {

void TriggerConfig::validate() const {
    if (window == 0) throw StageError(Stage::acquisition, "window must be positive");
}

Framer::Framer(TriggerConfig cfg, int channels, int bits_per_sample, size_t block_size_bytes)
    : cfg_(cfg), channels_(channels), bits_per_sample_(bits_per_sample),
      block_size_(block_size_bytes) {
    cfg_.validate();
    if (channels_ < 1) throw StageError(Stage::acquisition, "channel count must be positive");
    if (bits_per_sample_ != 16) throw StageError(Stage::acquisition, "only 16-bit samples");
    if (block_size_ == 0) throw StageError(Stage::acquisition, "block size must be positive");
}

uint32_t Framer::blocks_per_frame() const {
    const uint64_t frame_bytes =
        cfg_.window * static_cast<uint64_t>(channels_) * (bits_per_sample_ / 8);
    return static_cast<uint32_t>((frame_bytes + block_size_ - 1) / block_size_);
}

std::optional<FrameEvent> Framer::arm(uint64_t trigger_sample_index) {
    if (window_end_ && trigger_sample_index < *window_end_) {
        ++busy_count_;
        return std::nullopt;
    }
    FrameEvent ev;
    ev.frame_id = next_id_++;
    ev.trigger_sample_index = trigger_sample_index;
    ev.first_block_index = next_block_;
    ev.block_count = blocks_per_frame();
    next_block_ += ev.block_count;
    window_end_ = trigger_sample_index + cfg_.delay + cfg_.window;
    events_.push_back(ev);
    return ev;
}

SampleBlock Framer::extract(const SampleBlock& stream, const FrameEvent& ev) const {
    if (stream.channels != channels_)
        throw StageError(Stage::acquisition, "stream channel count mismatch");
    const uint64_t start = ev.capture_start(cfg_);
    const uint64_t end = start + cfg_.window;
    const uint64_t have_end = stream.start_index + stream.samples_per_channel();
    if (start < stream.start_index || end > have_end)
        throw StageError(Stage::acquisition, "stream does not cover the frame window");

    SampleBlock frame(channels_, cfg_.window, start, stream.sample_rate);
    const size_t off = start - stream.start_index;
    for (int ch = 0; ch < channels_; ++ch)
        for (uint64_t i = 0; i < cfg_.window; ++i)
            frame.sample(ch, i) = stream.sample(ch, off + i);
    return frame;
}

}  // namespace rfdaq::acq
