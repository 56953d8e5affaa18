#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rfdaq/common.hpp"

namespace rfdaq::acq {

struct TriggerConfig {
    enum class Source { external, internal_pulser };
    Source source = Source::external;
    uint64_t delay = 0;      // sample-clock cycles between trigger and capture
    uint64_t window = 3072;  // samples per channel

    void validate() const;  // throws StageError(Stage::acquisition)
};

/// Announced when a frame's first sample is forwarded to buffering.
struct FrameEvent {
    uint64_t frame_id = 0;
    uint64_t trigger_sample_index = 0;
    uint64_t first_block_index = 0;
    uint32_t block_count = 0;

    uint64_t capture_start(const TriggerConfig& cfg) const {
        return trigger_sample_index + cfg.delay;
    }
};

/// Trigger-to-frame windowing. A trigger landing inside an armed window is
/// rejected as busy rather than queued; accepted frames claim consecutive
/// ring block indices. Events are recorded in arrival order.
class Framer {
public:
    Framer(TriggerConfig cfg, int channels, int bits_per_sample = 16,
           size_t block_size_bytes = size_t{256} << 10);

    /// Returns the frame event, or nothing (and counts it) when busy.
    std::optional<FrameEvent> arm(uint64_t trigger_sample_index);

    /// Cut the frame's window out of a continuous stream. The stream block
    /// must cover [trigger + delay, trigger + delay + window).
    SampleBlock extract(const SampleBlock& stream, const FrameEvent& ev) const;

    uint32_t blocks_per_frame() const;
    uint64_t busy_count() const { return busy_count_; }
    const std::vector<FrameEvent>& events() const { return events_; }
    const TriggerConfig& config() const { return cfg_; }

private:
    TriggerConfig cfg_;
    int channels_;
    int bits_per_sample_;
    size_t block_size_;
    uint64_t next_id_ = 0;
    uint64_t next_block_ = 0;
    uint64_t busy_count_ = 0;
    std::optional<uint64_t> window_end_;  // absolute end of the armed window
    std::vector<FrameEvent> events_;
};

}  // namespace rfdaq::acq
