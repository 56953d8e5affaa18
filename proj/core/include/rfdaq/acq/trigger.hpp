#pragma once

#include <cstdint>

namespace rfdaq::acq {

/// Quantize an event time onto the sample clock: the first clock edge at or
/// after the event. Capture latency is therefore in [0, 1/sample_clock).
/// Event times within a few ulp of an edge count as on-edge, so exactly
/// representable edge times do not slip a cycle to rounding noise.
uint64_t latch_trigger(double event_time_s, double sample_clock_hz);

}  // namespace rfdaq::acq
