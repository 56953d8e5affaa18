#include "rfdaq/acq/trigger.hpp"

#include <cmath>

#include "rfdaq/common.hpp"

namespace rfdaq::acq {

uint64_t latch_trigger(double event_time_s, double sample_clock_hz) {
    if (!(sample_clock_hz > 0.0))
        throw StageError(Stage::acquisition, "sample clock must be positive");
    if (event_time_s <= 0.0) return 0;

    const double x = event_time_s * sample_clock_hz;
    const double nearest = std::nearbyint(x);
    const double ulp = std::nextafter(x, INFINITY) - x;
    if (std::abs(x - nearest) <= 4.0 * ulp) return static_cast<uint64_t>(nearest);
    return static_cast<uint64_t>(std::ceil(x));
}

}  // namespace rfdaq::acq
