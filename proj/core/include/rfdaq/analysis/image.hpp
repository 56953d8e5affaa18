#pragma once

#include <ostream>

#include "rfdaq/common.hpp"

namespace rfdaq::analysis {

/// Channel x depth envelope display, max-normalized to [0,1].
struct RfImage {
    size_t channels = 0;
    size_t depth = 0;                // samples per channel
    std::vector<double> pixels;      // row-major: channels rows, depth columns
    double us_per_sample = 0.0;      // depth axis, microseconds
    double mm_per_sample = 0.0;      // depth axis, two-way millimetres

    double at(size_t channel, size_t d) const { return pixels[channel * depth + d]; }
};

/// Normalize an envelope block into a displayable image. The depth axis
/// assumes pulse-echo time of flight (depth = c*t/2).
RfImage render_image(const SampleBlock& envelope_block, double speed_of_sound = 1540.0);

/// 8-bit binary portable graymap, one row per channel.
void write_pgm(std::ostream& os, const RfImage& image);

/// channel,depth_sample,time_us,depth_mm,value rows.
void write_image_csv(std::ostream& os, const RfImage& image);

}  // namespace rfdaq::analysis
