#pragma once

#include <string>
#include <vector>

#include "rfdaq/jesd/link.hpp"

namespace rfdaq::jesd {

/// A raw capture of encoded lane traffic plus the link configuration it was
/// taken under. Symbols are stored as packed 10-bit groups; control flags are
/// reconstructed on load (control and data wire images are disjoint).
struct LaneCapture {
    LinkParams params;
    std::vector<LaneStream> lanes;
};

void save_lane_capture(const std::string& path, const LaneCapture& capture);
LaneCapture load_lane_capture(const std::string& path);

}  // namespace rfdaq::jesd
