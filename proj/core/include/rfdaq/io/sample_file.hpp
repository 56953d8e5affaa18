#pragma once

#include <string>

#include "rfdaq/common.hpp"

namespace rfdaq::io {

/// Binary sample dump ("RFSB"): header + little-endian channel-major int16
/// payload. One block per file; see docs/formats.md.
void save_block(const std::string& path, const SampleBlock& block);
SampleBlock load_block(const std::string& path);

}  // namespace rfdaq::io
