#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <utility>

#include "rfdaq/analysis/sweep.hpp"

namespace rfdaq::io {

/// fstream openers that throw StageError(io) instead of setting failbits.
std::ofstream open_text(const std::filesystem::path& path);
std::ofstream open_binary(const std::filesystem::path& path);

void write_gain_csv(std::ostream& os, const analysis::BandwidthResult& bw);

/// One row per tone: frequency plus its SNR breakdown.
void write_snr_csv(std::ostream& os,
                   std::span<const std::pair<double, analysis::SnrResult>> rows);

}  // namespace rfdaq::io
