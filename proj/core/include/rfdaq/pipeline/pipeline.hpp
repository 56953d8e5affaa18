#pragma once

#include "rfdaq/pipeline/config.hpp"
#include "rfdaq/pipeline/report.hpp"

namespace rfdaq::pipeline {

RunReport run_acquire(const RunConfig& cfg);
RunReport run_stress(const RunConfig& cfg);
RunReport run_characterize(const RunConfig& cfg);
RunReport run_budget(const RunConfig& cfg);

/// Dispatch on cfg.mode. Creates the output directory tree.
RunReport run(const RunConfig& cfg);

}  // namespace rfdaq::pipeline
