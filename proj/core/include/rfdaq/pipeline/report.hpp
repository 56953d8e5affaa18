#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rfdaq::pipeline {

struct StageReport {
    std::string name;
    std::string status;  // "ok" or an error summary
    std::string detail;
};

/// Machine-readable run outcome: what ran, what moved, what it produced.
struct RunReport {
    std::string mode;
    std::vector<StageReport> stages;

    uint64_t bytes_generated = 0;
    uint64_t bytes_transferred = 0;
    uint64_t completions = 0;
    uint64_t overflow_count = 0;
    uint64_t busy_triggers = 0;
    double t_acquire_s = 0.0;    // simulated sample-clock time
    double t_transport_s = 0.0;  // simulated transport time
    bool payload_bit_exact = false;
    uint64_t checksum_source = 0;
    uint64_t checksum_host = 0;

    std::map<std::string, double> metrics;
    std::vector<std::string> outputs;  // artifact paths relative to output_dir

    void add_stage(std::string name, std::string status, std::string detail = "");
    std::string to_json() const;
    void save(const std::filesystem::path& path) const;
};

}  // namespace rfdaq::pipeline
