#include "rfdaq/pipeline/report.hpp"

#include <fstream>

#include <json.hpp>

#include "rfdaq/common.hpp"

namespace rfdaq::pipeline {

void RunReport::add_stage(std::string name, std::string status, std::string detail) {
    stages.push_back({std::move(name), std::move(status), std::move(detail)});
}

std::string RunReport::to_json() const {
    nlohmann::json j;
    j["mode"] = mode;
    j["stages"] = nlohmann::json::array();
    for (const auto& s : stages) {
        nlohmann::json js;
        js["name"] = s.name;
        js["status"] = s.status;
        if (!s.detail.empty()) js["detail"] = s.detail;
        j["stages"].push_back(js);
    }
    j["bytes_generated"] = bytes_generated;
    j["bytes_transferred"] = bytes_transferred;
    j["completions"] = completions;
    j["overflow_count"] = overflow_count;
    j["busy_triggers"] = busy_triggers;
    j["t_acquire_s"] = t_acquire_s;
    j["t_transport_s"] = t_transport_s;
    j["payload_bit_exact"] = payload_bit_exact;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(checksum_source));
    j["checksum_source"] = buf;
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(checksum_host));
    j["checksum_host"] = buf;
    if (!metrics.empty()) j["metrics"] = metrics;
    if (!outputs.empty()) j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

void RunReport::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StageError(Stage::io, "cannot write report: " + path.string());
    out << to_json();
    if (!out) throw StageError(Stage::io, "short write: " + path.string());
}

}  // namespace rfdaq::pipeline
