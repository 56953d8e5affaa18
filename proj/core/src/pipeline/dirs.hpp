#pragma once

#include <filesystem>
#include <system_error>

#include "rfdaq/common.hpp"

namespace rfdaq::pipeline::detail {

inline void make_dir(const std::filesystem::path& p) {
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw StageError(Stage::io, "cannot create " + p.string() + ": " + ec.message());
}

}  // namespace rfdaq::pipeline::detail
