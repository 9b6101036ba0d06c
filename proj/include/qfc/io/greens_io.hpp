#pragma once

#include <filesystem>
#include <optional>

#include "json.hpp"
#include "qfc/core/greens.hpp"

namespace qfc::io {

inline constexpr const char* kGreensSchema = "qfc-greens/1";

// One file: a single-line JSON header followed by a CSV body with columns
// out_index,in_index,re,im in row-major order.
struct GreensFile {
  GreensFunction greens;
  nlohmann::json metadata;  // free-form creation metadata
};

void write_greens(const std::filesystem::path& path, const GreensFunction& g, const nlohmann::json& metadata = {});
GreensFile read_greens(const std::filesystem::path& path);

}  // namespace qfc::io
