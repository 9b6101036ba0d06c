#pragma once

#include <filesystem>

#include "qfc/measure/dataset.hpp"

namespace qfc::io {

inline constexpr const char* kSweepSchema = "qfc-sweep/1";

// Directory layout: metadata.json plus center_NNN.csv per probe center. Each
// CSV has the header out_index,<delay ps>... and one row per output sample.
void write_sweep(const std::filesystem::path& dir, const DelaySweepDataset& data);
DelaySweepDataset ingest_sweep(const std::filesystem::path& dir);

std::string center_file_name(std::size_t index);

}  // namespace qfc::io
