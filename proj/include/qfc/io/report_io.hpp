#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "qfc/modes/schmidt.hpp"

namespace qfc::io {

inline constexpr const char* kReportSchema = "qfc-report/1";

// Writes {"schema": ..., "kind": kind, "metrics": metrics} as indented JSON.
void write_report(const std::filesystem::path& path, const std::string& kind, const nlohmann::json& metrics);
nlohmann::json read_report(const std::filesystem::path& path);

// Long-format CSV of the leading modes:
//   mode,side,wavelength_nm,re,im,abs,phase
// with side "in" or "out".
void write_modes_csv(const std::filesystem::path& path, const SchmidtDecomposition& s, std::size_t modes);

// Long-format CSV t_ps,re,im,intensity for time-domain modes, one block per
// named series (column "series").
void write_time_modes_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                          const std::vector<TimeSeries>& series);

}  // namespace qfc::io
