#pragma once

#include <filesystem>

#include "qfc/recon/phase.hpp"

namespace qfc::io {

inline constexpr const char* kReconSchema = "qfc-recon/1";

// Directory layout: recon.json header, matrix CSVs magnitude/phase/
// group_delay/mask ([out x center], header out_index,c0,c1,...), and
// long-format *_long.csv files (lambda_in_nm, lambda_out_nm, value) over the
// masked-in samples for plotting.
void write_recon(const std::filesystem::path& dir, const ReconstructedGreens& r);
ReconstructedGreens read_recon(const std::filesystem::path& dir);

}  // namespace qfc::io
