#include "qfc/io/recon_io.hpp"

#include <array>

#include "json_util.hpp"
#include "qfc/core/units.hpp"
#include "qfc/io/csv.hpp"

namespace qfc::io {

using detail::json;

namespace {

const char* axis_name(MaskAxis a) { return a == MaskAxis::kOut ? "out" : "in"; }

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::vector<std::string> names{"out_index"};
  for (Eigen::Index c = 0; c < m.cols(); ++c) names.push_back("c" + std::to_string(c));
  std::string out;
  append_csv_header(out, names);
  std::vector<double> row(m.cols() + 1);
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    row[0] = double(k);
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[c + 1] = m(k, c);
    append_csv_row(out, row);
  }
  return out;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path, std::size_t rows, std::size_t cols) {
  const std::string file = path.string();
  const std::string text = read_file(path);
  const auto t = parse_csv(text, file);
  if (t.cols != cols + 1) throw ParseError("expected " + std::to_string(cols + 1) + " columns", file, 0, 0);
  if (t.rows != rows)
    throw ParseError("truncated table: expected " + std::to_string(rows) + " rows", file, text.size(),
                     static_cast<long>(t.rows));
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t k = 0; k < rows; ++k) {
    if (t.at(k, 0) != double(k))
      throw ParseError("out_index out of sequence", file, t.row_offsets[k], static_cast<long>(k + 1), 1);
    for (std::size_t c = 0; c < cols; ++c) m(k, c) = t.at(k, c + 1);
  }
  return m;
}

json fit_to_json(const LinearFit& f) {
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"rms_residual", f.rms_residual},
          {"slope_stderr", f.slope_stderr},
          {"points", f.points}};
}

LinearFit fit_from_json(const json& j, const std::string& file) {
  LinearFit f;
  f.slope = detail::field<double>(j, "slope", file, "/delay_fit");
  f.intercept = detail::field<double>(j, "intercept", file, "/delay_fit");
  f.rms_residual = detail::field<double>(j, "rms_residual", file, "/delay_fit");
  f.slope_stderr = detail::field<double>(j, "slope_stderr", file, "/delay_fit");
  f.points = detail::field<std::size_t>(j, "points", file, "/delay_fit");
  return f;
}

}  // namespace

void write_recon(const std::filesystem::path& dir, const ReconstructedGreens& r) {
  std::vector<double> center_nm;
  for (double c : r.centers) center_nm.push_back(units::omega_to_wavelength_nm(c));
  json intervals = json::array();
  for (const auto& iv : r.mask_intervals)
    intervals.push_back({{"lo_nm", iv.lo_nm}, {"hi_nm", iv.hi_nm}, {"axis", axis_name(iv.axis)}});
  json header{{"schema", kReconSchema},
              {"out_grid", detail::grid_to_json(r.out_grid)},
              {"centers", r.centers},
              {"center_wavelengths_nm", center_nm},
              {"shear", r.shear},
              {"gauge", "phase rows have zero mean over the masked-in samples"},
              {"mask_intervals", intervals},
              {"delay_fit", r.delay_fit ? fit_to_json(*r.delay_fit) : json(nullptr)},
              {"warnings", r.warnings}};
  std::filesystem::create_directories(dir);
  write_file(dir / "recon.json", header.dump(2) + "\n");
  write_file(dir / "magnitude.csv", matrix_csv(r.magnitude));
  write_file(dir / "phase.csv", matrix_csv(r.phase));
  write_file(dir / "group_delay.csv", matrix_csv(r.group_delay));
  write_file(dir / "mask.csv", matrix_csv(r.mask.cast<double>()));

  const std::array<std::pair<const char*, const Eigen::MatrixXd*>, 3> longs{
      {{"magnitude_long.csv", &r.magnitude}, {"phase_long.csv", &r.phase}, {"group_delay_long.csv", &r.group_delay}}};
  for (const auto& [name, m] : longs) {
    std::string out = "lambda_in_nm,lambda_out_nm,value\n";
    for (Eigen::Index c = 0; c < m->cols(); ++c)
      for (Eigen::Index k = 0; k < m->rows(); ++k) {
        if (!r.mask(k, c)) continue;
        const std::array<double, 3> row{center_nm[c], r.out_grid.wavelength_nm(k), (*m)(k, c)};
        append_csv_row(out, row);
      }
    write_file(dir / name, out);
  }
}

ReconstructedGreens read_recon(const std::filesystem::path& dir) {
  const auto hpath = dir / "recon.json";
  const std::string file = hpath.string();
  const json h = detail::parse_json(read_file(hpath), file);
  detail::check_schema(h, kReconSchema, file);
  ReconstructedGreens r{.out_grid = detail::grid_from_json(detail::field<json>(h, "out_grid", file), file, "/out_grid"),
                        .centers = detail::field<std::vector<double>>(h, "centers", file)};
  r.shear = detail::field<double>(h, "shear", file);
  for (const auto& iv : detail::field<json>(h, "mask_intervals", file)) {
    const auto axis = detail::field<std::string>(iv, "axis", file, "/mask_intervals");
    if (axis != "out" && axis != "in") throw ParseError("mask interval axis must be 'in' or 'out'", file, 0);
    r.mask_intervals.push_back({detail::field<double>(iv, "lo_nm", file, "/mask_intervals"),
                                detail::field<double>(iv, "hi_nm", file, "/mask_intervals"),
                                axis == "out" ? MaskAxis::kOut : MaskAxis::kIn});
  }
  if (const auto f = h.find("delay_fit"); f != h.end() && !f->is_null()) r.delay_fit = fit_from_json(*f, file);
  r.warnings = h.value("warnings", std::vector<std::string>{});

  const std::size_t nk = r.out_grid.count(), nc = r.centers.size();
  r.magnitude = read_matrix(dir / "magnitude.csv", nk, nc);
  r.phase = read_matrix(dir / "phase.csv", nk, nc);
  r.group_delay = read_matrix(dir / "group_delay.csv", nk, nc);
  const Eigen::MatrixXd mask = read_matrix(dir / "mask.csv", nk, nc);
  r.mask.resize(nk, nc);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    if (mask.data()[i] != 0.0 && mask.data()[i] != 1.0)
      throw ParseError("mask entries must be 0 or 1", (dir / "mask.csv").string(), 0);
    r.mask.data()[i] = mask.data()[i] == 1.0;
  }
  return r;
}

}  // namespace qfc::io
