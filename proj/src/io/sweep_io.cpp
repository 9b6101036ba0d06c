#include "qfc/io/sweep_io.hpp"

#include <cmath>
#include <cstdio>

#include "json_util.hpp"
#include "qfc/core/units.hpp"
#include "qfc/io/csv.hpp"

namespace qfc::io {

using detail::json;

std::string center_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "center_%03zu.csv", index);
  return buf;
}

void write_sweep(const std::filesystem::path& dir, const DelaySweepDataset& data) {
  const auto& meta = data.metadata();
  std::vector<double> center_nm;
  for (double c : data.centers()) center_nm.push_back(units::omega_to_wavelength_nm(c));
  const json header{
      {"schema", kSweepSchema},
      {"out_grid", detail::grid_to_json(data.out_grid())},
      {"centers", data.centers()},
      {"center_wavelengths_nm", center_nm},
      {"delays_ps", data.delays_ps()},
      {"shear", meta.shear},
      {"seed", meta.seed},
      {"osa_fwhm_nm", meta.osa_fwhm_nm},
      {"averages", meta.averages},
      {"amplitude", meta.amplitude},
      {"noise",
       {{"additive_sigma", meta.noise.additive_sigma},
        {"multiplicative_sigma", meta.noise.multiplicative_sigma},
        {"seed", meta.noise.seed}}},
      {"warnings", meta.warnings},
      {"files", [&] {
         std::vector<std::string> f;
         for (std::size_t c = 0; c < data.center_count(); ++c) f.push_back(center_file_name(c));
         return f;
       }()}};
  std::filesystem::create_directories(dir);
  write_file(dir / "metadata.json", header.dump(2) + "\n");

  std::vector<std::string> names{"out_index"};
  for (double d : data.delays_ps()) names.push_back(format_number(d));
  std::vector<double> row(data.delay_count() + 1);
  for (std::size_t c = 0; c < data.center_count(); ++c) {
    std::string out;
    append_csv_header(out, names);
    for (std::size_t k = 0; k < data.out_count(); ++k) {
      row[0] = double(k);
      const double* tr = data.trace(c, k);
      std::copy(tr, tr + data.delay_count(), row.begin() + 1);
      append_csv_row(out, row);
    }
    write_file(dir / center_file_name(c), out);
  }
}

DelaySweepDataset ingest_sweep(const std::filesystem::path& dir) {
  const auto meta_path = dir / "metadata.json";
  const std::string mfile = meta_path.string();
  const json header = detail::parse_json(read_file(meta_path), mfile);
  detail::check_schema(header, kSweepSchema, mfile);

  const auto out = detail::grid_from_json(detail::field<json>(header, "out_grid", mfile), mfile, "/out_grid");
  const auto centers = detail::field<std::vector<double>>(header, "centers", mfile);
  const auto delays = detail::field<std::vector<double>>(header, "delays_ps", mfile);
  for (std::size_t i = 1; i < delays.size(); ++i)
    if (!(delays[i] > delays[i - 1])) throw ParseError("delays not increasing in /delays_ps", mfile, 0);

  SweepMetadata meta;
  meta.shear = detail::field<double>(header, "shear", mfile);
  meta.seed = detail::field<std::uint64_t>(header, "seed", mfile);
  meta.osa_fwhm_nm = detail::field<double>(header, "osa_fwhm_nm", mfile);
  meta.averages = detail::field<std::size_t>(header, "averages", mfile);
  meta.amplitude = detail::field<double>(header, "amplitude", mfile);
  if (const auto n = header.find("noise"); n != header.end()) {
    meta.noise.additive_sigma = detail::field<double>(*n, "additive_sigma", mfile, "/noise");
    meta.noise.multiplicative_sigma = detail::field<double>(*n, "multiplicative_sigma", mfile, "/noise");
    meta.noise.seed = detail::field<std::uint64_t>(*n, "seed", mfile, "/noise");
  }
  meta.warnings = header.value("warnings", std::vector<std::string>{});

  std::vector<double> values(centers.size() * out.count() * delays.size());
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const auto path = dir / center_file_name(c);
    const std::string file = path.string();
    const std::string text = read_file(path);
    const auto table = parse_csv(text, file);
    if (table.cols != delays.size() + 1 || table.header.empty() || table.header[0] != "out_index")
      throw ParseError("header must be out_index followed by " + std::to_string(delays.size()) + " delays", file, 0, 0);
    // Ordering is checked over the whole header before agreement with the
    // metadata, so a shuffled file reports the shuffle.
    std::vector<double> labels(delays.size());
    std::vector<std::size_t> label_pos(delays.size());
    std::size_t header_pos = table.header[0].size() + 1;
    for (std::size_t d = 0; d < delays.size(); ++d) {
      const long col = static_cast<long>(d + 2);
      label_pos[d] = header_pos;
      if (!parse_number(table.header[d + 1], labels[d]))
        throw ParseError("delay label is not a number", file, header_pos, 0, col);
      if (d > 0 && !(labels[d] > labels[d - 1])) throw ParseError("delays not increasing", file, header_pos, 0, col);
      header_pos += table.header[d + 1].size() + 1;
    }
    for (std::size_t d = 0; d < delays.size(); ++d)
      if (labels[d] != delays[d])
        throw ParseError("delay label disagrees with metadata", file, label_pos[d], 0, static_cast<long>(d + 2));
    if (table.rows != out.count())
      throw ParseError("truncated table: expected " + std::to_string(out.count()) + " rows, found " +
                           std::to_string(table.rows),
                       file, text.size(), static_cast<long>(table.rows));
    for (std::size_t k = 0; k < out.count(); ++k) {
      if (table.at(k, 0) != double(k))
        throw ParseError("out_index out of sequence", file, table.row_offsets[k], static_cast<long>(k + 1), 1);
      for (std::size_t d = 0; d < delays.size(); ++d) {
        const double v = table.at(k, d + 1);
        if (!std::isfinite(v) || v < 0.0)
          throw ParseError("negative or non-finite intensity", file, table.row_offsets[k], static_cast<long>(k + 1),
                           static_cast<long>(d + 2));
        values[(c * out.count() + k) * delays.size() + d] = v;
      }
    }
  }
  try {
    return DelaySweepDataset(out, centers, delays, std::move(values), std::move(meta));
  } catch (const PreconditionError& e) {
    throw ParseError(std::string("invalid dataset: ") + e.what(), mfile, 0);
  }
}

}  // namespace qfc::io
