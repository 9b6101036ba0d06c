#include "qfc/io/report_io.hpp"

#include <array>

#include "json_util.hpp"
#include "qfc/io/csv.hpp"

namespace qfc::io {

using detail::json;

void write_report(const std::filesystem::path& path, const std::string& kind, const json& metrics) {
  const json j{{"schema", kReportSchema}, {"kind", kind}, {"metrics", metrics}};
  write_file(path, j.dump(2) + "\n");
}

json read_report(const std::filesystem::path& path) {
  const std::string file = path.string();
  json j = detail::parse_json(read_file(path), file);
  detail::check_schema(j, kReportSchema, file);
  return j;
}

void write_modes_csv(const std::filesystem::path& path, const SchmidtDecomposition& s, std::size_t modes) {
  std::string out = "mode,side,wavelength_nm,re,im,abs,phase\n";
  const std::size_t n = std::min(modes, s.input_modes.size());
  auto emit = [&](std::size_t m, const char* side, const SpectralMode& f) {
    for (std::size_t k = 0; k < f.grid().count(); ++k) {
      const cplx v = f.amplitude()[k];
      out += std::to_string(m);
      out += ',';
      out += side;
      out += ',';
      const std::array<double, 5> row{f.grid().wavelength_nm(k), v.real(), v.imag(), std::abs(v), std::arg(v)};
      append_csv_row(out, row);
    }
  };
  for (std::size_t m = 0; m < n; ++m) {
    emit(m, "in", s.input_modes[m]);
    emit(m, "out", s.output_modes[m]);
  }
  write_file(path, out);
}

void write_time_modes_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                          const std::vector<TimeSeries>& series) {
  if (names.size() != series.size()) throw DimensionError("write_time_modes_csv: one name per series");
  std::string out = "series,t_ps,re,im,intensity\n";
  for (std::size_t s = 0; s < series.size(); ++s)
    for (std::size_t i = 0; i < series[s].values.size(); ++i) {
      const cplx v = series[s].values[i];
      out += names[s];
      out += ',';
      const std::array<double, 4> row{series[s].t_s[i] * 1e12, v.real(), v.imag(), std::norm(v)};
      append_csv_row(out, row);
    }
  write_file(path, out);
}

}  // namespace qfc::io
