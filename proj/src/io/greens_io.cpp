#include "qfc/io/greens_io.hpp"

#include <array>

#include "json_util.hpp"
#include "qfc/io/csv.hpp"

namespace qfc::io {

using detail::json;

void write_greens(const std::filesystem::path& path, const GreensFunction& g, const json& metadata) {
  const auto& m = g.values();
  json header{{"schema", kGreensSchema},
              {"out_grid", detail::grid_to_json(g.out_grid())},
              {"in_grid", detail::grid_to_json(g.in_grid())},
              {"entries", m.size()},
              {"metadata", metadata.is_null() ? json::object() : metadata}};
  std::string out = header.dump() + "\n";
  out.reserve(out.size() + static_cast<std::size_t>(m.size()) * 48);
  out += "out_index,in_index,re,im\n";
  for (Eigen::Index k = 0; k < m.rows(); ++k)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const std::array<double, 4> row{double(k), double(j), m(k, j).real(), m(k, j).imag()};
      append_csv_row(out, row);
    }
  write_file(path, out);
}

GreensFile read_greens(const std::filesystem::path& path) {
  const std::string file = path.string();
  const std::string text = read_file(path);
  const std::size_t nl = text.find('\n');
  if (nl == std::string::npos) throw ParseError("truncated file: no header line", file, text.size());
  const json header = detail::parse_json(text.substr(0, nl), file);
  detail::check_schema(header, kGreensSchema, file);
  const auto out = detail::grid_from_json(detail::field<json>(header, "out_grid", file), file, "/out_grid");
  const auto in = detail::grid_from_json(detail::field<json>(header, "in_grid", file), file, "/in_grid");
  const auto entries = detail::field<std::size_t>(header, "entries", file);
  if (entries != out.count() * in.count()) throw ParseError("entry count does not match the grids", file, 0);

  const auto table = parse_csv(std::string_view(text).substr(nl + 1), file, nl + 1);
  if (table.cols != 4) throw ParseError("expected 4 columns out_index,in_index,re,im", file, nl + 1);
  if (table.rows != entries)
    throw ParseError("truncated body: expected " + std::to_string(entries) + " records, found " +
                         std::to_string(table.rows),
                     file, text.size(), static_cast<long>(table.rows));

  Eigen::MatrixXcd m(out.count(), in.count());
  for (std::size_t r = 0; r < table.rows; ++r) {
    const std::size_t k = r / in.count(), j = r % in.count();
    if (table.at(r, 0) != double(k) || table.at(r, 1) != double(j))
      throw ParseError("record out of order: expected indices " + std::to_string(k) + "," + std::to_string(j), file,
                       table.row_offsets[r], static_cast<long>(r + 1), 1);
    m(k, j) = cplx(table.at(r, 2), table.at(r, 3));
  }
  return {GreensFunction(out, in, std::move(m)), header.value("metadata", json::object())};
}

}  // namespace qfc::io
