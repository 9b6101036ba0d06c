#include "qfc/io/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qfc/core/errors.hpp"

namespace qfc::io {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

bool parse_number(std::string_view token, double& out) {
  if (token.empty()) return false;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file", path.string(), 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed for " + path.string());
}

namespace {

struct Line {
  std::string_view text;
  std::size_t offset;
};

// Splits off the next newline-terminated record starting at `pos`.
bool next_line(std::string_view text, std::size_t& pos, Line& line, const std::string& name, std::size_t base) {
  if (pos >= text.size()) return false;
  const std::size_t nl = text.find('\n', pos);
  if (nl == std::string_view::npos)
    throw ParseError("truncated record: missing line terminator", name, base + text.size());
  std::string_view s = text.substr(pos, nl - pos);
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  line = {s, pos};
  pos = nl + 1;
  return true;
}

template <class F>
void for_each_cell(std::string_view s, F&& f) {
  std::size_t start = 0, col = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    const std::string_view cell = s.substr(start, comma == std::string_view::npos ? s.size() - start : comma - start);
    f(col++, cell, start);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
}

}  // namespace

CsvTable parse_csv(std::string_view text, const std::string& name, std::size_t base_offset) {
  CsvTable t;
  std::size_t pos = 0;
  Line line;
  if (!next_line(text, pos, line, name, base_offset)) throw ParseError("empty table: missing header", name, base_offset);
  for_each_cell(line.text, [&](std::size_t, std::string_view cell, std::size_t) { t.header.emplace_back(cell); });
  t.cols = t.header.size();
  long row = 0;
  while (next_line(text, pos, line, name, base_offset)) {
    ++row;
    if (line.text.empty()) throw ParseError("empty record", name, base_offset + line.offset, row);
    std::size_t n = 0;
    for_each_cell(line.text, [&](std::size_t col, std::string_view cell, std::size_t at) {
      double v = 0.0;
      if (col >= t.cols)
        throw ParseError("too many fields", name, base_offset + line.offset + at, row, static_cast<long>(col + 1));
      if (!parse_number(cell, v))
        throw ParseError("not a number: '" + std::string(cell) + "'", name, base_offset + line.offset + at, row,
                         static_cast<long>(col + 1));
      t.values.push_back(v);
      ++n;
    });
    if (n != t.cols)
      throw ParseError("expected " + std::to_string(t.cols) + " fields, found " + std::to_string(n), name,
                       base_offset + line.offset + line.text.size(), row, static_cast<long>(n + 1));
    t.row_offsets.push_back(base_offset + line.offset);
  }
  t.rows = static_cast<std::size_t>(row);
  return t;
}

void append_csv_row(std::string& out, std::span<const double> cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += format_number(cells[i]);
  }
  out += '\n';
}

void append_csv_header(std::string& out, std::span<const std::string> names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ',';
    out += names[i];
  }
  out += '\n';
}

}  // namespace qfc::io
