#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qfc::io {

// Shortest decimal that parses back to the same double; "nan", "inf", "-inf"
// for non-finite values.
std::string format_number(double v);

// Parses a complete token. Returns false on anything but a full match.
bool parse_number(std::string_view token, double& out);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Numeric table with a single header line of free-form names. Every record
// must end with a newline, so a file cut short is detected.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<double> values;  // row-major
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_offsets;  // byte offset of every data row

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// `name` labels errors; `base_offset` is added to reported byte offsets when
// the table is embedded after another section of a file.
CsvTable parse_csv(std::string_view text, const std::string& name, std::size_t base_offset = 0);

void append_csv_row(std::string& out, std::span<const double> cells);
void append_csv_header(std::string& out, std::span<const std::string> names);

}  // namespace qfc::io
