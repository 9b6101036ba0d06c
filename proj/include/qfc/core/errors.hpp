#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qfc {

// Base for every library error. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Caller violated an operation's documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Model applied outside the regime where it is valid.
class ValidityError : public Error {
 public:
  using Error::Error;
};

// Data does not support the requested analysis (e.g. sideband power too low).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// A numerical self-check failed (e.g. lost unitarity).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; carries the location that triggered the failure.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string file, std::size_t byte_offset,
             long row = -1, long column = -1)
      : Error(format(what, file, byte_offset, row, column)),
        file_(std::move(file)),
        byte_offset_(byte_offset),
        row_(row),
        column_(column) {}

  const std::string& file() const { return file_; }
  std::size_t byte_offset() const { return byte_offset_; }
  long row() const { return row_; }
  long column() const { return column_; }

 private:
  static std::string format(const std::string& what, const std::string& file,
                            std::size_t offset, long row, long column) {
    std::string s = file + ": " + what + " (byte offset " + std::to_string(offset);
    if (row >= 0) s += ", row " + std::to_string(row);
    if (column >= 0) s += ", column " + std::to_string(column);
    return s + ")";
  }

  std::string file_;
  std::size_t byte_offset_;
  long row_;
  long column_;
};

// Invalid configuration value; `pointer` is a JSON pointer such as /chain/pre/length.
class ConfigError : public Error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : Error(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace qfc
