#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace hops {

/// Filesystem-level failure (unreadable input, failed write/rename).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed CSV content; carries the 1-based line number.
struct CsvError : std::runtime_error {
  CsvError(const std::string& message, std::size_t line_number)
      : std::runtime_error(message + " (line " +
                           std::to_string(line_number) + ")"),
        line(line_number) {}
  std::size_t line;
};

/// Shortest decimal text that parses back to the same double. Used for
/// every numeric CSV field so files are byte-stable across runs.
std::string format_double(double value);

/// strtod that must consume the whole token; throws CsvError otherwise.
double parse_double(const std::string& token, std::size_t line_number);

std::uint64_t parse_u64(const std::string& token, std::size_t line_number);

/// Write content to `path` via a temp file in the same directory plus
/// rename, so readers never observe a half-written file. Throws IoError.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace hops
