#include "hops/io_util.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <system_error>

namespace hops {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, std::size_t line_number) {
  if (token.empty()) throw CsvError("empty numeric field", line_number);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size())
    throw CsvError("malformed number '" + token + "'", line_number);
  if (errno == ERANGE && !std::isfinite(v))
    throw CsvError("number out of range '" + token + "'", line_number);
  if (!std::isfinite(v))
    throw CsvError("non-finite value '" + token + "'", line_number);
  return v;
}

std::uint64_t parse_u64(const std::string& token, std::size_t line_number) {
  if (token.empty() || token[0] == '-' || token[0] == '+')
    throw CsvError("malformed count '" + token + "'", line_number);
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(token.c_str(), &end, 10);
  if (end != token.c_str() + token.size() || errno == ERANGE)
    throw CsvError("malformed count '" + token + "'", line_number);
  return static_cast<std::uint64_t>(v);
}

void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target = path;
  fs::path dir = target.parent_path();
  if (!dir.empty()) {
    std::error_code ec;
    fs::create_directories(dir, ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ec2;
    fs::remove(tmp, ec2);
    throw IoError("cannot move '" + tmp.string() + "' to '" +
                  target.string() + "': " + ec.message());
  }
}

}  // namespace hops
