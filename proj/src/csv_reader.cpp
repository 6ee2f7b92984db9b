#include "csv_reader.hpp"

#include <charconv>
#include <fstream>

#include "thzauth/error.hpp"

namespace thzauth::detail {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

namespace {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<CsvRow> read_csv(const std::filesystem::path& path,
                             const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<CsvRow> rows;
  bool header_seen = false;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split(t);
    if (!header_seen) {
      if (fields != expected_header) {
        throw IoError(path.string() + ":" + std::to_string(line_number) +
                      ": unexpected header '" + std::string(t) + "'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != expected_header.size()) {
      throw IoError(path.string() + ":" + std::to_string(line_number) + ": expected " +
                    std::to_string(expected_header.size()) + " fields, got " +
                    std::to_string(fields.size()));
    }
    rows.push_back({line_number, std::move(fields)});
  }
  if (!header_seen) throw IoError(path.string() + ": missing header");
  return rows;
}

double parse_double(const std::string& field, const std::filesystem::path& path,
                    std::size_t line_number) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  // from_chars rejects a leading '+'.
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw IoError(path.string() + ":" + std::to_string(line_number) +
                  ": not a number: '" + field + "'");
  }
  return value;
}

}  // namespace thzauth::detail
