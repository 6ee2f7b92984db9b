#pragma once

// Minimal reader for the comma-separated fixture formats: one header row,
// `#` comment lines and blank lines skipped, no quoting.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace thzauth::detail {

struct CsvRow {
  std::size_t line_number;
  std::vector<std::string> fields;
};

/// Reads `path`, checks the header matches `expected_header` column for
/// column and returns the data rows. Throws IoError on any mismatch.
std::vector<CsvRow> read_csv(const std::filesystem::path& path,
                             const std::vector<std::string>& expected_header);

/// Parses a full field as a double; throws IoError naming the location.
double parse_double(const std::string& field, const std::filesystem::path& path,
                    std::size_t line_number);

std::string_view trim(std::string_view s);

}  // namespace thzauth::detail
