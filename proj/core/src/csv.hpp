#pragma once

// Minimal CSV support shared by the readers/writers in this library:
// comma separator, mandatory header, LF line endings, RFC 4180 quoting.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ecoreport::csv {

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;
  std::size_t column(std::string_view name) const;  // throws if absent
};

Row split_line(std::string_view line);
std::string escape(std::string_view field);
std::string join(const Row& fields);

/// Parses text; rows whose width differs from the header are rejected with
/// the 1-based line number. `source` names the input in error messages.
Table parse(std::string_view text, std::string_view source);
Table read_file(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

long long parse_int(std::string_view s, std::string_view context);
double parse_double(std::string_view s, std::string_view context);

}  // namespace ecoreport::csv
