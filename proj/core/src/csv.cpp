#include "csv.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "ecoreport/error.hpp"

namespace ecoreport::csv {

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ValidationError("missing CSV column '" + std::string(name) + "'");
}

Row split_line(std::string_view line) {
  Row out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ValidationError("unterminated quoted CSV field");
  out.push_back(std::move(field));
  return out;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const Row& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

Table parse(std::string_view text, std::string_view source) {
  Table t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    Row row = split_line(line);
    if (!have_header) {
      t.header = std::move(row);
      have_header = true;
      continue;
    }
    if (row.size() != t.header.size())
      throw ValidationError(std::string(source) + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(t.header.size()) + " fields, found " +
                            std::to_string(row.size()));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw ValidationError(std::string(source) + ": missing CSV header");
  return t;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Table read_file(const std::filesystem::path& path) {
  return parse(read_text(path), path.string());
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestionError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IngestionError("write failed for " + path.string());
}

long long parse_int(std::string_view s, std::string_view context) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ValidationError(std::string(context) + ": not an integer: '" + std::string(s) + "'");
  return v;
}

double parse_double(std::string_view s, std::string_view context) {
  if (s == "NA" || s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ValidationError(std::string(context) + ": not a number: '" + std::string(s) + "'");
  return v;
}

}  // namespace ecoreport::csv
