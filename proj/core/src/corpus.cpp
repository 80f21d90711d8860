#include "ecoreport/corpus.hpp"

#include <algorithm>
#include <unordered_set>

#include "csv.hpp"
#include "ecoreport/error.hpp"

namespace ecoreport {

std::string_view to_string(Sector s) {
  switch (s) {
    case Sector::primary: return "primary";
    case Sector::secondary: return "secondary";
    case Sector::tertiary: return "tertiary";
  }
  return "unknown";
}

std::optional<Sector> parse_sector(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Sector sec : kAllSectors)
    if (lower == to_string(sec)) return sec;
  return std::nullopt;
}

std::string sanitize_utf8(std::string_view in) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const auto b0 = static_cast<unsigned char>(in[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      out.push_back(static_cast<char>(b0));
      ++i;
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len != 0 && i + len <= in.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(in[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (ok) {
      // Reject overlong forms, surrogates and out-of-range code points.
      static constexpr char32_t kMinForLen[] = {0, 0, 0x80, 0x800, 0x10000};
      ok = cp >= kMinForLen[len] && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
    }
    if (ok) {
      out.append(in.substr(i, len));
      i += len;
    } else {
      out.append(kReplacement);
      ++i;
    }
  }
  return out;
}

std::vector<ManifestRow> parse_manifest(std::string_view csv_text, std::string_view source) {
  const csv::Table t = csv::parse(csv_text, source);
  const std::size_t c_id = t.column("report_id");
  const std::size_t c_sector = t.column("sector");
  const std::size_t c_lang = t.column("language");
  const std::size_t c_path = t.column("path");

  std::vector<ManifestRow> rows;
  rows.reserve(t.rows.size());
  std::unordered_set<std::string> seen;
  for (const auto& r : t.rows) {
    ManifestRow m;
    m.report_id = r[c_id];
    if (m.report_id.empty()) throw ValidationError(std::string(source) + ": empty report_id");
    if (!seen.insert(m.report_id).second)
      throw ValidationError(std::string(source) + ": duplicate report_id '" + m.report_id + "'");
    auto sector = parse_sector(r[c_sector]);
    if (!sector)
      throw ValidationError(std::string(source) + ": unknown sector '" + r[c_sector] +
                            "' for report '" + m.report_id + "'");
    m.sector = *sector;
    m.language = r[c_lang];
    m.path = r[c_path];
    rows.push_back(std::move(m));
  }
  return rows;
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& manifest_path) {
  return parse_manifest(csv::read_text(manifest_path), manifest_path.string());
}

Corpus load_corpus(const std::filesystem::path& root, const std::vector<ManifestRow>& manifest) {
  Corpus corpus;
  corpus.reserve(manifest.size());
  for (const auto& row : manifest) {
    std::filesystem::path p(row.path);
    if (p.is_relative()) p = root / p;
    if (!std::filesystem::is_regular_file(p))
      throw IngestionError("missing report file: " + p.string());
    Document doc;
    doc.report_id = row.report_id;
    doc.sector = row.sector;
    doc.language_tag = row.language;
    doc.text = sanitize_utf8(csv::read_text(p));
    corpus.push_back(std::move(doc));
  }
  validate_corpus(corpus);
  return corpus;
}

void validate_corpus(const Corpus& corpus) {
  std::unordered_set<std::string_view> seen;
  for (const auto& d : corpus) {
    if (d.report_id.empty()) throw ValidationError("document with empty report_id");
    if (!seen.insert(d.report_id).second)
      throw ValidationError("duplicate report_id '" + d.report_id + "'");
  }
}

}  // namespace ecoreport
