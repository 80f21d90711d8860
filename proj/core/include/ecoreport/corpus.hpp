#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecoreport {

enum class Sector { primary, secondary, tertiary };

inline constexpr std::array<Sector, 3> kAllSectors{Sector::primary, Sector::secondary,
                                                   Sector::tertiary};

std::string_view to_string(Sector s);
/// Accepts "primary", "secondary", "tertiary" (case-insensitive).
std::optional<Sector> parse_sector(std::string_view s);
inline std::size_t sector_index(Sector s) { return static_cast<std::size_t>(s); }

struct Document {
  std::string report_id;
  Sector sector = Sector::primary;
  std::string language_tag;
  std::string text;
};

using Corpus = std::vector<Document>;

/// One row of the corpus manifest (`report_id,sector,language,path`).
struct ManifestRow {
  std::string report_id;
  Sector sector = Sector::primary;
  std::string language;
  std::string path;
};

/// Parses manifest CSV text. Unknown sectors and duplicate report ids are
/// validation errors.
std::vector<ManifestRow> parse_manifest(std::string_view csv_text, std::string_view source = "manifest");
std::vector<ManifestRow> read_manifest(const std::filesystem::path& manifest_path);

/// Reads each manifest row's text file, resolving relative paths against
/// `root`. Invalid UTF-8 is replaced with U+FFFD.
Corpus load_corpus(const std::filesystem::path& root, const std::vector<ManifestRow>& manifest);

/// Replaces every invalid UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

/// Throws ValidationError if a report id is empty or repeated.
void validate_corpus(const Corpus& corpus);

}  // namespace ecoreport
