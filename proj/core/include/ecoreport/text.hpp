#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ecoreport {

/// Exact-match set of lowercase words removed after tokenization.
class StopList {
 public:
  StopList() = default;
  explicit StopList(std::vector<std::string> words);

  /// Articles, prepositions, conjunctions, pronouns and common verbs.
  static StopList english_default();
  /// One word per line; blank lines and lines starting with '#' ignored.
  static StopList load(const std::filesystem::path& path);
  static StopList parse(std::string_view text);

  bool contains(std::string_view token) const;
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }

 private:
  std::unordered_set<std::string> words_;
};

struct PreprocessOptions {
  StopList stoplist;
  bool stemming = false;
};

struct TokenSequence {
  std::vector<std::string> tokens;
  std::string source_id;
};

/// Lowercases ASCII letters and splits on every byte that is not [A-Za-z0-9].
std::vector<std::string> tokenize(std::string_view text);

/// Minimal suffix stripper: the first of "ies"->"y", "es", "s", "ing", "ed"
/// that leaves a stem of at least 3 characters is removed.
std::string stem(std::string_view token);

/// tokenize -> drop stop words -> optional stem (a stem that lands on a stop
/// word is dropped as well). Order preserved.
std::vector<std::string> preprocess_text(std::string_view text, const PreprocessOptions& opts);

}  // namespace ecoreport
