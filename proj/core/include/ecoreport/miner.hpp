#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ecoreport/corpus.hpp"
#include "ecoreport/criteria.hpp"
#include "ecoreport/text.hpp"

namespace ecoreport {

struct KeywordRecord {
  std::string keyword;
  std::string file_name;  // report_id

  friend auto operator<=>(const KeywordRecord&, const KeywordRecord&) = default;
};

/// `<keyword, file name>` records. When `sorted` is set the records are in
/// nondecreasing (keyword, file_name) order and binary search is valid.
struct KeywordFile {
  std::vector<KeywordRecord> records;
  bool sorted = false;
  /// Preprocessing the records were produced with; mine_binary reuses it for
  /// phrase adjacency checks and for preprocessing the criterion phrases.
  PreprocessOptions options;
};

/// report x criterion occurrence counts, in corpus and criteria order.
class FrequencyTable {
 public:
  FrequencyTable() = default;
  FrequencyTable(std::vector<std::string> report_ids, std::vector<std::string> criterion_ids);

  const std::vector<std::string>& report_ids() const noexcept { return reports_; }
  const std::vector<std::string>& criterion_ids() const noexcept { return criteria_; }

  std::uint64_t at(std::size_t report, std::size_t criterion) const {
    return counts_[report * criteria_.size() + criterion];
  }
  std::uint64_t& at(std::size_t report, std::size_t criterion) {
    return counts_[report * criteria_.size() + criterion];
  }
  /// Lookup by ids; throws ValidationError if either is unknown.
  std::uint64_t count(std::string_view report_id, std::string_view criterion_id) const;

  friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;

 private:
  std::vector<std::string> reports_;
  std::vector<std::string> criteria_;
  std::vector<std::uint64_t> counts_;
};

/// Per-document token stream after preprocessing.
TokenSequence preprocess(const Document& doc, const StopList& stoplist, bool stemming);

/// One record per surviving token occurrence, sorted by (keyword, file_name);
/// ties keep original text order (stable sort).
KeywordFile build_sorted_keyword_file(const Corpus& corpus, const StopList& stoplist,
                                      bool stemming);

/// Sequential strategy: scan each document's token sequence left to right,
/// at each position trying the criterion's alternatives longest first;
/// matches do not overlap.
FrequencyTable mine_linear(const Corpus& corpus, const CriteriaSet& criteria,
                           const StopList& stoplist, bool stemming, unsigned threads = 1);

/// Keyword-file strategy. First tokens of the alternatives are located by
/// binary search over the sorted records; single-token alternatives are
/// counted from the record ranges directly, multi-token alternatives are
/// confirmed against the document's token sequence. Produces exactly the
/// table mine_linear produces. Throws PreconditionError if !kwfile.sorted.
FrequencyTable mine_binary(const KeywordFile& kwfile, const Corpus& corpus,
                           const CriteriaSet& criteria, unsigned threads = 1);

/// Counts non-overlapping greedy matches of `alternatives` (already
/// preprocessed into token lists) in `tokens`.
std::uint64_t count_phrase_matches(const std::vector<std::string>& tokens,
                                   const std::vector<std::vector<std::string>>& alternatives);

/// Criterion phrases run through the same preprocessing as the documents,
/// deduplicated, sorted longest first (ties lexicographic). Phrases that
/// preprocess to nothing are dropped.
std::vector<std::vector<std::string>> compile_alternatives(const Criterion& c,
                                                           const PreprocessOptions& opts);

// keyword<TAB>report_id per line, LF terminated.
std::string format_keyword_file(const KeywordFile& kw);
void write_keyword_file(const std::filesystem::path& path, const KeywordFile& kw);
/// Reads records back; `sorted` is set only if the order actually holds.
KeywordFile read_keyword_file(const std::filesystem::path& path, PreprocessOptions options);

// CSV with header `report_id,<criterion ids...>`.
std::string format_frequency_csv(const FrequencyTable& t);
FrequencyTable parse_frequency_csv(std::string_view text, std::string_view source = "frequencies");
void write_frequency_csv(const std::filesystem::path& path, const FrequencyTable& t);
FrequencyTable read_frequency_csv(const std::filesystem::path& path);

}  // namespace ecoreport
