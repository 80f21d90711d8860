#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ecoreport/corpus.hpp"
#include "ecoreport/criteria.hpp"
#include "ecoreport/miner.hpp"

namespace ecoreport {

struct RatingBand {
  std::int64_t lower_bound;  // inclusive
  int score;
  std::string label;
};

/// Frequency-to-score bands. Bands are ordered from the highest lower bound
/// down to 1 and cover every positive integer; zero scores 0.
class RatingScale {
 public:
  explicit RatingScale(std::vector<RatingBand> bands);

  /// >=75 -> 10 Very strong, 50-74 -> 7 Strong, 20-49 -> 5 Moderate,
  /// 5-19 -> 3 Weak, 1-4 -> 1 Very weak.
  static const RatingScale& standard();

  int rate(std::int64_t freq) const;
  std::string_view label(std::int64_t freq) const;
  const std::vector<RatingBand>& bands() const noexcept { return bands_; }

 private:
  std::vector<RatingBand> bands_;
};

/// Standard scale; negative input is a ValidationError.
int rate_frequency(std::int64_t freq);

struct ScoreCard {
  std::string report_id;
  Sector sector = Sector::primary;
  std::vector<std::string> criterion_ids;
  std::vector<std::uint64_t> frequencies;
  std::vector<int> scores;

  friend bool operator==(const ScoreCard&, const ScoreCard&) = default;
};

struct ReportMeta {
  Sector sector = Sector::primary;
  std::string language;
};

using CorpusMeta = std::map<std::string, ReportMeta, std::less<>>;

CorpusMeta corpus_meta(const Corpus& corpus);
CorpusMeta corpus_meta(const std::vector<ManifestRow>& manifest);

/// One card per report row of `freq`, in table order. The table's criterion
/// columns must match `criteria` ids in order.
std::vector<ScoreCard> build_scorecards(const FrequencyTable& freq, const CorpusMeta& meta,
                                        const CriteriaSet& criteria,
                                        const RatingScale& scale = RatingScale::standard());

enum class EliminationRule {
  conjunction,  // foreign language AND zero frequency on every criterion
  disjunction,  // foreign language OR zero frequency on every criterion
};

struct FilterOptions {
  std::string analysis_language = "en";
  EliminationRule rule = EliminationRule::conjunction;
};

/// Drops cards per the elimination rule; survivors keep input order. A
/// card's language is looked up in `meta` (missing entry = validation error).
std::vector<ScoreCard> filter_sample(const std::vector<ScoreCard>& cards, const CorpusMeta& meta,
                                     const FilterOptions& opts = {});

struct SectorShare {
  Sector sector;
  std::size_t count;
  double percentage;  // 100 * count / total, rounded to 2 decimals
};

/// Always three entries in primary/secondary/tertiary order.
std::vector<SectorShare> sector_composition(const std::vector<ScoreCard>& cards);

// CSV header `report_id,sector,<id>_freq...,<id>_score...`.
std::string format_scorecard_csv(const std::vector<ScoreCard>& cards);
std::vector<ScoreCard> parse_scorecard_csv(std::string_view text,
                                           std::string_view source = "scorecards");
void write_scorecard_csv(const std::filesystem::path& path, const std::vector<ScoreCard>& cards);
std::vector<ScoreCard> read_scorecard_csv(const std::filesystem::path& path);

}  // namespace ecoreport
