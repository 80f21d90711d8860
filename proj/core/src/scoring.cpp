#include "ecoreport/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "csv.hpp"
#include "ecoreport/error.hpp"

namespace ecoreport {

RatingScale::RatingScale(std::vector<RatingBand> bands) : bands_(std::move(bands)) {
  if (bands_.empty()) throw ValidationError("rating scale has no bands");
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    if (i > 0) {
      if (bands_[i].lower_bound >= bands_[i - 1].lower_bound)
        throw ValidationError("rating bands must have strictly decreasing lower bounds");
      if (bands_[i].score >= bands_[i - 1].score)
        throw ValidationError("rating band scores must strictly decrease");
    }
  }
  if (bands_.back().lower_bound != 1)
    throw ValidationError("lowest rating band must start at frequency 1");
  if (bands_.back().score <= 0) throw ValidationError("rating band scores must be positive");
}

const RatingScale& RatingScale::standard() {
  static const RatingScale scale({
      {75, 10, "Very strong"},
      {50, 7, "Strong"},
      {20, 5, "Moderate"},
      {5, 3, "Weak"},
      {1, 1, "Very weak"},
  });
  return scale;
}

int RatingScale::rate(std::int64_t freq) const {
  if (freq < 0) throw ValidationError("frequency must be nonnegative, got " + std::to_string(freq));
  for (const auto& b : bands_)
    if (freq >= b.lower_bound) return b.score;
  return 0;
}

std::string_view RatingScale::label(std::int64_t freq) const {
  if (freq < 0) throw ValidationError("frequency must be nonnegative, got " + std::to_string(freq));
  for (const auto& b : bands_)
    if (freq >= b.lower_bound) return b.label;
  return "None";
}

int rate_frequency(std::int64_t freq) { return RatingScale::standard().rate(freq); }

CorpusMeta corpus_meta(const Corpus& corpus) {
  CorpusMeta m;
  for (const auto& d : corpus) m[d.report_id] = {d.sector, d.language_tag};
  return m;
}

CorpusMeta corpus_meta(const std::vector<ManifestRow>& manifest) {
  CorpusMeta m;
  for (const auto& r : manifest) m[r.report_id] = {r.sector, r.language};
  return m;
}

std::vector<ScoreCard> build_scorecards(const FrequencyTable& freq, const CorpusMeta& meta,
                                        const CriteriaSet& criteria, const RatingScale& scale) {
  const auto ids = criterion_ids(criteria);
  if (ids != freq.criterion_ids())
    throw ValidationError("frequency table columns do not match the criteria set");

  std::vector<ScoreCard> cards;
  cards.reserve(freq.report_ids().size());
  for (std::size_t r = 0; r < freq.report_ids().size(); ++r) {
    const auto& id = freq.report_ids()[r];
    const auto it = meta.find(id);
    if (it == meta.end())
      throw ValidationError("report '" + id + "' is missing from the corpus metadata");
    ScoreCard card;
    card.report_id = id;
    card.sector = it->second.sector;
    card.criterion_ids = ids;
    for (std::size_t c = 0; c < ids.size(); ++c) {
      const auto f = freq.at(r, c);
      const int s = scale.rate(static_cast<std::int64_t>(f));
      card.frequencies.push_back(f);
      card.scores.push_back(std::min(s, criteria[c].max_score));
    }
    cards.push_back(std::move(card));
  }
  return cards;
}

std::vector<ScoreCard> filter_sample(const std::vector<ScoreCard>& cards, const CorpusMeta& meta,
                                     const FilterOptions& opts) {
  std::vector<ScoreCard> out;
  out.reserve(cards.size());
  for (const auto& card : cards) {
    const auto it = meta.find(card.report_id);
    if (it == meta.end())
      throw ValidationError("report '" + card.report_id + "' is missing from the corpus metadata");
    const bool foreign = it->second.language != opts.analysis_language;
    const bool all_zero = std::all_of(card.frequencies.begin(), card.frequencies.end(),
                                      [](std::uint64_t f) { return f == 0; });
    const bool drop = opts.rule == EliminationRule::conjunction ? (foreign && all_zero)
                                                                : (foreign || all_zero);
    if (!drop) out.push_back(card);
  }
  return out;
}

std::vector<SectorShare> sector_composition(const std::vector<ScoreCard>& cards) {
  if (cards.empty()) throw ValidationError("sector_composition: no scorecards");
  std::array<std::size_t, 3> counts{};
  for (const auto& c : cards) ++counts[sector_index(c.sector)];
  std::vector<SectorShare> out;
  for (Sector s : kAllSectors) {
    const std::size_t n = counts[sector_index(s)];
    const double pct = 100.0 * static_cast<double>(n) / static_cast<double>(cards.size());
    out.push_back({s, n, std::round(pct * 100.0) / 100.0});
  }
  return out;
}

std::string format_scorecard_csv(const std::vector<ScoreCard>& cards) {
  std::vector<std::string> ids;
  if (!cards.empty()) ids = cards.front().criterion_ids;
  csv::Row header{"report_id", "sector"};
  for (const auto& id : ids) header.push_back(id + "_freq");
  for (const auto& id : ids) header.push_back(id + "_score");
  std::string out = csv::join(header) + "\n";
  for (const auto& card : cards) {
    if (card.criterion_ids != ids)
      throw ValidationError("scorecards disagree on criterion columns");
    csv::Row row{card.report_id, std::string(to_string(card.sector))};
    for (auto f : card.frequencies) row.push_back(std::to_string(f));
    for (auto s : card.scores) row.push_back(std::to_string(s));
    out += csv::join(row) + "\n";
  }
  return out;
}

std::vector<ScoreCard> parse_scorecard_csv(std::string_view text, std::string_view source) {
  const csv::Table t = csv::parse(text, source);
  const std::string src(source);
  if (t.header.size() < 2 || t.header[0] != "report_id" || t.header[1] != "sector" ||
      (t.header.size() - 2) % 2 != 0)
    throw ValidationError(src + ": expected report_id,sector,<id>_freq...,<id>_score...");
  const std::size_t k = (t.header.size() - 2) / 2;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < k; ++i) {
    const std::string& f = t.header[2 + i];
    const std::string& s = t.header[2 + k + i];
    if (f.size() < 6 || !f.ends_with("_freq"))
      throw ValidationError(src + ": bad frequency column '" + f + "'");
    const std::string id = f.substr(0, f.size() - 5);
    if (s != id + "_score") throw ValidationError(src + ": bad score column '" + s + "'");
    ids.push_back(id);
  }
  std::vector<ScoreCard> cards;
  for (const auto& r : t.rows) {
    ScoreCard card;
    card.report_id = r[0];
    const auto sector = parse_sector(r[1]);
    if (!sector) throw ValidationError(src + ": unknown sector '" + r[1] + "'");
    card.sector = *sector;
    card.criterion_ids = ids;
    for (std::size_t i = 0; i < k; ++i) {
      const long long f = csv::parse_int(r[2 + i], src);
      if (f < 0) throw ValidationError(src + ": negative frequency");
      card.frequencies.push_back(static_cast<std::uint64_t>(f));
      card.scores.push_back(static_cast<int>(csv::parse_int(r[2 + k + i], src)));
    }
    cards.push_back(std::move(card));
  }
  return cards;
}

void write_scorecard_csv(const std::filesystem::path& path, const std::vector<ScoreCard>& cards) {
  csv::write_file(path, format_scorecard_csv(cards));
}

std::vector<ScoreCard> read_scorecard_csv(const std::filesystem::path& path) {
  return parse_scorecard_csv(csv::read_text(path), path.string());
}

}  // namespace ecoreport
