#include "ecoreport/miner.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "csv.hpp"
#include "ecoreport/error.hpp"
#include "parallel.hpp"

namespace ecoreport {

FrequencyTable::FrequencyTable(std::vector<std::string> report_ids,
                               std::vector<std::string> criterion_ids)
    : reports_(std::move(report_ids)),
      criteria_(std::move(criterion_ids)),
      counts_(reports_.size() * criteria_.size(), 0) {}

std::uint64_t FrequencyTable::count(std::string_view report_id,
                                    std::string_view criterion_id) const {
  const auto r = std::find(reports_.begin(), reports_.end(), report_id);
  const auto c = std::find(criteria_.begin(), criteria_.end(), criterion_id);
  if (r == reports_.end()) throw ValidationError("unknown report '" + std::string(report_id) + "'");
  if (c == criteria_.end())
    throw ValidationError("unknown criterion '" + std::string(criterion_id) + "'");
  return at(static_cast<std::size_t>(r - reports_.begin()),
            static_cast<std::size_t>(c - criteria_.begin()));
}

TokenSequence preprocess(const Document& doc, const StopList& stoplist, bool stemming) {
  return {preprocess_text(doc.text, PreprocessOptions{stoplist, stemming}), doc.report_id};
}

std::vector<std::vector<std::string>> compile_alternatives(const Criterion& c,
                                                           const PreprocessOptions& opts) {
  std::set<std::vector<std::string>> unique;
  for (const auto& phrase : c.alternatives) {
    auto toks = preprocess_text(phrase, opts);
    if (!toks.empty()) unique.insert(std::move(toks));
  }
  std::vector<std::vector<std::string>> out(unique.begin(), unique.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return out;
}

namespace {

bool matches_at(const std::vector<std::string>& tokens, std::size_t pos,
                const std::vector<std::string>& alt) {
  if (pos + alt.size() > tokens.size()) return false;
  return std::equal(alt.begin(), alt.end(), tokens.begin() + static_cast<std::ptrdiff_t>(pos));
}

// Longest alternative matching at `pos`, or 0.
std::size_t match_length(const std::vector<std::string>& tokens, std::size_t pos,
                         const std::vector<std::vector<std::string>>& alternatives) {
  for (const auto& alt : alternatives)
    if (matches_at(tokens, pos, alt)) return alt.size();
  return 0;
}

std::vector<std::vector<std::vector<std::string>>> compile_all(const CriteriaSet& criteria,
                                                               const PreprocessOptions& opts) {
  std::vector<std::vector<std::vector<std::string>>> out;
  out.reserve(criteria.size());
  for (const auto& c : criteria) out.push_back(compile_alternatives(c, opts));
  return out;
}

std::vector<std::string> ids_of(const Corpus& corpus) {
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const auto& d : corpus) ids.push_back(d.report_id);
  return ids;
}

}  // namespace

std::uint64_t count_phrase_matches(const std::vector<std::string>& tokens,
                                   const std::vector<std::vector<std::string>>& alternatives) {
  std::uint64_t count = 0;
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    const std::size_t len = match_length(tokens, pos, alternatives);
    if (len > 0) {
      ++count;
      pos += len;
    } else {
      ++pos;
    }
  }
  return count;
}

KeywordFile build_sorted_keyword_file(const Corpus& corpus, const StopList& stoplist,
                                      bool stemming) {
  KeywordFile kw;
  kw.options = PreprocessOptions{stoplist, stemming};
  std::vector<std::vector<std::string>> per_doc(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i)
    per_doc[i] = preprocess_text(corpus[i].text, kw.options);
  std::size_t total = 0;
  for (const auto& toks : per_doc) total += toks.size();
  kw.records.reserve(total);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (auto& t : per_doc[i]) kw.records.push_back({std::move(t), corpus[i].report_id});
  std::stable_sort(kw.records.begin(), kw.records.end());
  kw.sorted = true;
  return kw;
}

FrequencyTable mine_linear(const Corpus& corpus, const CriteriaSet& criteria,
                           const StopList& stoplist, bool stemming, unsigned threads) {
  validate_criteria(criteria);
  const PreprocessOptions opts{stoplist, stemming};
  const auto compiled = compile_all(criteria, opts);
  FrequencyTable table(ids_of(corpus), criterion_ids(criteria));

  detail::parallel_for(corpus.size(), threads, [&](std::size_t d) {
    const auto tokens = preprocess_text(corpus[d].text, opts);
    for (std::size_t c = 0; c < compiled.size(); ++c)
      table.at(d, c) = count_phrase_matches(tokens, compiled[c]);
  });
  return table;
}

FrequencyTable mine_binary(const KeywordFile& kwfile, const Corpus& corpus,
                           const CriteriaSet& criteria, unsigned threads) {
  if (!kwfile.sorted)
    throw PreconditionError("mine_binary: keyword file is not sorted; binary search requires it");
  validate_criteria(criteria);
  const auto compiled = compile_all(criteria, kwfile.options);
  FrequencyTable table(ids_of(corpus), criterion_ids(criteria));
  const auto& records = kwfile.records;

  // Number of records equal to (keyword, report_id).
  auto hits = [&](const std::string& keyword, const std::string& report_id) {
    const KeywordRecord key{keyword, report_id};
    const auto [lo, hi] = std::equal_range(records.begin(), records.end(), key);
    return static_cast<std::uint64_t>(hi - lo);
  };

  detail::parallel_for(corpus.size(), threads, [&](std::size_t d) {
    const Document& doc = corpus[d];
    std::vector<std::string> tokens;
    bool have_tokens = false;
    std::unordered_map<std::string_view, std::vector<std::size_t>> positions;

    for (std::size_t c = 0; c < compiled.size(); ++c) {
      const auto& alts = compiled[c];
      bool single_only = true;
      bool any_hit = false;
      std::uint64_t single_total = 0;
      std::set<std::string_view> first_words;
      for (const auto& alt : alts) {
        if (alt.size() > 1) single_only = false;
        if (!first_words.insert(alt.front()).second) continue;
        const auto n = hits(alt.front(), doc.report_id);
        any_hit = any_hit || n > 0;
        single_total += n;
      }
      if (!any_hit) continue;
      if (single_only) {
        // Distinct single tokens never overlap, so every occurrence counts.
        table.at(d, c) = single_total;
        continue;
      }

      if (!have_tokens) {
        tokens = preprocess_text(doc.text, kwfile.options);
        for (std::size_t i = 0; i < tokens.size(); ++i) positions[tokens[i]].push_back(i);
        have_tokens = true;
      }
      std::vector<std::size_t> candidates;
      for (auto w : first_words) {
        const auto it = positions.find(w);
        if (it != positions.end())
          candidates.insert(candidates.end(), it->second.begin(), it->second.end());
      }
      std::sort(candidates.begin(), candidates.end());

      std::uint64_t count = 0;
      std::size_t next_free = 0;
      for (std::size_t pos : candidates) {
        if (pos < next_free) continue;
        const std::size_t len = match_length(tokens, pos, alts);
        if (len > 0) {
          ++count;
          next_free = pos + len;
        }
      }
      table.at(d, c) = count;
    }
  });
  return table;
}

std::string format_keyword_file(const KeywordFile& kw) {
  std::string out;
  for (const auto& r : kw.records) {
    out += r.keyword;
    out += '\t';
    out += r.file_name;
    out += '\n';
  }
  return out;
}

void write_keyword_file(const std::filesystem::path& path, const KeywordFile& kw) {
  csv::write_file(path, format_keyword_file(kw));
}

KeywordFile read_keyword_file(const std::filesystem::path& path, PreprocessOptions options) {
  const std::string text = csv::read_text(path);
  KeywordFile kw;
  kw.options = std::move(options);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0)
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": expected keyword<TAB>report_id");
    kw.records.push_back({std::string(line.substr(0, tab)), std::string(line.substr(tab + 1))});
  }
  kw.sorted = std::is_sorted(kw.records.begin(), kw.records.end());
  return kw;
}

std::string format_frequency_csv(const FrequencyTable& t) {
  csv::Row header{"report_id"};
  for (const auto& c : t.criterion_ids()) header.push_back(c);
  std::string out = csv::join(header) + "\n";
  for (std::size_t r = 0; r < t.report_ids().size(); ++r) {
    csv::Row row{t.report_ids()[r]};
    for (std::size_t c = 0; c < t.criterion_ids().size(); ++c)
      row.push_back(std::to_string(t.at(r, c)));
    out += csv::join(row) + "\n";
  }
  return out;
}

FrequencyTable parse_frequency_csv(std::string_view text, std::string_view source) {
  const csv::Table t = csv::parse(text, source);
  if (t.header.empty() || t.header.front() != "report_id")
    throw ValidationError(std::string(source) + ": first column must be report_id");
  std::vector<std::string> reports;
  for (const auto& r : t.rows) reports.push_back(r[0]);
  FrequencyTable table(std::move(reports),
                       std::vector<std::string>(t.header.begin() + 1, t.header.end()));
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 1; c < t.header.size(); ++c) {
      const long long v = csv::parse_int(t.rows[r][c], source);
      if (v < 0) throw ValidationError(std::string(source) + ": negative frequency");
      table.at(r, c - 1) = static_cast<std::uint64_t>(v);
    }
  return table;
}

void write_frequency_csv(const std::filesystem::path& path, const FrequencyTable& t) {
  csv::write_file(path, format_frequency_csv(t));
}

FrequencyTable read_frequency_csv(const std::filesystem::path& path) {
  return parse_frequency_csv(csv::read_text(path), path.string());
}

}  // namespace ecoreport
