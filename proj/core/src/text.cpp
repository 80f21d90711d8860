#include "ecoreport/text.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "ecoreport/error.hpp"

namespace ecoreport {
namespace {

constexpr bool is_alnum(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

constexpr char lower(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Articles, prepositions, conjunctions, pronouns, auxiliaries and a handful
// of very common verbs. Criterion phrases are preprocessed with the same list,
// so words such as "and" inside a phrase simply disappear on both sides.
constexpr std::array kDefaultStopWords = {
    "a",       "an",      "the",     "about",   "above",   "across",  "after",
    "against", "along",   "among",   "around",  "as",      "at",      "before",
    "behind",  "below",   "beneath", "beside",  "between", "beyond",  "by",
    "down",    "during",  "except",  "for",     "from",    "in",      "inside",
    "into",    "near",    "of",      "off",     "on",      "onto",    "out",
    "over",    "per",     "since",   "through", "to",      "toward",  "towards",
    "under",   "until",   "up",      "upon",    "via",     "with",    "within",
    "without", "and",     "or",      "but",     "nor",     "so",      "yet",
    "if",      "than",    "that",    "though",  "although", "because", "while",
    "whether", "i",       "me",      "my",      "mine",    "we",      "us",
    "our",     "ours",    "you",     "your",    "yours",   "he",      "him",
    "his",     "she",     "her",     "hers",    "it",      "its",     "they",
    "them",    "their",   "theirs",  "this",    "these",   "those",   "who",
    "whom",    "whose",   "which",   "what",    "itself",  "themselves",
    "ourselves", "is",    "are",     "was",     "were",    "be",      "been",
    "being",   "am",      "has",     "have",    "had",     "having",  "do",
    "does",    "did",     "doing",   "will",    "would",   "shall",   "should",
    "can",     "could",   "may",     "might",   "must",    "get",     "got",
    "make",    "made",    "take",    "also",    "not",     "no",      "all",
    "any",     "each",    "other",   "such",    "very",    "more",    "most",
};

}  // namespace

StopList::StopList(std::vector<std::string> words) {
  for (auto& w : words) {
    for (auto& ch : w) ch = lower(static_cast<unsigned char>(ch));
    if (!w.empty()) words_.insert(std::move(w));
  }
}

StopList StopList::english_default() {
  return StopList(std::vector<std::string>(kDefaultStopWords.begin(), kDefaultStopWords.end()));
}

StopList StopList::parse(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    words.push_back(line.substr(start));
  }
  return StopList(std::move(words));
}

StopList StopList::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open stop list: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool StopList::contains(std::string_view token) const {
  return words_.contains(std::string(token));
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (unsigned char c : text) {
    if (is_alnum(c)) {
      current.push_back(lower(c));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::string stem(std::string_view token) {
  struct Rule {
    std::string_view suffix;
    std::string_view replacement;
  };
  static constexpr std::array<Rule, 5> kRules{{
      {"ies", "y"}, {"es", ""}, {"s", ""}, {"ing", ""}, {"ed", ""}}};
  for (const auto& rule : kRules) {
    if (!ends_with(token, rule.suffix)) continue;
    const std::size_t residual = token.size() - rule.suffix.size();
    if (residual < 3) continue;
    std::string out(token.substr(0, residual));
    out += rule.replacement;
    return out;
  }
  return std::string(token);
}

std::vector<std::string> preprocess_text(std::string_view text, const PreprocessOptions& opts) {
  auto tokens = tokenize(text);
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (auto& t : tokens) {
    if (opts.stoplist.contains(t)) continue;
    if (opts.stemming) {
      auto s = stem(t);
      if (opts.stoplist.contains(s)) continue;
      out.push_back(std::move(s));
    } else {
      out.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace ecoreport
