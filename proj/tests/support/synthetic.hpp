#pragma once

// Random inputs for property tests. Everything is driven by an explicit
// std::mt19937_64 so failures reproduce from the seed alone.

#include <cctype>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ecoreport/corpus.hpp"
#include "ecoreport/criteria.hpp"
#include "ecoreport/matrix.hpp"
#include "ecoreport/mda.hpp"
#include "ecoreport/text.hpp"

namespace ecoreport::synthetic {

using Rng = std::mt19937_64;

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

// Small vocabulary so phrase alternatives collide and overlap often.
inline const std::vector<std::string>& small_vocabulary() {
  static const std::vector<std::string> words{
      "carbon", "dioxide", "emissions", "human", "rights", "policy", "the", "and",
      "of",     "sales",   "share",     "price", "ceo",   "value",  "a",   "x1"};
  return words;
}

// Random criteria over `vocab`: 1-4 criteria, each with 1-4 alternatives of
// 1-3 words. Deliberately includes prefix-sharing and stop-word phrases.
inline CriteriaSet random_criteria(Rng& rng, const std::vector<std::string>& vocab) {
  CriteriaSet set;
  const std::size_t n = 1 + uniform_index(rng, 4);
  for (std::size_t c = 0; c < n; ++c) {
    Criterion cr;
    cr.id = "c" + std::to_string(c + 1);
    cr.label = cr.id;
    const std::size_t alts = 1 + uniform_index(rng, 4);
    for (std::size_t a = 0; a < alts; ++a) {
      const std::size_t len = 1 + uniform_index(rng, 3);
      std::string phrase;
      for (std::size_t w = 0; w < len; ++w) {
        if (w) phrase += ' ';
        phrase += vocab[uniform_index(rng, vocab.size())];
      }
      cr.alternatives.push_back(phrase);
    }
    set.push_back(std::move(cr));
  }
  return set;
}

// Random stop list drawn from the vocabulary (possibly empty).
inline StopList random_stoplist(Rng& rng, const std::vector<std::string>& vocab) {
  std::vector<std::string> words;
  for (const auto& w : vocab)
    if (std::bernoulli_distribution(0.2)(rng)) words.push_back(w);
  return StopList(std::move(words));
}

inline std::string random_separator(Rng& rng) {
  static const std::vector<std::string> seps{" ", " ", " ", "  ", "\n", ", ", ". ", "-", "'", "\t"};
  return seps[uniform_index(rng, seps.size())];
}

inline std::string random_case(Rng& rng, std::string w) {
  switch (uniform_index(rng, 4)) {
    case 0:
      for (auto& ch : w) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      break;
    case 1:
      if (!w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
      break;
    default:
      break;
  }
  return w;
}

// A document of `tokens` words from `vocab` (with optional plural / -ing
// suffixes so stemming has work to do).
inline std::string random_text(Rng& rng, const std::vector<std::string>& vocab, std::size_t tokens) {
  static const std::vector<std::string> suffixes{"", "", "", "", "s", "es", "ing", "ed"};
  std::string text;
  for (std::size_t i = 0; i < tokens; ++i) {
    if (i) text += random_separator(rng);
    text += random_case(rng, vocab[uniform_index(rng, vocab.size())] +
                                 suffixes[uniform_index(rng, suffixes.size())]);
  }
  return text;
}

inline Corpus random_corpus(Rng& rng, std::size_t docs, std::size_t min_tokens,
                            std::size_t max_tokens, const std::vector<std::string>& vocab) {
  Corpus corpus;
  for (std::size_t d = 0; d < docs; ++d) {
    Document doc;
    doc.report_id = "doc" + std::to_string(d);
    doc.sector = kAllSectors[d % 3];
    doc.language_tag = "en";
    const std::size_t n = std::uniform_int_distribution<std::size_t>(min_tokens, max_tokens)(rng);
    doc.text = random_text(rng, vocab, n);
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

inline Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = normal(rng);
  return m;
}

// A A' + n I: symmetric positive definite and reasonably conditioned.
inline Matrix random_spd(Rng& rng, std::size_t n) {
  const Matrix a = random_matrix(rng, n, n);
  Matrix s = a * a.transposed();
  for (std::size_t i = 0; i < n; ++i) s(i, i) += static_cast<double>(n);
  return s;
}

// `n_per_group` cases per mean vector, spherical noise with SD `sd`.
inline GroupedData gaussian_groups(Rng& rng, const std::vector<std::vector<double>>& means,
                                   std::size_t n_per_group, double sd) {
  GroupedData d;
  const std::size_t p = means.front().size();
  d.x = Matrix(means.size() * n_per_group, p);
  for (std::size_t j = 0; j < p; ++j) d.variable_ids.push_back("x" + std::to_string(j + 1));
  std::size_t row = 0;
  for (std::size_t g = 0; g < means.size(); ++g) {
    d.group_names.push_back("g" + std::to_string(g + 1));
    for (std::size_t i = 0; i < n_per_group; ++i, ++row) {
      for (std::size_t j = 0; j < p; ++j) d.x(row, j) = means[g][j] + sd * normal(rng);
      d.groups.push_back(g);
      d.case_ids.push_back("case" + std::to_string(row));
    }
  }
  return d;
}

}  // namespace ecoreport::synthetic
