#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ecoreport {

/// One disclosure variable: an id (v1..v10 for the shipped set), a label and
/// the phrase alternatives whose occurrences are counted for it.
struct Criterion {
  std::string id;
  std::string label;
  std::vector<std::string> alternatives;
  int max_score = 10;

  friend bool operator==(const Criterion&, const Criterion&) = default;
};

using CriteriaSet = std::vector<Criterion>;

/// The ten search criteria with phrase alternatives transcribed from their
/// "and/or" descriptions. The same content ships as config/criteria.cfg.
CriteriaSet default_criteria();

/// Parses the criteria config:
///
///   # comment
///   [v4]
///   label = Carbon dioxide emissions and/or global warming impact ...
///   max_score = 10
///   carbon dioxide emissions
///   global warming
///
/// Inside a section, `label` and `max_score` are key/value lines; every other
/// non-blank line is one phrase alternative.
CriteriaSet parse_criteria(std::string_view text, std::string_view source = "criteria");
CriteriaSet load_criteria(const std::filesystem::path& path);

/// Renders a set back into the config format accepted by parse_criteria.
std::string format_criteria(const CriteriaSet& criteria);

/// Nonempty set, unique nonempty ids, nonempty alternatives, positive max score.
void validate_criteria(const CriteriaSet& criteria);

std::vector<std::string> criterion_ids(const CriteriaSet& criteria);

}  // namespace ecoreport
