#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ecoreport/scoring.hpp"

namespace ecoreport {

/// Observations with an integer group label in [0, group_count).
struct GroupedSample {
  std::vector<double> values;
  std::vector<std::size_t> groups;
  std::size_t group_count = 0;
};

struct AnovaRow {
  std::string variable_id;
  std::vector<double> group_means;  // indexed by group label
  double grand_mean = 0.0;
  double ss_between = 0.0;
  double ss_within = 0.0;
  std::size_t df_between = 0;
  std::size_t df_within = 0;
  double f = 0.0;
  double p = 1.0;
  bool significant_at_05 = false;
  /// Zero within-group variance: F and p are NaN, not significant.
  bool degenerate = false;
};

/// Requires >= 2 groups with >= 2 observations each. Throws
/// DegenerateVarianceError when the within-group sum of squares is zero.
AnovaRow one_way_anova(const GroupedSample& sample, std::string variable_id = {});

/// One row per criterion column of the cards, with groups indexed by sector
/// (primary, secondary, tertiary). All three sectors must be present.
/// Degenerate variables yield a row with `degenerate` set instead of throwing.
std::vector<AnovaRow> anova_table(const std::vector<ScoreCard>& cards);

// CSV header `variable,mean_primary,mean_secondary,mean_tertiary,grand_mean,F,p,sig`.
std::string format_anova_csv(const std::vector<AnovaRow>& rows);
std::vector<AnovaRow> parse_anova_csv(std::string_view text, std::string_view source = "anova");
void write_anova_csv(const std::filesystem::path& path, const std::vector<AnovaRow>& rows);
std::vector<AnovaRow> read_anova_csv(const std::filesystem::path& path);

}  // namespace ecoreport
