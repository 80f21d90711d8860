#include "ecoreport/anova.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "csv.hpp"
#include "ecoreport/distributions.hpp"
#include "ecoreport/error.hpp"

namespace ecoreport {

AnovaRow one_way_anova(const GroupedSample& sample, std::string variable_id) {
  const std::size_t g = sample.group_count;
  if (sample.values.size() != sample.groups.size())
    throw ValidationError("one_way_anova: values and group labels differ in length");
  if (g < 2) throw ValidationError("one_way_anova: at least two groups are required");

  std::vector<std::size_t> n(g, 0);
  std::vector<double> sum(g, 0.0);
  for (std::size_t i = 0; i < sample.values.size(); ++i) {
    const std::size_t k = sample.groups[i];
    if (k >= g) throw ValidationError("one_way_anova: group label out of range");
    ++n[k];
    sum[k] += sample.values[i];
  }
  for (std::size_t k = 0; k < g; ++k)
    if (n[k] < 2)
      throw ValidationError("one_way_anova: group " + std::to_string(k) +
                            " has fewer than two observations");

  AnovaRow row;
  row.variable_id = std::move(variable_id);
  const auto total_n = static_cast<double>(sample.values.size());
  double grand_sum = 0.0;
  for (double s : sum) grand_sum += s;
  row.grand_mean = grand_sum / total_n;
  row.group_means.resize(g);
  for (std::size_t k = 0; k < g; ++k) row.group_means[k] = sum[k] / static_cast<double>(n[k]);

  for (std::size_t k = 0; k < g; ++k) {
    const double d = row.group_means[k] - row.grand_mean;
    row.ss_between += static_cast<double>(n[k]) * d * d;
  }
  for (std::size_t i = 0; i < sample.values.size(); ++i) {
    const double d = sample.values[i] - row.group_means[sample.groups[i]];
    row.ss_within += d * d;
  }
  row.df_between = g - 1;
  row.df_within = sample.values.size() - g;

  if (row.ss_within <= 0.0)
    throw DegenerateVarianceError("one_way_anova: zero within-group variance" +
                                  (row.variable_id.empty() ? std::string{}
                                                           : " for " + row.variable_id));

  const double ms_between = row.ss_between / static_cast<double>(row.df_between);
  const double ms_within = row.ss_within / static_cast<double>(row.df_within);
  row.f = ms_between / ms_within;
  row.p = f_sf(row.f, static_cast<double>(row.df_between), static_cast<double>(row.df_within));
  row.significant_at_05 = row.p < 0.05;
  return row;
}

std::vector<AnovaRow> anova_table(const std::vector<ScoreCard>& cards) {
  std::array<std::size_t, 3> per_sector{};
  for (const auto& c : cards) ++per_sector[sector_index(c.sector)];
  for (Sector s : kAllSectors)
    if (per_sector[sector_index(s)] == 0)
      throw ValidationError("anova_table: no scorecards for the " + std::string(to_string(s)) +
                            " sector");

  const auto& ids = cards.front().criterion_ids;
  std::vector<AnovaRow> rows;
  rows.reserve(ids.size());
  for (std::size_t v = 0; v < ids.size(); ++v) {
    GroupedSample sample;
    sample.group_count = kAllSectors.size();
    for (const auto& c : cards) {
      sample.values.push_back(static_cast<double>(c.scores.at(v)));
      sample.groups.push_back(sector_index(c.sector));
    }
    try {
      rows.push_back(one_way_anova(sample, ids[v]));
    } catch (const DegenerateVarianceError&) {
      AnovaRow r;
      r.variable_id = ids[v];
      r.degenerate = true;
      r.group_means.assign(sample.group_count, 0.0);
      std::vector<std::size_t> n(sample.group_count, 0);
      double total = 0.0;
      for (std::size_t i = 0; i < sample.values.size(); ++i) {
        r.group_means[sample.groups[i]] += sample.values[i];
        ++n[sample.groups[i]];
        total += sample.values[i];
      }
      for (std::size_t k = 0; k < n.size(); ++k) r.group_means[k] /= static_cast<double>(n[k]);
      r.grand_mean = total / static_cast<double>(sample.values.size());
      r.df_between = sample.group_count - 1;
      r.df_within = sample.values.size() - sample.group_count;
      r.f = std::numeric_limits<double>::quiet_NaN();
      r.p = std::numeric_limits<double>::quiet_NaN();
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "NA";
  return fmt::format("{}", v);
}

}  // namespace

std::string format_anova_csv(const std::vector<AnovaRow>& rows) {
  std::string out = "variable,mean_primary,mean_secondary,mean_tertiary,grand_mean,F,p,sig\n";
  for (const auto& r : rows) {
    csv::Row row{r.variable_id};
    for (std::size_t k = 0; k < 3; ++k)
      row.push_back(k < r.group_means.size() ? num(r.group_means[k]) : "NA");
    row.push_back(num(r.grand_mean));
    row.push_back(num(r.f));
    row.push_back(num(r.p));
    row.push_back(r.significant_at_05 ? "1" : "0");
    out += csv::join(row) + "\n";
  }
  return out;
}

std::vector<AnovaRow> parse_anova_csv(std::string_view text, std::string_view source) {
  const csv::Table t = csv::parse(text, source);
  const std::string src(source);
  const csv::Row expected{"variable", "mean_primary", "mean_secondary", "mean_tertiary",
                          "grand_mean", "F", "p", "sig"};
  if (t.header != expected) throw ValidationError(src + ": unexpected ANOVA header");
  std::vector<AnovaRow> rows;
  for (const auto& r : t.rows) {
    AnovaRow a;
    a.variable_id = r[0];
    for (std::size_t k = 1; k <= 3; ++k) a.group_means.push_back(csv::parse_double(r[k], src));
    a.grand_mean = csv::parse_double(r[4], src);
    a.f = csv::parse_double(r[5], src);
    a.p = csv::parse_double(r[6], src);
    a.significant_at_05 = r[7] == "1";
    a.degenerate = std::isnan(a.f);
    rows.push_back(std::move(a));
  }
  return rows;
}

void write_anova_csv(const std::filesystem::path& path, const std::vector<AnovaRow>& rows) {
  csv::write_file(path, format_anova_csv(rows));
}

std::vector<AnovaRow> read_anova_csv(const std::filesystem::path& path) {
  return parse_anova_csv(csv::read_text(path), path.string());
}

}  // namespace ecoreport
