#include "ecoreport/report.hpp"

#include <cmath>

#include <fmt/format.h>

#include "csv.hpp"
#include "ecoreport/error.hpp"

namespace ecoreport {

std::string format_percent(double percent, int decimals) {
  return fmt::format("{:.{}f}%", percent, decimals);
}

namespace {

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "NA";
  return fmt::format("{:.{}f}", v, decimals);
}

std::string p_value(double p) {
  if (std::isnan(p)) return "NA";
  return fmt::format("{:.3f}", p);
}

void heading(std::string& out, std::string_view title) {
  if (!out.empty()) out += "\n";
  out += fmt::format("{}\n{}\n", title, std::string(title.size(), '='));
}

void composition_section(std::string& out, const std::vector<SectorShare>& shares) {
  heading(out, "Sample composition by sector");
  std::size_t total = 0;
  for (const auto& s : shares) total += s.count;
  for (const auto& s : shares)
    out += fmt::format("{:<10} {:>6} {:>8}\n", to_string(s.sector), s.count,
                       format_percent(s.percentage, 2));
  out += fmt::format("{:<10} {:>6}\n", "total", total);
}

void anova_section(std::string& out, const std::vector<AnovaRow>& rows) {
  heading(out, "One-way ANOVA by sector");
  out += fmt::format("{:<10} {:>9} {:>9} {:>9} {:>9} {:>9} {:>7}\n", "variable", "primary",
                     "secondary", "tertiary", "overall", "F", "p");
  for (const auto& r : rows) {
    auto mean = [&](std::size_t k) {
      return k < r.group_means.size() ? fixed(r.group_means[k], 2) : std::string("NA");
    };
    out += fmt::format("{:<10} {:>9} {:>9} {:>9} {:>9} {:>9} {:>7}{}\n", r.variable_id, mean(0),
                       mean(1), mean(2), fixed(r.grand_mean, 2), fixed(r.f, 3), p_value(r.p),
                       r.significant_at_05 ? " *" : (r.degenerate ? " (no within-group variance)" : ""));
  }
  out += "* significant at the 5% level\n";
}

void mda_section(std::string& out, const MdaResult& m) {
  heading(out, "Discriminant analysis");
  out += fmt::format("cases {}, variables {}, groups {}\n", m.cases, m.variable_ids.size(),
                     m.group_names.size());
  out += "\nCanonical functions\n";
  for (std::size_t f = 0; f < m.eigenvalues.size(); ++f)
    out += fmt::format("  function {}: eigenvalue {}\n", f + 1, fixed(m.eigenvalues[f], 3));

  out += "\nWilks' lambda\n";
  out += fmt::format("  {:<16} {:>8} {:>11} {:>4} {:>7}\n", "functions", "lambda", "chi-square",
                     "df", "p");
  for (const auto& w : m.wilks)
    out += fmt::format("  {:<16} {:>8} {:>11} {:>4} {:>7}\n", w.label, fixed(w.lambda, 3),
                       fixed(w.chi_square, 3), w.df, p_value(w.p));

  out += "\nBox's M\n";
  if (m.box_m) {
    const auto& b = *m.box_m;
    out += fmt::format("  M {}  F {}  df1 {}  df2 {}  p {}\n", fixed(b.m, 3), fixed(b.f_approx, 3),
                       b.df1, fixed(b.df2, 3), p_value(b.p));
    if (b.p < 0.05)
      out += "  warning: group covariance matrices differ at the 5% level\n";
  } else {
    out += fmt::format("  not computed: {}\n", m.box_m_error);
  }

  const auto& c = m.classification;
  if (!c.counts.empty()) {
    out += "\nClassification results (resubstitution)\n";
    out += fmt::format("  {:<12}", "actual");
    for (const auto& g : c.group_names) out += fmt::format(" {:>16}", g);
    out += fmt::format(" {:>7}\n", "total");
    for (std::size_t i = 0; i < c.counts.size(); ++i) {
      std::size_t row_total = 0;
      for (auto n : c.counts[i]) row_total += n;
      out += fmt::format("  {:<12}", i < c.group_names.size() ? c.group_names[i] : "?");
      for (std::size_t j = 0; j < c.counts[i].size(); ++j)
        out += fmt::format(" {:>16}", fmt::format("{} ({})", c.counts[i][j],
                                                  format_percent(c.row_percentages[i][j], 1)));
      out += fmt::format(" {:>7}\n", row_total);
    }
    out += fmt::format("  {} of original grouped cases correctly classified\n",
                       format_percent(c.hit_rate, 1));
  }
}

void sem_section(std::string& out, const SemResult& r) {
  const SemFit& f = r.fit;
  heading(out, "Structural equation model");
  out += fmt::format("chi-square {} (df {}), p {}, N {}\n", fixed(f.chi_square, 3), f.df,
                     p_value(f.p), f.n);
  out += fmt::format("F_ML {}\n", fixed(f.f_ml, 6));
  if (f.df == 0)
    out += "saturated model (df = 0): the fit cannot be tested\n";
  else
    out += fmt::format("model {} at the 5% level (acceptable when p > 0.05)\n",
                       f.acceptable() ? "acceptable" : "rejected");
  out += fmt::format("optimizer {} after {} iterations (gradient norm {:.2e})\n",
                     f.converged ? "converged" : "did not converge", f.iterations,
                     f.gradient_norm);
  for (const auto& w : f.warnings) out += fmt::format("warning: {}\n", w);
  if (!r.standardized.empty()) {
    out += "\nStandardized estimates\n";
    for (const auto& e : r.standardized)
      out += fmt::format("  {:<32} {:>9} {:>9}\n", e.name, fixed(e.raw, 3),
                         fixed(e.standardized, 3));
  }
}

}  // namespace

std::string emit_report(const ResultsBundle& b) {
  if (!b.anova && !b.mda && !b.sem)
    throw ValidationError("report: no analysis results to summarize");
  std::string out;
  if (!b.composition.empty()) composition_section(out, b.composition);
  if (b.anova) anova_section(out, *b.anova);
  if (b.mda) mda_section(out, *b.mda);
  if (b.sem) sem_section(out, *b.sem);
  return out;
}

void write_report(const std::filesystem::path& path, const ResultsBundle& bundle) {
  csv::write_file(path, emit_report(bundle));
}

}  // namespace ecoreport
