#include "ecoreport/mda.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "ecoreport/distributions.hpp"
#include "ecoreport/error.hpp"

namespace ecoreport {

GroupedData grouped_scores(const std::vector<ScoreCard>& cards) {
  GroupedData d;
  if (cards.empty()) return d;
  d.variable_ids = cards.front().criterion_ids;
  std::array<bool, 3> present{};
  for (const auto& c : cards) present[sector_index(c.sector)] = true;
  std::array<std::size_t, 3> label{};
  for (Sector s : kAllSectors) {
    if (!present[sector_index(s)]) continue;
    label[sector_index(s)] = d.group_names.size();
    d.group_names.emplace_back(to_string(s));
  }
  d.x = Matrix(cards.size(), d.variable_ids.size());
  for (std::size_t i = 0; i < cards.size(); ++i) {
    const auto& c = cards[i];
    if (c.scores.size() != d.variable_ids.size())
      throw ValidationError("scorecard '" + c.report_id + "' has the wrong number of scores");
    for (std::size_t j = 0; j < c.scores.size(); ++j) d.x(i, j) = c.scores[j];
    d.groups.push_back(label[sector_index(c.sector)]);
    d.case_ids.push_back(c.report_id);
  }
  return d;
}

ScatterPair scatter_matrices(const GroupedData& data) {
  const std::size_t n = data.cases(), p = data.variables(), g = data.group_count();
  if (g < 2) throw ValidationError("discriminant analysis needs at least two groups");
  if (data.groups.size() != n) throw ValidationError("group labels do not match the case count");

  ScatterPair sp;
  sp.group_sizes.assign(g, 0);
  sp.group_means.assign(g, std::vector<double>(p, 0.0));
  sp.grand_mean.assign(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = data.groups[i];
    if (k >= g) throw ValidationError("group label out of range");
    ++sp.group_sizes[k];
    for (std::size_t j = 0; j < p; ++j) {
      sp.group_means[k][j] += data.x(i, j);
      sp.grand_mean[j] += data.x(i, j);
    }
  }
  for (std::size_t k = 0; k < g; ++k) {
    if (sp.group_sizes[k] == 0)
      throw ValidationError("group '" + data.group_names[k] + "' has no cases");
    for (double& v : sp.group_means[k]) v /= static_cast<double>(sp.group_sizes[k]);
  }
  for (double& v : sp.grand_mean) v /= static_cast<double>(n);

  sp.within = Matrix(p, p);
  sp.between = Matrix(p, p);
  std::vector<double> d(p);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& mean = sp.group_means[data.groups[i]];
    for (std::size_t j = 0; j < p; ++j) d[j] = data.x(i, j) - mean[j];
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) sp.within(a, b) += d[a] * d[b];
  }
  for (std::size_t k = 0; k < g; ++k) {
    for (std::size_t j = 0; j < p; ++j) d[j] = sp.group_means[k][j] - sp.grand_mean[j];
    const auto nk = static_cast<double>(sp.group_sizes[k]);
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) sp.between(a, b) += nk * d[a] * d[b];
  }
  return sp;
}

std::vector<CanonicalFunction> canonical_functions(const ScatterPair& sp) {
  const std::size_t p = sp.within.rows();
  const std::size_t g = sp.group_sizes.size();
  std::vector<EigenPair> pairs;
  try {
    pairs = generalized_eigen(sp.between, sp.within);
  } catch (const ConditioningError& e) {
    throw ConditioningError(
        std::string("within-group scatter is singular (") + e.what() +
        "); remove variables that are constant within groups or linearly dependent");
  }
  const std::size_t m = std::min(p, g - 1);
  std::vector<CanonicalFunction> out;
  for (std::size_t i = 0; i < m && i < pairs.size(); ++i) {
    CanonicalFunction f;
    f.index = i + 1;
    f.eigenvalue = std::max(pairs[i].value, 0.0);
    f.coefficients = pairs[i].vector;
    for (std::size_t k = 0; k < g; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < p; ++j)
        s += f.coefficients[j] * (sp.group_means[k][j] - sp.grand_mean[j]);
      f.group_centroids.push_back(s);
    }
    out.push_back(std::move(f));
  }
  return out;
}

double bartlett_chi_square(double lambda, std::size_t n, std::size_t p, std::size_t g) {
  if (!(lambda > 0.0 && lambda <= 1.0 + 1e-12))
    throw ValidationError("Wilks' lambda must lie in (0, 1]");
  const double factor =
      static_cast<double>(n) - 1.0 - 0.5 * static_cast<double>(p + g);
  return -factor * std::log(std::min(lambda, 1.0));
}

std::vector<WilksTest> wilks_tests(std::span<const double> eigenvalues, std::size_t n,
                                   std::size_t p, std::size_t g) {
  if (n <= p + g) throw PreconditionError("wilks_tests: need N > p + g");
  const std::size_t m = eigenvalues.size();
  std::vector<WilksTest> out;
  for (std::size_t k = 1; k <= m; ++k) {
    WilksTest t;
    t.first_function = k;
    t.label = k == m ? std::to_string(k) : fmt::format("{} through {}", k, m);
    double lambda = 1.0;
    for (std::size_t i = k - 1; i < m; ++i) lambda /= 1.0 + eigenvalues[i];
    t.lambda = lambda;
    t.chi_square = bartlett_chi_square(lambda, n, p, g);
    const std::ptrdiff_t df = static_cast<std::ptrdiff_t>(p - k + 1) *
                              (static_cast<std::ptrdiff_t>(g) - static_cast<std::ptrdiff_t>(k));
    t.df = df > 0 ? static_cast<std::size_t>(df) : 0;
    t.p = t.df > 0 ? chisq_sf(std::max(t.chi_square, 0.0), static_cast<double>(t.df)) : 1.0;
    out.push_back(std::move(t));
  }
  return out;
}

BoxMResult box_m_approximation(double m, std::span<const std::size_t> group_sizes,
                               std::size_t p) {
  const std::size_t g = group_sizes.size();
  if (g < 2) throw ValidationError("Box's M needs at least two groups");
  std::size_t n = 0;
  double inv_sum = 0.0, inv_sq_sum = 0.0;
  for (std::size_t ni : group_sizes) {
    if (ni < 2) throw ValidationError("Box's M needs at least two cases per group");
    n += ni;
    const double v = static_cast<double>(ni - 1);
    inv_sum += 1.0 / v;
    inv_sq_sum += 1.0 / (v * v);
  }
  const double dp = static_cast<double>(p);
  const double dg = static_cast<double>(g);
  const double dof = static_cast<double>(n - g);

  BoxMResult r;
  r.m = m;
  r.df1 = (g - 1) * p * (p + 1) / 2;
  const double df1 = static_cast<double>(r.df1);
  const double c1 = (inv_sum - 1.0 / dof) * (2.0 * dp * dp + 3.0 * dp - 1.0) /
                    (6.0 * (dp + 1.0) * (dg - 1.0));
  const double c2 =
      (inv_sq_sum - 1.0 / (dof * dof)) * (dp - 1.0) * (dp + 2.0) / (6.0 * (dg - 1.0));
  const double gap = c2 - c1 * c1;
  if (gap == 0.0) {
    r.df2 = std::numeric_limits<double>::infinity();
    r.f_approx = m * (1.0 - c1) / df1;
  } else if (gap > 0.0) {
    r.df2 = (df1 + 2.0) / gap;
    const double b = df1 / (1.0 - c1 - df1 / r.df2);
    r.f_approx = m / b;
  } else {
    r.df2 = (df1 + 2.0) / -gap;
    const double b = r.df2 / (1.0 - c1 + 2.0 / r.df2);
    r.f_approx = r.df2 * m / (df1 * (b - m));
  }
  r.f_approx = std::max(r.f_approx, 0.0);
  r.p = std::isinf(r.df2) ? chisq_sf(r.f_approx * df1, df1) : f_sf(r.f_approx, df1, r.df2);
  return r;
}

std::vector<Matrix> group_covariances(const GroupedData& data) {
  const ScatterPair sp = scatter_matrices(data);
  const std::size_t p = data.variables(), g = data.group_count();
  std::vector<Matrix> cov(g, Matrix(p, p));
  std::vector<double> d(p);
  for (std::size_t i = 0; i < data.cases(); ++i) {
    const std::size_t k = data.groups[i];
    for (std::size_t j = 0; j < p; ++j) d[j] = data.x(i, j) - sp.group_means[k][j];
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) cov[k](a, b) += d[a] * d[b];
  }
  for (std::size_t k = 0; k < g; ++k) {
    if (sp.group_sizes[k] < 2)
      throw ValidationError("group '" + data.group_names[k] + "' has fewer than two cases");
    cov[k] *= 1.0 / static_cast<double>(sp.group_sizes[k] - 1);
  }
  return cov;
}

BoxMResult box_m(const GroupedData& data) {
  const auto cov = group_covariances(data);
  const std::size_t p = data.variables(), g = data.group_count();
  std::vector<std::size_t> sizes(g, 0);
  for (std::size_t k : data.groups) ++sizes[k];
  const std::size_t n = data.cases();

  Matrix pooled(p, p);
  double sum_logdet = 0.0;
  for (std::size_t k = 0; k < g; ++k) {
    pooled += cov[k] * static_cast<double>(sizes[k] - 1);
    try {
      sum_logdet += static_cast<double>(sizes[k] - 1) * spd_log_determinant(cov[k]);
    } catch (const ConditioningError&) {
      throw ConditioningError("Box's M: covariance matrix of group '" + data.group_names[k] +
                              "' is singular");
    }
  }
  pooled *= 1.0 / static_cast<double>(n - g);
  double pooled_logdet = 0.0;
  try {
    pooled_logdet = spd_log_determinant(pooled);
  } catch (const ConditioningError&) {
    throw ConditioningError("Box's M: pooled covariance matrix is singular");
  }
  const double m = static_cast<double>(n - g) * pooled_logdet - sum_logdet;
  return box_m_approximation(m, sizes, p);
}

ClassificationMatrix classification_from_counts(std::vector<std::vector<std::size_t>> counts,
                                                std::vector<std::string> group_names) {
  ClassificationMatrix cm;
  const std::size_t g = counts.size();
  for (const auto& row : counts)
    if (row.size() != g) throw ValidationError("classification counts must be square");
  if (group_names.empty())
    for (std::size_t k = 0; k < g; ++k) group_names.push_back(std::to_string(k));
  if (group_names.size() != g) throw ValidationError("group name count mismatch");
  std::size_t total = 0, hits = 0;
  for (std::size_t a = 0; a < g; ++a) {
    std::size_t row_total = 0;
    for (std::size_t b = 0; b < g; ++b) row_total += counts[a][b];
    std::vector<double> pct(g, 0.0);
    for (std::size_t b = 0; b < g && row_total > 0; ++b)
      pct[b] = 100.0 * static_cast<double>(counts[a][b]) / static_cast<double>(row_total);
    cm.row_percentages.push_back(std::move(pct));
    total += row_total;
    hits += counts[a][a];
  }
  cm.hit_rate = total == 0 ? 0.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(total);
  cm.counts = std::move(counts);
  cm.group_names = std::move(group_names);
  return cm;
}

MdaModel fit_mda(const GroupedData& data) {
  MdaModel m;
  m.scatter = scatter_matrices(data);
  m.functions = canonical_functions(m.scatter);
  std::vector<double> ev;
  for (const auto& f : m.functions) ev.push_back(f.eigenvalue);
  m.wilks = wilks_tests(ev, data.cases(), data.variables(), data.group_count());
  m.group_names = data.group_names;
  m.variable_ids = data.variable_ids;
  m.cases = data.cases();
  return m;
}

std::vector<double> project(const MdaModel& model, std::span<const double> x) {
  std::vector<double> out;
  out.reserve(model.functions.size());
  for (const auto& f : model.functions) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
      s += f.coefficients[j] * (x[j] - model.scatter.grand_mean[j]);
    out.push_back(s);
  }
  return out;
}

namespace {

std::size_t nearest_centroid(const MdaModel& model, const std::vector<double>& score) {
  const std::size_t g = model.group_names.size();
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g; ++k) {
    double d = 0.0;
    for (std::size_t f = 0; f < model.functions.size(); ++f) {
      const double diff = score[f] - model.functions[f].group_centroids[k];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

}  // namespace

ClassificationMatrix classify(const GroupedData& data, const MdaModel& model) {
  const std::size_t g = model.group_names.size();
  if (data.variables() != model.variable_ids.size() && !model.variable_ids.empty())
    throw ValidationError("classify: variable set differs from the fitted model");
  std::vector<std::vector<std::size_t>> counts(g, std::vector<std::size_t>(g, 0));
  for (std::size_t i = 0; i < data.cases(); ++i) {
    const auto score = project(model, data.x.row(i));
    ++counts[data.groups[i]][nearest_centroid(model, score)];
  }
  return classification_from_counts(std::move(counts), model.group_names);
}

std::vector<CaseScore> project_cases(const GroupedData& data, const MdaModel& model) {
  std::vector<CaseScore> out;
  out.reserve(data.cases());
  for (std::size_t i = 0; i < data.cases(); ++i) {
    CaseScore c;
    c.report_id = i < data.case_ids.size() ? data.case_ids[i] : std::to_string(i);
    c.group = data.group_names[data.groups[i]];
    c.scores = project(model, data.x.row(i));
    out.push_back(std::move(c));
  }
  return out;
}

MdaResult run_mda(const GroupedData& data) {
  const MdaModel model = fit_mda(data);
  MdaResult r;
  r.group_names = model.group_names;
  r.variable_ids = model.variable_ids;
  r.cases = model.cases;
  for (const auto& f : model.functions) {
    r.eigenvalues.push_back(f.eigenvalue);
    r.coefficients.push_back(f.coefficients);
    r.centroids.push_back(f.group_centroids);
  }
  r.wilks = model.wilks;
  try {
    r.box_m = box_m(data);
  } catch (const ConditioningError& e) {
    r.box_m_error = e.what();
  }
  r.classification = classify(data, model);
  return r;
}

namespace {

using nlohmann::json;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j) {
  return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string format_mda_json(const MdaResult& r) {
  json j;
  j["groups"] = r.group_names;
  j["variables"] = r.variable_ids;
  j["cases"] = r.cases;
  json functions = json::array();
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    json f;
    f["index"] = i + 1;
    f["eigenvalue"] = r.eigenvalues[i];
    f["coefficients"] = r.coefficients[i];
    f["group_centroids"] = r.centroids[i];
    functions.push_back(std::move(f));
  }
  j["functions"] = std::move(functions);
  json wilks = json::array();
  for (const auto& w : r.wilks)
    wilks.push_back({{"test", w.label},
                     {"first_function", w.first_function},
                     {"lambda", w.lambda},
                     {"chi_square", w.chi_square},
                     {"df", w.df},
                     {"p", w.p}});
  j["wilks"] = std::move(wilks);
  if (r.box_m) {
    j["box_m"] = {{"M", r.box_m->m},
                  {"F", r.box_m->f_approx},
                  {"df1", r.box_m->df1},
                  {"df2", finite_or_null(r.box_m->df2)},
                  {"p", r.box_m->p},
                  {"warning", r.box_m->p < 0.05
                                  ? json("group covariance matrices differ (p < 0.05); "
                                         "linear discriminant assumptions are violated")
                                  : json(nullptr)}};
  } else {
    j["box_m"] = {{"error", r.box_m_error}};
  }
  const auto& c = r.classification;
  j["classification"] = {{"groups", c.group_names},
                         {"counts", c.counts},
                         {"row_percentages", c.row_percentages},
                         {"hit_rate", c.hit_rate}};
  return j.dump(2) + "\n";
}

MdaResult parse_mda_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed MDA JSON: ") + e.what());
  }
  try {
    MdaResult r;
    r.group_names = j.at("groups").get<std::vector<std::string>>();
    r.variable_ids = j.at("variables").get<std::vector<std::string>>();
    r.cases = j.at("cases").get<std::size_t>();
    for (const auto& f : j.at("functions")) {
      r.eigenvalues.push_back(f.at("eigenvalue").get<double>());
      r.coefficients.push_back(f.at("coefficients").get<std::vector<double>>());
      r.centroids.push_back(f.at("group_centroids").get<std::vector<double>>());
    }
    for (const auto& w : j.at("wilks")) {
      WilksTest t;
      t.label = w.at("test").get<std::string>();
      t.first_function = w.at("first_function").get<std::size_t>();
      t.lambda = w.at("lambda").get<double>();
      t.chi_square = w.at("chi_square").get<double>();
      t.df = w.at("df").get<std::size_t>();
      t.p = w.at("p").get<double>();
      r.wilks.push_back(std::move(t));
    }
    const auto& b = j.at("box_m");
    if (b.contains("error")) {
      r.box_m_error = b.at("error").get<std::string>();
    } else {
      BoxMResult bm;
      bm.m = b.at("M").get<double>();
      bm.f_approx = b.at("F").get<double>();
      bm.df1 = b.at("df1").get<std::size_t>();
      bm.df2 = b.at("df2").is_null() ? std::numeric_limits<double>::infinity()
                                      : number_or_nan(b.at("df2"));
      bm.p = b.at("p").get<double>();
      r.box_m = bm;
    }
    const auto& c = j.at("classification");
    r.classification.group_names = c.at("groups").get<std::vector<std::string>>();
    r.classification.counts = c.at("counts").get<std::vector<std::vector<std::size_t>>>();
    r.classification.row_percentages =
        c.at("row_percentages").get<std::vector<std::vector<double>>>();
    r.classification.hit_rate = c.at("hit_rate").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("MDA JSON is missing fields: ") + e.what());
  }
}

void write_mda_json(const std::filesystem::path& path, const MdaResult& r) {
  csv::write_file(path, format_mda_json(r));
}

MdaResult read_mda_json(const std::filesystem::path& path) {
  return parse_mda_json(csv::read_text(path));
}

std::string format_case_scores_csv(const std::vector<CaseScore>& cases, const MdaModel& model) {
  csv::Row header{"report_id", "group"};
  for (const auto& f : model.functions) header.push_back(fmt::format("score_f{}", f.index));
  std::string out = csv::join(header) + "\n";
  for (const auto& c : cases) {
    csv::Row row{c.report_id, c.group};
    for (double s : c.scores) row.push_back(fmt::format("{}", s));
    out += csv::join(row) + "\n";
  }
  for (std::size_t k = 0; k < model.group_names.size(); ++k) {
    csv::Row row{"centroid", model.group_names[k]};
    for (const auto& f : model.functions) row.push_back(fmt::format("{}", f.group_centroids[k]));
    out += csv::join(row) + "\n";
  }
  return out;
}

void write_case_scores_csv(const std::filesystem::path& path, const std::vector<CaseScore>& cases,
                           const MdaModel& model) {
  csv::write_file(path, format_case_scores_csv(cases, model));
}

}  // namespace ecoreport
