// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "ecoreport/anova.hpp"
#include "ecoreport/distributions.hpp"
#include "ecoreport/mda.hpp"
#include "ecoreport/miner.hpp"
#include "ecoreport/scoring.hpp"
#include "ecoreport/sem.hpp"
#include "support/synthetic.hpp"
#include "support/tempdir.hpp"

using namespace ecoreport;
using synthetic::Rng;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// --- 1 ----------------------------------------------------------------------
Outcome bartlett() {
  Outcome o;
  const auto t0 = Clock::now();
  const double chi1 = bartlett_chi_square(0.677, 539, 10, 3);
  const double chi2 = bartlett_chi_square(0.854, 539, 10, 3);
  const double l2 = 1.0 / 0.854 - 1.0;
  const double l1 = 0.854 / 0.677 - 1.0;
  const auto tests = wilks_tests(std::vector<double>{l1, l2}, 539, 10, 3);
  const double elapsed = seconds_since(t0);
  o.require(chi1 >= 206.5 && chi1 <= 208.0, "chi-square(0.677) = " + num(chi1));
  o.require(chi2 >= 83.3 && chi2 <= 84.9, "chi-square(0.854) = " + num(chi2));
  o.require(tests.size() == 2 && tests[0].df == 20 && tests[1].df == 9, "df not 20 / 9");
  o.require(elapsed < 1e-3, "runtime " + num(elapsed) + " s");
  if (o.ok) o.detail = "chi2 " + num(chi1) + " (df 20), " + num(chi2) + " (df 9)";
  return o;
}

// --- 2 ----------------------------------------------------------------------
Outcome box_m_df() {
  Outcome o;
  const std::vector<std::size_t> sizes{225, 197, 117};
  const auto r = box_m_approximation(254.359, sizes, 10);
  o.require(r.df1 == 110, "df1 = " + std::to_string(r.df1));
  if (o.ok) o.detail = "df1 110, df2 " + num(r.df2) + ", F " + num(r.f_approx);
  return o;
}

// --- 3 ----------------------------------------------------------------------
Outcome classification() {
  Outcome o;
  const auto cm = classification_from_counts({{129, 55, 41}, {51, 114, 32}, {16, 22, 79}});
  o.require(std::abs(cm.hit_rate - 59.7) <= 0.05, "hit rate " + num(cm.hit_rate));
  const double diag[] = {57.3, 57.9, 67.5};
  const std::size_t sums[] = {225, 197, 117};
  for (std::size_t g = 0; g < 3; ++g) {
    o.require(std::abs(cm.row_percentages[g][g] - diag[g]) <= 0.05,
              "row " + std::to_string(g) + " percentage " + num(cm.row_percentages[g][g]));
    std::size_t sum = 0;
    for (auto c : cm.counts[g]) sum += c;
    o.require(sum == sums[g], "row sum " + std::to_string(sum));
  }
  if (o.ok) o.detail = "hit rate " + num(cm.hit_rate) + "%";
  return o;
}

// --- 4 ----------------------------------------------------------------------
Outcome sem_df() {
  Outcome o;
  const auto m = load_model(ECOREPORT_CONFIG_DIR "/model.sem");
  o.require(m.observed.size() == 10, "p = " + std::to_string(m.observed.size()));
  o.require(m.free_parameter_count() == 16, "t = " + std::to_string(m.free_parameter_count()));
  o.require(m.degrees_of_freedom() == 39, "df = " + std::to_string(m.degrees_of_freedom()));
  if (o.ok) o.detail = "p 10, t 16, df 39";
  return o;
}

// --- 5 ----------------------------------------------------------------------
Outcome rating_scale() {
  Outcome o;
  const std::pair<int, int> bands[] = {{0, 0},  {1, 1},  {4, 1},  {5, 3},  {19, 3}, {20, 5},
                                       {49, 5}, {50, 7}, {74, 7}, {75, 10}, {100, 10}};
  for (auto [f, s] : bands)
    o.require(rate_frequency(f) == s, "freq " + std::to_string(f) + " -> " +
                                          std::to_string(rate_frequency(f)));
  if (o.ok) o.detail = "11 boundaries";
  return o;
}

// --- 6 ----------------------------------------------------------------------
Outcome strategy_equivalence() {
  Outcome o;
  Rng rng(6);
  const auto& vocab = synthetic::small_vocabulary();
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 100 && o.ok; ++trial) {
    const std::size_t docs = 5 + synthetic::uniform_index(rng, 46);
    const Corpus corpus = synthetic::random_corpus(rng, docs, 10, 2000, vocab);
    const CriteriaSet criteria = synthetic::random_criteria(rng, vocab);
    const StopList stop = synthetic::random_stoplist(rng, vocab);
    const bool stemming = trial % 2 == 1;
    const auto linear = mine_linear(corpus, criteria, stop, stemming);
    const auto binary = mine_binary(build_sorted_keyword_file(corpus, stop, stemming), corpus, criteria);
    o.require(linear == binary, "corpus " + std::to_string(trial) + " differs");
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 30.0, "runtime " + num(elapsed) + " s");
  if (o.ok) o.detail = "100 corpora in " + num(elapsed) + " s";
  return o;
}

// --- 7 ----------------------------------------------------------------------
double oracle_f(const std::vector<std::vector<double>>& groups) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& g : groups)
    for (double v : g) total += v, ++n;
  const double grand = total / static_cast<double>(n);
  double ssb = 0.0, ssw = 0.0;
  for (const auto& g : groups) {
    double m = 0.0;
    for (double v : g) m += v;
    m /= static_cast<double>(g.size());
    ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) ssw += (v - m) * (v - m);
  }
  const double k = static_cast<double>(groups.size());
  return (ssb / (k - 1)) / (ssw / (static_cast<double>(n) - k));
}

GroupedSample sample_of(const std::vector<std::vector<double>>& groups) {
  GroupedSample s;
  s.group_count = groups.size();
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (double v : groups[g]) s.values.push_back(v), s.groups.push_back(g);
  return s;
}

// Upper F tail by Simpson's rule after mapping [x0, inf) onto [0, 1).
double f_tail_quadrature(double x0, double d1, double d2) {
  const double log_beta = std::lgamma(d1 / 2) + std::lgamma(d2 / 2) - std::lgamma((d1 + d2) / 2);
  auto density = [&](double x) {
    return std::exp(0.5 * (d1 * std::log(d1 * x) + d2 * std::log(d2) - (d1 + d2) * std::log(d1 * x + d2)) -
                    std::log(x) - log_beta);
  };
  auto g = [&](double t) {
    if (t >= 1.0) return 0.0;
    return density(x0 + t / (1.0 - t)) / ((1.0 - t) * (1.0 - t));
  };
  const int n = 200000;
  const double h = 1.0 / n;
  double sum = g(0.0) + g(1.0);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(i * h);
  return sum * h / 3.0;
}

Outcome anova_oracle() {
  Outcome o;
  Rng rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<double>> groups(2 + synthetic::uniform_index(rng, 3));
    for (auto& g : groups) {
      g.resize(2 + synthetic::uniform_index(rng, 30));
      const double shift = synthetic::normal(rng);
      for (auto& v : g) v = shift + 2.0 * synthetic::normal(rng);
    }
    const double f = one_way_anova(sample_of(groups)).f;
    const double expected = oracle_f(groups);
    worst = std::max(worst, std::abs(f - expected) / std::max(1.0, expected));
  }
  o.require(worst <= 1e-10, "max relative F error " + num(worst));

  const auto equal = one_way_anova(sample_of({{1, 2, 3}, {3, 2, 1}, {2, 1, 3}}));
  o.require(equal.f == 0.0, "equal means give F = " + num(equal.f));

  struct Case {
    double x, d1, d2;
  };
  for (auto [x, d1, d2] : {Case{3.885, 2, 12}, Case{1.5, 1, 4}, Case{0.8, 3, 50}, Case{2.2, 9, 529}}) {
    const double diff = std::abs(f_sf(x, d1, d2) - f_tail_quadrature(x, d1, d2));
    o.require(diff <= 1e-6, "f_sf vs quadrature differs by " + num(diff));
  }
  if (o.ok) o.detail = "max relative F error " + num(worst);
  return o;
}

// --- 8 ----------------------------------------------------------------------
Outcome mda_recovery() {
  Outcome o;
  Rng rng(8);
  const auto d = synthetic::gaussian_groups(rng, {{0, 0, 0, 0}, {6, 0, 0, 0}, {0, 6, 0, 0}}, 100, 1.0);
  const auto model = fit_mda(d);
  const auto cm = classify(d, model);
  o.require(cm.hit_rate >= 95.0, "hit rate " + num(cm.hit_rate));
  const double identity = determinant(model.scatter.within) /
                          determinant(model.scatter.within + model.scatter.between);
  const double rel = std::abs(model.wilks[0].lambda - identity) / identity;
  o.require(rel <= 1e-8, "Wilks lambda relative error " + num(rel));
  if (o.ok) o.detail = "hit rate " + num(cm.hit_rate) + "%, lambda error " + num(rel);
  return o;
}

// --- 9 ----------------------------------------------------------------------
Outcome box_m_null() {
  Outcome o;
  Rng rng(9);
  const auto base = synthetic::gaussian_groups(rng, {{0, 0, 0}}, 20, 1.0);
  GroupedData same;
  same.x = Matrix(60, 3);
  for (std::size_t g = 0; g < 3; ++g) {
    same.group_names.push_back("g" + std::to_string(g));
    for (std::size_t i = 0; i < 20; ++i) {
      for (std::size_t j = 0; j < 3; ++j) same.x(g * 20 + i, j) = base.x(i, j) + 5.0 * g;
      same.groups.push_back(g);
    }
  }
  const double m0 = box_m(same).m;
  o.require(std::abs(m0) <= 1e-8, "M = " + num(m0) + " for identical covariances");

  // Two groups, p = 2, different covariance structure.
  GroupedData d;
  d.group_names = {"a", "b"};
  const std::size_t sizes[] = {25, 40};
  d.x = Matrix(65, 2);
  std::vector<Matrix> cov(2, Matrix(2, 2));
  std::vector<std::vector<std::vector<double>>> rows(2);
  std::size_t r = 0;
  for (std::size_t g = 0; g < 2; ++g)
    for (std::size_t i = 0; i < sizes[g]; ++i, ++r) {
      const double u = synthetic::normal(rng), v = synthetic::normal(rng);
      const double a = g == 0 ? u : 2.5 * u;
      const double b = g == 0 ? 0.6 * u + v : 0.3 * v - 1.0;
      d.x(r, 0) = a;
      d.x(r, 1) = b;
      d.groups.push_back(g);
      rows[g].push_back({a, b});
    }
  for (std::size_t g = 0; g < 2; ++g) {
    const double n = static_cast<double>(rows[g].size());
    double m[2] = {0, 0};
    for (const auto& row : rows[g]) m[0] += row[0] / n, m[1] += row[1] / n;
    for (const auto& row : rows[g])
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) cov[g](i, j) += (row[i] - m[i]) * (row[j] - m[j]) / (n - 1);
  }
  const Matrix pooled = (1.0 / 63.0) * (24.0 * cov[0] + 39.0 * cov[1]);
  auto det2 = [](const Matrix& a) { return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0); };
  const double expected = 63.0 * std::log(det2(pooled)) - 24.0 * std::log(det2(cov[0])) -
                          39.0 * std::log(det2(cov[1]));
  const double m1 = box_m(d).m;
  const double rel = std::abs(m1 - expected) / std::max(1.0, std::abs(expected));
  o.require(rel <= 1e-10, "M = " + num(m1) + " vs oracle " + num(expected));
  if (o.ok) o.detail = "null M " + num(m0) + ", oracle agreement " + num(rel);
  return o;
}

// --- 10 ---------------------------------------------------------------------
const char* kOneFactor =
    "[observed]\nx1 x2 x3\n[latents]\nf\n[loadings]\nf -> x1 free\nf -> x2 free\nf -> x3 free\n";
const char* kFourIndicators =
    "[observed]\nx1 x2 x3 x4\n[latents]\nf\n[loadings]\n"
    "f -> x1 free\nf -> x2 free\nf -> x3 free\nf -> x4 free\n";

double estimate(const SemFit& fit, const std::string& name) {
  for (const auto& e : fit.estimates)
    if (e.name == name) return e.value;
  return std::nan("");
}

Outcome sem_recovery() {
  Outcome o;
  const auto t0 = Clock::now();
  Rng rng(10);

  const std::vector<double> lambda{0.8, 0.7, 0.6};
  const std::size_t n = 500;
  Matrix x(n, 3);
  for (std::size_t r = 0; r < n; ++r) {
    const double f = synthetic::normal(rng);
    for (std::size_t j = 0; j < 3; ++j)
      x(r, j) = lambda[j] * f + std::sqrt(1.0 - lambda[j] * lambda[j]) * synthetic::normal(rng);
  }
  const auto model = parse_model(kOneFactor);
  const auto sim = fit_model(model, sample_covariance(x), n);
  o.require(sim.converged, "simulated fit did not converge");
  for (std::size_t j = 0; j < 3; ++j) {
    const double est = estimate(sim, "f -> x" + std::to_string(j + 1));
    o.require(std::abs(est - lambda[j]) <= 0.1, "loading " + std::to_string(j + 1) + " = " + num(est));
  }
  // Three indicators, one factor: saturated.
  o.require(sim.df == 0 && sim.chi_square < 1e-6, "saturated chi-square " + num(sim.chi_square));

  const std::vector<double> l4{0.8, 0.7, 0.6, 0.5};
  Matrix pop(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) pop(i, j) = i == j ? 1.0 : l4[i] * l4[j];
  const auto model4 = parse_model(kFourIndicators);
  const auto exact = fit_model(model4, pop, n);
  o.require(exact.f_ml < 1e-8, "population F_ML " + num(exact.f_ml));
  for (std::size_t j = 0; j < 4; ++j) {
    const std::string v = "x" + std::to_string(j + 1);
    o.require(std::abs(estimate(exact, "f -> " + v) - l4[j]) <= 1e-4, "population loading " + v);
    o.require(std::abs(estimate(exact, v) - (1 - l4[j] * l4[j])) <= 1e-4, "population residual " + v);
  }

  // Library gradient against Richardson-extrapolated differences of F_ML.
  const MlObjective obj(model4, synthetic::random_spd(rng, 4));
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> z(obj.dimension());
    for (auto& v : z) v = 0.5 + 0.3 * synthetic::normal(rng);
    const auto g = obj.gradient(z);
    for (std::size_t i = 0; i < z.size(); ++i) {
      auto diff = [&](double h) {
        auto up = z, down = z;
        up[i] += h;
        down[i] -= h;
        return (obj.value(up) - obj.value(down)) / (2 * h);
      };
      const double ref = (4.0 * diff(5e-4) - diff(1e-3)) / 3.0;
      worst = std::max(worst, std::abs(g[i] - ref) / std::max(1.0, std::abs(ref)));
    }
  }
  o.require(worst <= 1e-4, "gradient relative error " + num(worst));

  const double elapsed = seconds_since(t0);
  o.require(elapsed < 10.0, "runtime " + num(elapsed) + " s");
  if (o.ok)
    o.detail = "loadings " + num(estimate(sim, "f -> x1")) + "/" + num(estimate(sim, "f -> x2")) +
               "/" + num(estimate(sim, "f -> x3")) + ", " + num(elapsed) + " s";
  return o;
}

// --- 11 ---------------------------------------------------------------------
Outcome special_functions() {
  Outcome o;
  const double c = chisq_sf(5.991, 2);
  o.require(std::abs(c - 0.05) <= 1e-4, "chisq_sf(5.991, 2) = " + num(c));
  o.require(std::abs(c - std::exp(-5.991 / 2)) <= 1e-12, "closed form exp(-x/2) disagrees");
  for (double d : {1.0, 5.0, 30.0}) {
    const double f = f_sf(1.0, d, d);
    o.require(std::abs(f - 0.5) <= 1e-10, "f_sf(1, d, d) = " + num(f));
  }
  if (o.ok) o.detail = "chisq_sf(5.991, 2) = " + num(c);
  return o;
}

// --- 12 ---------------------------------------------------------------------
Outcome end_to_end() {
  Outcome o;
  const std::string fx = ECOREPORT_FIXTURES "/six_reports";
  testing::TempDir a, b;
  auto run = [&](const testing::TempDir& dir) {
    std::ostringstream out, err;
    const int status = cli::run_subcommand(
        {"pipeline", "--manifest", fx + "/manifest.csv", "--criteria", fx + "/criteria.cfg",
         "--model", fx + "/model.sem", "--out", dir.path().string()},
        out, err);
    o.require(status == 0, "pipeline exit " + std::to_string(status) + ": " + err.str());
  };
  run(a);
  run(b);
  if (!o.ok) return o;

  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
    const auto name = entry.path().filename().string();
    o.require(testing::slurp(a / name) == testing::slurp(b / name), name + " differs between runs");
    ++files;
  }
  o.require(files >= 8, "only " + std::to_string(files) + " output files");

  // Hand-counted phrase occurrences and their ratings.
  const std::vector<std::pair<std::string, std::array<std::pair<std::uint64_t, int>, 2>>> hand{
      {"r01", {{{76, 10}, {3, 1}}}},  {"r02", {{{50, 7}, {0, 0}}}},  {"r03", {{{20, 5}, {5, 3}}}},
      {"r04", {{{4, 1}, {19, 3}}}},   {"r05", {{{0, 0}, {49, 5}}}},  {"r06", {{{1, 1}, {75, 10}}}}};
  const auto cards = read_scorecard_csv(a / "scorecards.csv");
  o.require(cards.size() == hand.size(), "scorecard count " + std::to_string(cards.size()));
  for (std::size_t i = 0; i < cards.size() && i < hand.size(); ++i) {
    o.require(cards[i].report_id == hand[i].first, "unexpected report " + cards[i].report_id);
    for (std::size_t c = 0; c < 2; ++c) {
      o.require(cards[i].frequencies[c] == hand[i].second[c].first,
                hand[i].first + " frequency " + std::to_string(cards[i].frequencies[c]));
      o.require(cards[i].scores[c] == hand[i].second[c].second,
                hand[i].first + " score " + std::to_string(cards[i].scores[c]));
    }
  }
  if (o.ok) o.detail = std::to_string(files) + " files identical across runs";
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"Bartlett chi-square reproduction", bartlett},
      {"Box's M degrees of freedom", box_m_df},
      {"classification arithmetic", classification},
      {"SEM degrees of freedom", sem_df},
      {"rating scale boundaries", rating_scale},
      {"mining strategy equivalence", strategy_equivalence},
      {"ANOVA oracle", anova_oracle},
      {"MDA synthetic recovery", mda_recovery},
      {"Box's M null and formula oracle", box_m_null},
      {"SEM recovery", sem_recovery},
      {"special functions", special_functions},
      {"end-to-end fixture", end_to_end},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %2d %s: %s\n", o.ok ? "PASS" : "FAIL", index++, name, o.detail.c_str());
    failures += !o.ok;
  }
  return failures == 0 ? 0 : 1;
}
