#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ecoreport/error.hpp"
#include "ecoreport/mda.hpp"
#include "support/synthetic.hpp"

using namespace ecoreport;
using synthetic::Rng;

namespace {

GroupedData one_dimensional() {
  GroupedData d;
  d.x = Matrix{{0}, {2}, {4}, {6}};
  d.groups = {0, 0, 1, 1};
  d.group_names = {"a", "b"};
  d.case_ids = {"c0", "c1", "c2", "c3"};
  d.variable_ids = {"x"};
  return d;
}

GroupedData separated_groups(Rng& rng, double separation, std::size_t n = 100) {
  return synthetic::gaussian_groups(
      rng, {{0, 0, 0, 0}, {separation, 0, 0, 0}, {0, separation, 0, 0}}, n, 1.0);
}

// Unbiased covariance straight from the definition.
Matrix covariance_of(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size(), p = rows.front().size();
  std::vector<double> mean(p, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < p; ++j) mean[j] += r[j] / static_cast<double>(n);
  Matrix c(p, p);
  for (const auto& r : rows)
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b)
        c(a, b) += (r[a] - mean[a]) * (r[b] - mean[b]) / static_cast<double>(n - 1);
  return c;
}

}  // namespace

TEST_CASE("scatter matrices: one-dimensional hand example") {
  const auto sp = scatter_matrices(one_dimensional());
  CHECK(sp.within(0, 0) == doctest::Approx(4.0));
  // B = sum n_g (mean_g - mean)^2 = 2 * 4 + 2 * 4.
  CHECK(sp.between(0, 0) == doctest::Approx(16.0));
  const auto fns = canonical_functions(sp);
  REQUIRE(fns.size() == 1);
  CHECK(fns[0].eigenvalue == doctest::Approx(4.0));
  // v' W v = 1 -> v = 1/2; centroids at (1 - 3)/2 and (5 - 3)/2.
  CHECK(fns[0].coefficients[0] == doctest::Approx(0.5));
  CHECK(fns[0].group_centroids == std::vector<double>{-1.0, 1.0});
}

TEST_CASE("scatter matrices: identical cases give W = 0; W + B = T") {
  GroupedData d;
  d.x = Matrix{{1, 2}, {1, 2}, {3, 1}, {3, 1}};
  d.groups = {0, 0, 1, 1};
  d.group_names = {"a", "b"};
  CHECK(scatter_matrices(d).within.max_abs() == 0.0);
  CHECK_THROWS_AS(canonical_functions(scatter_matrices(d)), ConditioningError);

  Rng rng(1);
  const GroupedData r = separated_groups(rng, 2.0, 30);
  const auto sp = scatter_matrices(r);
  Matrix total(4, 4);
  for (std::size_t i = 0; i < r.cases(); ++i)
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b)
        total(a, b) += (r.x(i, a) - sp.grand_mean[a]) * (r.x(i, b) - sp.grand_mean[b]);
  CHECK((sp.within + sp.between - total).max_abs() <= 1e-10 * total.max_abs());
}

TEST_CASE("singular W suggests removing variables") {
  GroupedData d;
  d.x = Matrix{{1, 5}, {2, 5}, {4, 5}, {6, 5}};
  d.groups = {0, 0, 1, 1};
  d.group_names = {"a", "b"};
  try {
    canonical_functions(scatter_matrices(d));
    FAIL("expected ConditioningError");
  } catch (const ConditioningError& e) {
    CHECK(std::string(e.what()).find("remove variables") != std::string::npos);
  }
}

TEST_CASE("g = 3 and p = 10 give exactly two functions") {
  Rng rng(2);
  std::vector<std::vector<double>> means(3, std::vector<double>(10, 0.0));
  means[1][0] = 1.0;
  means[2][1] = 1.0;
  const auto d = synthetic::gaussian_groups(rng, means, 40, 1.0);
  const auto fns = canonical_functions(scatter_matrices(d));
  REQUIRE(fns.size() == 2);
  CHECK(fns[0].eigenvalue >= fns[1].eigenvalue);
  const auto tests = wilks_tests(std::vector<double>{fns[0].eigenvalue, fns[1].eigenvalue},
                                 d.cases(), 10, 3);
  CHECK(tests[0].df == 20);
  CHECK(tests[1].df == 9);
  CHECK(tests[0].label == "1 through 2");
  CHECK(tests[1].label == "2");
}

TEST_CASE("wilks_tests: reference values and simple cases") {
  // Eigenvalues chosen so the two lambdas are 0.677 and 0.854.
  const double l2 = 1.0 / 0.854 - 1.0;
  const double l1 = 0.854 / 0.677 - 1.0;
  const auto t = wilks_tests(std::vector<double>{l1, l2}, 539, 10, 3);
  REQUIRE(t.size() == 2);
  CHECK(t[0].lambda == doctest::Approx(0.677));
  CHECK(t[0].chi_square == doctest::Approx(207.3).epsilon(0.002));
  CHECK(t[1].lambda == doctest::Approx(0.854));
  CHECK(t[1].chi_square == doctest::Approx(84.0).epsilon(0.002));
  CHECK(t[0].p < 1e-6);

  const auto zero = wilks_tests(std::vector<double>{0.0, 0.0}, 50, 3, 3);
  CHECK(zero[0].lambda == 1.0);
  CHECK(zero[0].chi_square == 0.0);

  const auto one = wilks_tests(std::vector<double>{1.0}, 20, 1, 2);
  CHECK(one[0].lambda == 0.5);
  CHECK(one[0].df == 1);

  CHECK_THROWS_AS(wilks_tests(std::vector<double>{1.0}, 3, 1, 2), PreconditionError);
}

TEST_CASE("Wilks lambda equals det(W) / det(W + B)") {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    Rng rng(seed);
    const auto d = separated_groups(rng, 0.5 + static_cast<double>(seed % 3), 25);
    const auto model = fit_mda(d);
    const double identity =
        determinant(model.scatter.within) / determinant(model.scatter.within + model.scatter.between);
    CHECK(std::abs(model.wilks[0].lambda - identity) <= 1e-8 * identity);
  }
}

TEST_CASE("Box's M F approximation on a three-group, ten-variable case") {
  const std::vector<std::size_t> sizes{225, 197, 117};
  const auto r = box_m_approximation(254.359, sizes, 10);
  CHECK(r.df1 == 110);
  CHECK(r.df2 == doctest::Approx(449035.606).epsilon(1e-6));
  CHECK(r.f_approx == doctest::Approx(2.246).epsilon(5e-4));
  CHECK(r.p < 1e-3);
}

TEST_CASE("Box's M: equal covariances give M = 0") {
  Rng rng(3);
  const auto base = synthetic::gaussian_groups(rng, {{0, 0, 0}}, 15, 1.0);
  GroupedData d;
  d.x = Matrix(45, 3);
  for (std::size_t g = 0; g < 3; ++g) {
    d.group_names.push_back("g" + std::to_string(g));
    for (std::size_t i = 0; i < 15; ++i) {
      for (std::size_t j = 0; j < 3; ++j) d.x(g * 15 + i, j) = base.x(i, j) + 10.0 * g;
      d.groups.push_back(g);
    }
  }
  const auto r = box_m(d);
  CHECK(std::abs(r.m) < 1e-8);
  CHECK(r.df1 == 12);
}

TEST_CASE("Box's M matches the log-determinant formula") {
  Rng rng(4);
  GroupedData d;
  d.group_names = {"a", "b"};
  std::vector<std::vector<std::vector<double>>> rows(2);
  const std::size_t sizes[] = {20, 35};
  d.x = Matrix(55, 2);
  std::size_t r = 0;
  for (std::size_t g = 0; g < 2; ++g)
    for (std::size_t i = 0; i < sizes[g]; ++i, ++r) {
      const double u = synthetic::normal(rng), v = synthetic::normal(rng);
      const std::vector<double> row = g == 0 ? std::vector<double>{u, 0.5 * u + v}
                                             : std::vector<double>{3.0 * u, -v + 1.0};
      d.x(r, 0) = row[0];
      d.x(r, 1) = row[1];
      d.groups.push_back(g);
      rows[g].push_back(row);
    }
  const Matrix s0 = covariance_of(rows[0]);
  const Matrix s1 = covariance_of(rows[1]);
  const Matrix pooled = (1.0 / 53.0) * (19.0 * s0 + 34.0 * s1);
  const double expected = 53.0 * std::log(determinant(pooled)) - 19.0 * std::log(determinant(s0)) -
                          34.0 * std::log(determinant(s1));
  const auto result = box_m(d);
  CHECK(std::abs(result.m - expected) <= 1e-10 * std::max(1.0, std::abs(expected)));
  CHECK(result.df1 == 3);
}

TEST_CASE("Box's M names a singular group") {
  GroupedData d;
  d.x = Matrix{{1, 1}, {2, 2}, {3, 3}, {1, 0}, {0, 1}, {2, 3}};
  d.groups = {0, 0, 0, 1, 1, 1};
  d.group_names = {"primary", "secondary"};
  try {
    box_m(d);
    FAIL("expected ConditioningError");
  } catch (const ConditioningError& e) {
    CHECK(std::string(e.what()).find("primary") != std::string::npos);
  }
}

TEST_CASE("classification arithmetic from a 539-case confusion matrix") {
  const auto cm = classification_from_counts({{129, 55, 41}, {51, 114, 32}, {16, 22, 79}},
                                             {"secondary", "tertiary", "primary"});
  CHECK(cm.hit_rate == doctest::Approx(100.0 * 322.0 / 539.0));
  CHECK(std::abs(cm.hit_rate - 59.7) <= 0.05);
  CHECK(std::abs(cm.row_percentages[0][0] - 57.3) <= 0.05);
  CHECK(std::abs(cm.row_percentages[0][1] - 24.4) <= 0.05);
  CHECK(std::abs(cm.row_percentages[0][2] - 18.2) <= 0.05);
  CHECK(std::abs(cm.row_percentages[1][1] - 57.9) <= 0.05);
  CHECK(std::abs(cm.row_percentages[2][2] - 67.5) <= 0.05);
}

TEST_CASE("well separated groups are recovered") {
  Rng rng(5);
  const auto d = separated_groups(rng, 6.0);
  const auto model = fit_mda(d);
  const auto cm = classify(d, model);
  CHECK(cm.hit_rate >= 95.0);
  for (std::size_t g = 0; g < 3; ++g) {
    std::size_t row = 0;
    for (auto c : cm.counts[g]) row += c;
    CHECK(row == 100);
  }
}

// Resubstitution is optimistic by roughly the number of fitted dimensions;
// two variables keep that bias well inside the tolerance.
TEST_CASE("shuffled labels classify at chance") {
  Rng rng(6);
  double total = 0.0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    auto d = synthetic::gaussian_groups(rng, {{0, 0}, {0, 0}, {0, 0}}, 100, 1.0);
    std::shuffle(d.groups.begin(), d.groups.end(), rng);
    total += classify(d, fit_mda(d)).hit_rate;
  }
  CHECK(std::abs(total / trials - 100.0 / 3.0) <= 5.0);
}

TEST_CASE("classification is affine invariant") {
  Rng rng(7);
  const auto d = separated_groups(rng, 1.5, 40);
  const auto base = classify(d, fit_mda(d));
  GroupedData shifted = d, scaled = d;
  for (std::size_t i = 0; i < d.cases(); ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      shifted.x(i, j) += 10.0 + static_cast<double>(j);
      scaled.x(i, j) *= 3.5;
    }
  CHECK(classify(shifted, fit_mda(shifted)).counts == base.counts);
  const auto m0 = fit_mda(d);
  const auto m1 = fit_mda(scaled);
  const auto p0 = project_cases(d, m0);
  const auto p1 = project_cases(scaled, m1);
  const auto c1 = classify(scaled, m1);
  CHECK(c1.counts == base.counts);
  // Scores are invariant too: v scales by 1/c when the data scale by c.
  for (std::size_t i = 0; i < p0.size(); ++i)
    for (std::size_t f = 0; f < p0[i].scores.size(); ++f)
      CHECK(p1[i].scores[f] == doctest::Approx(p0[i].scores[f]).epsilon(1e-8));
}

TEST_CASE("projection") {
  const auto d = one_dimensional();
  const auto model = fit_mda(d);
  const auto scores = project_cases(d, model);
  REQUIRE(scores.size() == 4);
  // Affine image of the raw values: (x - 3) / 2.
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(scores[i].scores[0] == doctest::Approx((d.x(i, 0) - 3.0) / 2.0));
  const std::vector<double> mean_a{1.0};
  CHECK(project(model, mean_a)[0] == doctest::Approx(model.functions[0].group_centroids[0]));

  GroupedData empty = d;
  empty.x = Matrix(0, 1);
  empty.groups.clear();
  empty.case_ids.clear();
  CHECK(project_cases(empty, model).empty());

  const std::string csv = format_case_scores_csv(scores, model);
  CHECK(csv.starts_with("report_id,group,score_f1\nc0,a,"));
  CHECK(csv.find("\ncentroid,b,") != std::string::npos);
}

TEST_CASE("MDA result JSON round trip") {
  Rng rng(8);
  const auto d = separated_groups(rng, 2.0, 30);
  const MdaResult r = run_mda(d);
  REQUIRE(r.box_m);
  const MdaResult back = parse_mda_json(format_mda_json(r));
  CHECK(back.eigenvalues == r.eigenvalues);
  CHECK(back.coefficients == r.coefficients);
  CHECK(back.centroids == r.centroids);
  CHECK(back.wilks.size() == r.wilks.size());
  CHECK(back.wilks[0].chi_square == r.wilks[0].chi_square);
  CHECK(back.box_m->m == r.box_m->m);
  CHECK(back.classification.counts == r.classification.counts);
  CHECK(back.classification.hit_rate == r.classification.hit_rate);
  CHECK(format_mda_json(back) == format_mda_json(r));
  CHECK_THROWS_AS(parse_mda_json("{"), ValidationError);
}
