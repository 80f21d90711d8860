#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecoreport/matrix.hpp"
#include "ecoreport/scoring.hpp"

namespace ecoreport {

/// Cases (rows of `x`) with a group label in [0, group_names.size()).
struct GroupedData {
  Matrix x;
  std::vector<std::size_t> groups;
  std::vector<std::string> group_names;
  std::vector<std::string> case_ids;
  std::vector<std::string> variable_ids;

  std::size_t cases() const noexcept { return x.rows(); }
  std::size_t variables() const noexcept { return x.cols(); }
  std::size_t group_count() const noexcept { return group_names.size(); }
};

/// Score variables of the cards as a data matrix. Groups are the sectors
/// present, in primary/secondary/tertiary order.
GroupedData grouped_scores(const std::vector<ScoreCard>& cards);

struct ScatterPair {
  Matrix within;   // W, pooled within-group scatter
  Matrix between;  // B
  std::vector<std::size_t> group_sizes;
  std::vector<std::vector<double>> group_means;
  std::vector<double> grand_mean;
};

/// Requires >= 2 groups, each nonempty. W may be singular here; the
/// canonical step reports conditioning problems.
ScatterPair scatter_matrices(const GroupedData& data);

struct CanonicalFunction {
  std::size_t index = 0;  // 1-based
  double eigenvalue = 0.0;
  std::vector<double> coefficients;
  std::vector<double> group_centroids;
};

/// Top min(p, g-1) solutions of B v = lambda W v, coefficients scaled so
/// v' W v = 1. Throws ConditioningError when W is not positive definite.
std::vector<CanonicalFunction> canonical_functions(const ScatterPair& sp);

struct WilksTest {
  std::string label;  // "1 through 2", "2"
  std::size_t first_function = 1;
  double lambda = 1.0;
  double chi_square = 0.0;
  std::size_t df = 0;
  double p = 1.0;
};

/// Bartlett's approximation -(N - 1 - (p + g)/2) ln(lambda).
double bartlett_chi_square(double lambda, std::size_t n, std::size_t p, std::size_t g);

/// One test per k = 1..m over eigenvalues k..m (m = eigenvalues.size()).
/// Requires N > p + g.
std::vector<WilksTest> wilks_tests(std::span<const double> eigenvalues, std::size_t n,
                                   std::size_t p, std::size_t g);

struct BoxMResult {
  double m = 0.0;
  double f_approx = 0.0;
  std::size_t df1 = 0;
  double df2 = 0.0;
  double p = 1.0;
};

/// Box's two-moment F approximation of a given M statistic.
BoxMResult box_m_approximation(double m, std::span<const std::size_t> group_sizes, std::size_t p);

/// Unbiased covariance of each group's cases.
std::vector<Matrix> group_covariances(const GroupedData& data);

/// M = (N - g) ln|S_pooled| - sum (n_i - 1) ln|S_i| plus its F approximation.
/// Throws ConditioningError naming the group whose covariance is singular.
BoxMResult box_m(const GroupedData& data);

struct ClassificationMatrix {
  std::vector<std::string> group_names;
  std::vector<std::vector<std::size_t>> counts;       // actual x predicted
  std::vector<std::vector<double>> row_percentages;  // full precision
  double hit_rate = 0.0;                              // 100 * trace / total
};

ClassificationMatrix classification_from_counts(std::vector<std::vector<std::size_t>> counts,
                                                std::vector<std::string> group_names = {});

struct MdaModel {
  ScatterPair scatter;
  std::vector<CanonicalFunction> functions;
  std::vector<WilksTest> wilks;
  std::vector<std::string> group_names;
  std::vector<std::string> variable_ids;
  std::size_t cases = 0;
};

MdaModel fit_mda(const GroupedData& data);

/// Canonical scores of one observation, centered on the grand mean.
std::vector<double> project(const MdaModel& model, std::span<const double> x);

/// Resubstitution: each case goes to the nearest group centroid (Euclidean,
/// canonical space, equal priors).
ClassificationMatrix classify(const GroupedData& data, const MdaModel& model);

struct CaseScore {
  std::string report_id;
  std::string group;
  std::vector<double> scores;
};

std::vector<CaseScore> project_cases(const GroupedData& data, const MdaModel& model);

/// Everything the `mda` stage emits.
struct MdaResult {
  std::vector<std::string> group_names;
  std::vector<std::string> variable_ids;
  std::size_t cases = 0;
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> coefficients;
  std::vector<std::vector<double>> centroids;  // [function][group]
  std::vector<WilksTest> wilks;
  std::optional<BoxMResult> box_m;
  std::string box_m_error;
  ClassificationMatrix classification;
};

MdaResult run_mda(const GroupedData& data);

std::string format_mda_json(const MdaResult& r);
MdaResult parse_mda_json(std::string_view text);
void write_mda_json(const std::filesystem::path& path, const MdaResult& r);
MdaResult read_mda_json(const std::filesystem::path& path);

// CSV header `report_id,group,score_f1,score_f2` (one score column per
// function). Group centroids follow the cases with report_id "centroid".
std::string format_case_scores_csv(const std::vector<CaseScore>& cases,
                                   const MdaModel& model);
void write_case_scores_csv(const std::filesystem::path& path, const std::vector<CaseScore>& cases,
                           const MdaModel& model);

}  // namespace ecoreport
