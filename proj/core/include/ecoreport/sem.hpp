#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecoreport/matrix.hpp"

namespace ecoreport {

/// Free parameter, or fixed at `value`.
struct ParamStatus {
  bool free = true;
  double value = 0.0;

  static ParamStatus make_free() { return {true, 0.0}; }
  static ParamStatus fixed(double v) { return {false, v}; }
  friend bool operator==(const ParamStatus&, const ParamStatus&) = default;
};

enum class Identification {
  unit_variance,  // latent variances default to fixed 1
  first_loading,  // first listed loading fixed to 1, variance free
};

struct LoadingSpec {
  std::size_t latent;
  std::size_t observed;
  ParamStatus status;
};

/// a == b is a latent variance.
struct LatentCovSpec {
  std::size_t a;
  std::size_t b;
  ParamStatus status;
};

/// Confirmatory factor model: Sigma = Lambda Phi Lambda' + Theta.
struct SemModelSpec {
  std::vector<std::string> observed;
  std::vector<std::string> latents;
  std::vector<LoadingSpec> loadings;
  /// After validation every latent variance has an entry here.
  std::vector<LatentCovSpec> latent_covariances;
  std::vector<ParamStatus> residuals;  // one per observed variable
  Identification identification = Identification::unit_variance;

  std::size_t free_parameter_count() const;
  /// p(p+1)/2 - t for p = observed.size().
  long long degrees_of_freedom() const;
};

/// Model config sections: [observed], [latents], [options], [loadings]
/// (`latent -> observed free|= value`), [covariances]
/// (`a <-> b free|= value`), [residuals] (`observed free|= value`).
SemModelSpec parse_model(std::string_view text, std::string_view source = "model");
SemModelSpec load_model(const std::filesystem::path& path);

/// Fills defaults (latent variances, residuals), applies the identification
/// mode and checks: every latent has an indicator and a scale, no duplicate
/// entries, df >= 0.
void validate_model(SemModelSpec& model);

enum class ParamKind { loading, latent_covariance, residual };

struct ParamInfo {
  ParamKind kind;
  std::size_t entry;  // index into loadings / latent_covariances / residuals
  std::string name;   // "stakeholder -> v6", "a <-> b", "v3"
};

/// Free parameters in vector order: loadings, latent covariances, residuals.
std::vector<ParamInfo> free_parameters(const SemModelSpec& model);

struct ModelMatrices {
  Matrix lambda;  // p x m
  Matrix phi;     // m x m
  Matrix theta;   // p x p diagonal
};

/// Assembles the matrices from fixed values and `params` (free values in
/// free_parameters order).
ModelMatrices model_matrices(const SemModelSpec& model, std::span<const double> params);

/// Throws BoundsError on a non-positive residual variance.
Matrix implied_covariance(const SemModelSpec& model, std::span<const double> params);

/// ln|Sigma| + tr(S Sigma^-1) - ln|S| - p. Throws ConditioningError unless
/// both inputs are positive definite.
double ml_discrepancy(const Matrix& s, const Matrix& sigma);

/// F_ML over the optimizer's coordinates: residual variances enter as their
/// logarithm, every other parameter as is. Non-PD implied covariance -> +inf.
class MlObjective {
 public:
  MlObjective(const SemModelSpec& model, const Matrix& s);

  std::size_t dimension() const noexcept { return info_.size(); }
  double value(std::span<const double> z) const;
  /// Central differences with step h * max(1, |z_i|).
  std::vector<double> gradient(std::span<const double> z, double h = 1e-5) const;

  std::vector<double> to_natural(std::span<const double> z) const;
  std::vector<double> to_internal(std::span<const double> params) const;
  const std::vector<ParamInfo>& parameters() const noexcept { return info_; }

 private:
  SemModelSpec model_;
  Matrix s_;
  std::vector<ParamInfo> info_;
};

/// Loadings 0.5, residual variances half the observed variances, latent
/// covariances 0, free latent variances 1.
std::vector<double> starting_values(const SemModelSpec& model, const Matrix& s);

struct FitOptions {
  std::size_t max_iterations = 500;
  double gradient_tolerance = 1e-6;
};

struct ParamEstimate {
  std::string name;
  ParamKind kind;
  double value;
};

struct SemFit {
  std::vector<ParamEstimate> estimates;
  std::vector<double> params;  // free values, free_parameters order
  double f_ml = 0.0;
  double chi_square = 0.0;
  long long df = 0;
  double p = 1.0;
  std::size_t n = 0;
  bool converged = false;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  bool heywood = false;
  std::vector<std::string> warnings;

  /// p > 0.05: the model is not rejected at the 5% level.
  bool acceptable() const { return p > 0.05; }
};

/// Quasi-Newton (BFGS) minimization of F_ML with finite-difference
/// gradients; deterministic from starting_values. Non-convergence is
/// reported through `converged`, not an exception.
SemFit fit_model(const SemModelSpec& model, const Matrix& s, std::size_t n,
                 const FitOptions& opts = {});

struct StandardizedEstimate {
  std::string name;
  ParamKind kind;
  double raw;
  double standardized;
};

/// Loadings (free and fixed nonzero) scaled by latent SD / observed SD,
/// latent covariances as correlations, residuals as a share of the observed
/// variance. Observed SDs come from `s`.
std::vector<StandardizedEstimate> standardized_estimates(const SemFit& fit,
                                                         const SemModelSpec& model,
                                                         const Matrix& s);

/// Unbiased covariance of the columns of `x` (rows are cases).
Matrix sample_covariance(const Matrix& x);

struct SemResult {
  SemFit fit;
  std::vector<StandardizedEstimate> standardized;
};

std::string format_sem_json(const SemResult& r);
SemResult parse_sem_json(std::string_view text);
void write_sem_json(const std::filesystem::path& path, const SemResult& r);
SemResult read_sem_json(const std::filesystem::path& path);

}  // namespace ecoreport
