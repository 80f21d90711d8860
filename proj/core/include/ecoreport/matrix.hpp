#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ecoreport {

/// Dense row-major matrix of doubles. Sized for the small (p <= ~10)
/// problems of the statistics modules; no blocking or expression templates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;
  double max_abs() const noexcept;
  /// Maximum absolute row sum.
  double norm_inf() const noexcept;
  double trace() const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// Pivot magnitudes below this fraction of the largest entry count as zero.
inline constexpr double kSingularityThreshold = 1e-12;

/// Throws ValidationError unless |a_ij - a_ji| <= 1e-10 * max(1, |a_ij|).
void require_symmetric(const Matrix& m, const char* what);

/// LU with partial pivoting; 0 when the matrix is numerically singular.
double determinant(const Matrix& m);

/// Natural log of |det|, with the sign reported separately. Throws
/// SingularityError on a zero pivot.
struct LogDet {
  double log_abs;
  int sign;
};
LogDet log_determinant(const Matrix& m);

/// Throws SingularityError naming the pivot index when singular.
Matrix inverse(const Matrix& m);

/// Lower-triangular L with m = L L^T. Throws ConditioningError if m is not
/// positive definite.
Matrix cholesky(const Matrix& m);

/// Log-determinant of a symmetric positive-definite matrix via Cholesky.
double spd_log_determinant(const Matrix& m);

struct EigenPair {
  double value;
  std::vector<double> vector;
};

/// Symmetric eigenproblem by cyclic Jacobi rotations, iterated until the
/// off-diagonal Frobenius norm drops below 1e-12 (relative to the input
/// norm). Eigenpairs sorted by value descending, unit-norm vectors.
std::vector<EigenPair> symmetric_eigen(const Matrix& a);

/// Solves B v = lambda W v for symmetric B and symmetric positive-definite W.
/// Vectors are normalized so that v' W v = 1 and the first nonzero component
/// is positive. Sorted by eigenvalue descending.
std::vector<EigenPair> generalized_eigen(const Matrix& b, const Matrix& w);

}  // namespace ecoreport
