#include "ecoreport/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "ecoreport/error.hpp"

namespace ecoreport {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ValidationError("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::norm_inf() const noexcept {
  double best = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (double v : row(r)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

double Matrix::trace() const {
  if (!square()) throw ValidationError("trace of non-square matrix");
  double t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("matrix shape mismatch");
}

void require_square(const Matrix& m, const char* what) {
  if (!m.square())
    throw ValidationError(std::string(what) + ": matrix is not square");
}

// In-place LU with partial pivoting. Returns the permutation sign, or 0 if a
// pivot falls below the singularity threshold (first such index in *bad).
int lu_decompose(Matrix& a, std::vector<std::size_t>& perm, std::size_t* bad) {
  const std::size_t n = a.rows();
  perm.resize(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  const double tol = kSingularityThreshold * std::max(a.max_abs(), 1e-300);
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (!(std::abs(a(piv, k)) >= tol) || std::abs(a(piv, k)) == 0.0) {
      if (bad) *bad = k;
      return 0;
    }
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(piv, c));
      std::swap(perm[k], perm[piv]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      a(i, k) = f;
      for (std::size_t c = k + 1; c < n; ++c) a(i, c) -= f * a(k, c);
    }
  }
  return sign;
}

}  // namespace

Matrix& Matrix::operator+=(const Matrix& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ValidationError("matrix product shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw ValidationError("matrix-vector shape mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

void require_symmetric(const Matrix& m, const char* what) {
  require_square(m, what);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double a = m(i, j);
      if (std::abs(a - m(j, i)) > 1e-10 * std::max(1.0, std::abs(a)))
        throw ValidationError(std::string(what) + ": matrix is not symmetric");
    }
}

double determinant(const Matrix& m) {
  require_square(m, "determinant");
  if (m.rows() == 0) return 1.0;
  Matrix lu = m;
  std::vector<std::size_t> perm;
  const int sign = lu_decompose(lu, perm, nullptr);
  if (sign == 0) return 0.0;
  double det = sign;
  for (std::size_t i = 0; i < lu.rows(); ++i) det *= lu(i, i);
  return det;
}

LogDet log_determinant(const Matrix& m) {
  require_square(m, "log_determinant");
  Matrix lu = m;
  std::vector<std::size_t> perm;
  std::size_t bad = 0;
  int sign = lu_decompose(lu, perm, &bad);
  if (sign == 0) throw SingularityError("log_determinant: singular matrix", bad);
  double acc = 0.0;
  for (std::size_t i = 0; i < lu.rows(); ++i) {
    if (lu(i, i) < 0) sign = -sign;
    acc += std::log(std::abs(lu(i, i)));
  }
  return {acc, sign};
}

Matrix inverse(const Matrix& m) {
  require_square(m, "inverse");
  const std::size_t n = m.rows();
  Matrix lu = m;
  std::vector<std::size_t> perm;
  std::size_t bad = 0;
  if (lu_decompose(lu, perm, &bad) == 0)
    throw SingularityError("inverse: singular matrix at pivot " + std::to_string(bad), bad);

  Matrix inv(n, n);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = perm[i] == j ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < i; ++k) col[i] -= lu(i, k) * col[k];
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t k = i + 1; k < n; ++k) col[i] -= lu(i, k) * col[k];
      col[i] /= lu(i, i);
    }
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

Matrix cholesky(const Matrix& m) {
  require_symmetric(m, "cholesky");
  const std::size_t n = m.rows();
  Matrix l(n, n);
  const double tol = kSingularityThreshold * std::max(m.max_abs(), 1e-300);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > tol))
      throw ConditioningError("matrix is not positive definite (pivot " +
                              std::to_string(j) + ")");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

double spd_log_determinant(const Matrix& m) {
  const Matrix l = cholesky(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

std::vector<EigenPair> symmetric_eigen(const Matrix& input) {
  require_symmetric(input, "symmetric_eigen");
  const std::size_t n = input.rows();
  Matrix a = input;
  // Symmetrize exactly so rotations see a consistent matrix.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
  Matrix v = Matrix::identity(n);

  double scale = 0.0;
  for (double x : a.data()) scale += x * x;
  scale = std::sqrt(scale);
  const double target = 1e-12 * std::max(scale, 1e-300);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_norm() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<EigenPair> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j].value = a(j, j);
    out[j].vector.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[j].vector[i] = v(i, j);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EigenPair& x, const EigenPair& y) { return x.value > y.value; });
  return out;
}

std::vector<EigenPair> generalized_eigen(const Matrix& b, const Matrix& w) {
  require_symmetric(b, "generalized_eigen(B)");
  require_symmetric(w, "generalized_eigen(W)");
  if (b.rows() != w.rows()) throw ValidationError("generalized_eigen: dimension mismatch");
  const std::size_t n = b.rows();

  const Matrix l = cholesky(w);
  const Matrix linv = inverse(l);
  Matrix c = linv * b * linv.transposed();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) c(i, j) = c(j, i) = 0.5 * (c(i, j) + c(j, i));

  auto pairs = symmetric_eigen(c);
  const Matrix lt_inv = linv.transposed();
  for (auto& pr : pairs) {
    pr.vector = lt_inv * std::span<const double>(pr.vector);
    double biggest = 0.0;
    for (double x : pr.vector) biggest = std::max(biggest, std::abs(x));
    for (double x : pr.vector) {
      if (std::abs(x) > 1e-12 * biggest) {
        if (x < 0)
          for (double& y : pr.vector) y = -y;
        break;
      }
    }
  }
  return pairs;
}

}  // namespace ecoreport
