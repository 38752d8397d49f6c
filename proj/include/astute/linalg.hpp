#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "astute/error.hpp"

namespace astute {

using Vector = std::vector<double>;

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                           " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static Matrix diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double sq_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(sq_distance(a, b));
}

inline Vector matvec(const Matrix& m, std::span<const double> x) {
  if (m.cols() != x.size())
    throw DimensionError("matvec: " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         " times length " + std::to_string(x.size()));
  Vector y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) y[i] = dot(m.row(i), x);
  return y;
}

/// y = mᵀ x
inline Vector matvec_transposed(const Matrix& m, std::span<const double> x) {
  if (m.rows() != x.size()) throw DimensionError("matvec_transposed: length mismatch");
  Vector y(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) y[j] += r[j] * x[i];
  }
  return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

/// Gram matrix of the rows: G = X Xᵀ.
inline Matrix row_gram(const Matrix& x) {
  Matrix g(x.rows(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = i; j < x.rows(); ++j) g(i, j) = g(j, i) = dot(x.row(i), x.row(j));
  return g;
}

inline double frobenius_norm(const Matrix& m) {
  if (m.empty()) throw DimensionError("frobenius_norm: empty matrix");
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

struct SpectralNormResult {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Largest singular value by power iteration on MᵀM. Starts from the
/// normalized all-ones vector; if the iterate collapses to zero (start
/// orthogonal to the top right-singular vector) it restarts from a seeded
/// random vector.
inline SpectralNormResult spectral_norm(const Matrix& m, double tol = 1e-10,
                                        std::size_t max_iter = 10'000) {
  if (m.empty()) throw DimensionError("spectral_norm: empty matrix");
  if (!(tol > 0.0)) throw ArgumentError("spectral_norm: tol must be positive");

  SpectralNormResult out;
  if (frobenius_norm(m) == 0.0) {
    out.converged = true;
    return out;
  }

  const std::size_t n = m.cols();
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double sigma = 0.0;
  for (int restart = 0; restart < 8; ++restart) {
    sigma = 0.0;
    bool stalled = false;
    for (std::size_t it = 0; it < max_iter; ++it) {
      ++out.iterations;
      Vector w = matvec_transposed(m, matvec(m, v));
      const double wn = norm2(w);
      if (wn == 0.0) {
        stalled = true;
        break;
      }
      // Rayleigh quotient vᵀMᵀMv = ‖Mv‖² with ‖v‖ = 1
      const double next = std::sqrt(dot(v, w));
      for (std::size_t j = 0; j < n; ++j) v[j] = w[j] / wn;
      if (sigma > 0.0 && std::abs(next - sigma) <= tol * next) {
        sigma = next;
        out.converged = true;
        break;
      }
      sigma = next;
    }
    if (!stalled) break;
    for (auto& x : v) x = gauss(rng);
    const double vn = norm2(v);
    for (auto& x : v) x /= vn;
  }
  // Final estimate from the converged direction: ‖Mv‖.
  out.value = std::max(sigma, norm2(matvec(m, v)));
  return out;
}

/// Solves the symmetric positive definite system A x = b in place via
/// Cholesky. Returns false if A is not numerically positive definite.
inline bool cholesky_solve(Matrix a, Vector& b) {
  const std::size_t n = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double floor = max_diag * 1e-13;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > floor)) return false;
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / ljj;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * b[k];
    b[i] = s / a(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a(k, i) * b[k];
    b[i] = s / a(i, i);
  }
  return true;
}

/// argmin_β Σᵢ wᵢ(Aᵢβ − bᵢ)² + ridge‖β‖² through the normal equations.
/// `unpenalized` columns (e.g. an intercept) are excluded from the ridge term.
inline Vector weighted_least_squares(const Matrix& a, std::span<const double> b,
                                     std::span<const double> w, double ridge,
                                     std::span<const std::size_t> unpenalized = {}) {
  if (a.rows() != b.size() || a.rows() != w.size())
    throw DimensionError("weighted_least_squares: rows(A), len(b), len(w) differ");
  if (ridge < 0.0) throw ArgumentError("weighted_least_squares: ridge must be >= 0");
  for (double wi : w)
    if (!(wi >= 0.0)) throw ArgumentError("weighted_least_squares: negative weight");

  const std::size_t p = a.cols();
  Matrix gram(p, p);
  Vector rhs(p, 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (w[i] == 0.0) continue;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < p; ++j) {
      const double wr = w[i] * r[j];
      rhs[j] += wr * b[i];
      for (std::size_t k = j; k < p; ++k) gram(j, k) += wr * r[k];
    }
  }
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < j; ++k) gram(j, k) = gram(k, j);
  for (std::size_t j = 0; j < p; ++j)
    if (std::find(unpenalized.begin(), unpenalized.end(), j) == unpenalized.end())
      gram(j, j) += ridge;

  Vector beta = rhs;
  if (cholesky_solve(gram, beta)) return beta;
  if (ridge == 0.0)
    throw SingularityError("weighted_least_squares: singular normal equations; use ridge > 0");

  // Penalized but still numerically singular: add a diagonal jitter.
  double max_diag = 0.0;
  for (std::size_t j = 0; j < p; ++j) max_diag = std::max(max_diag, gram(j, j));
  for (std::size_t j = 0; j < p; ++j) gram(j, j) += 1e-10 * std::max(max_diag, 1.0);
  beta = rhs;
  if (!cholesky_solve(gram, beta))
    throw SingularityError("weighted_least_squares: singular normal equations");
  return beta;
}

/// Y_ij = ‖x_i − x_j‖² over the rows of `x`.
inline Matrix pairwise_sq_dist(const Matrix& x) {
  const std::size_t n = x.rows();
  Matrix y(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) y(i, j) = y(j, i) = sq_distance(x.row(i), x.row(j));
  return y;
}

}  // namespace astute
