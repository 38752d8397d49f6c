#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "astute/linalg.hpp"

namespace oracle {

using astute::Matrix;
using astute::Vector;

inline Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

/// Singular values by one-sided Jacobi rotations, descending.
inline std::vector<double> singular_values(Matrix a) {
  if (a.rows() < a.cols()) a = a.transposed();
  const std::size_t m = a.rows(), n = a.cols();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0, beta = 0, gamma = 0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += a(i, p) * a(i, p);
          beta += a(i, q) * a(i, q);
          gamma += a(i, p) * a(i, q);
        }
        if (std::abs(gamma) < 1e-300) continue;
        off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
        const double zeta = (beta - alpha) / (2 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1 + zeta * zeta));
        const double c = 1 / std::sqrt(1 + t * t), s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double x = a(i, p), y = a(i, q);
          a(i, p) = c * x - s * y;
          a(i, q) = s * x + c * y;
        }
      }
    if (off < 1e-15) break;
  }
  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += a(i, j) * a(i, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.rbegin(), sv.rend());
  return sv;
}

/// Least squares by modified Gram-Schmidt QR on √w-scaled rows.
inline Vector least_squares_qr(const Matrix& a, const Vector& b, const Vector& w) {
  const std::size_t m = a.rows(), n = a.cols();
  Matrix q(m, n);
  Vector y(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = std::sqrt(w[i]);
    for (std::size_t j = 0; j < n; ++j) q(i, j) = s * a(i, j);
    y[i] = s * b[i];
  }
  Matrix r(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double d = 0;
      for (std::size_t i = 0; i < m; ++i) d += q(i, k) * q(i, j);
      r(k, j) = d;
      for (std::size_t i = 0; i < m; ++i) q(i, j) -= d * q(i, k);
    }
    double nrm = 0;
    for (std::size_t i = 0; i < m; ++i) nrm += q(i, j) * q(i, j);
    nrm = std::sqrt(nrm);
    r(j, j) = nrm;
    for (std::size_t i = 0; i < m; ++i) q(i, j) /= nrm;
  }
  Vector qty(n, 0.0), x(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) qty[j] += q(i, j) * y[i];
  for (std::size_t j = n; j-- > 0;) {
    double s = qty[j];
    for (std::size_t k = j + 1; k < n; ++k) s -= r(j, k) * x[k];
    x[j] = s / r(j, j);
  }
  return x;
}

/// Exact Shapley values of the set function v over d players.
inline Vector shapley(std::size_t d, const std::function<double(const std::vector<char>&)>& v) {
  Vector phi(d, 0.0);
  std::vector<double> fact(d + 1, 1.0);
  for (std::size_t k = 1; k <= d; ++k) fact[k] = fact[k - 1] * static_cast<double>(k);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << d); ++bits) {
    std::vector<char> z(d);
    std::size_t s = 0;
    for (std::size_t i = 0; i < d; ++i) s += (z[i] = (bits >> i) & 1u);
    const double vs = v(z);
    for (std::size_t i = 0; i < d; ++i) {
      if (z[i]) continue;
      auto zi = z;
      zi[i] = 1;
      const double wgt = fact[s] * fact[d - s - 1] / fact[d];
      phi[i] += wgt * (v(zi) - vs);
    }
  }
  return phi;
}

/// ∫₀¹ F(t·max) dt for the empirical CDF F of `ratios`, summed piece by piece.
inline double ecdf_normalized_integral(std::vector<double> ratios) {
  std::sort(ratios.begin(), ratios.end());
  const double mx = ratios.back();
  if (mx == 0.0) return 1.0;
  const double n = static_cast<double>(ratios.size());
  double area = 0.0;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    const double lo = ratios[k] / mx;
    const double hi = k + 1 < ratios.size() ? ratios[k + 1] / mx : 1.0;
    area += (hi - lo) * static_cast<double>(k + 1) / n;
  }
  return area;
}

}  // namespace oracle
