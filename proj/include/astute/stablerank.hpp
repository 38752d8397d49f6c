#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "astute/datasets.hpp"
#include "astute/error.hpp"
#include "astute/linalg.hpp"
#include "astute/nn.hpp"

namespace astute {

struct StableRankReport {
  double value = 0.0;  // ‖M‖_F / ‖M‖₂
  std::size_t rows = 0;
  std::size_t cols = 0;
  double frobenius = 0.0;
  double spectral = 0.0;
  bool converged = false;
};

inline StableRankReport stable_rank(const Matrix& m) {
  StableRankReport r;
  r.rows = m.rows();
  r.cols = m.cols();
  r.frobenius = frobenius_norm(m);
  if (r.frobenius == 0.0) throw ArgumentError("stable_rank: undefined for the zero matrix");
  const auto sn = spectral_norm(m);
  r.spectral = sn.value;
  r.converged = sn.converged;
  r.value = r.frobenius / r.spectral;
  return r;
}

/// Y_ij = ‖x_i − x_j‖², D_ij = ‖φ(x_i) − φ(x_j)‖².
struct DistanceMatrices {
  Matrix Y;
  Matrix D;
};

inline DistanceMatrices distance_matrices(const Matrix& inputs, const Matrix& embeddings) {
  if (inputs.rows() != embeddings.rows())
    throw DimensionError("distance_matrices: inputs and embeddings have different row counts");
  if (inputs.rows() < 2) throw ArgumentError("distance_matrices: need at least 2 points");
  return {pairwise_sq_dist(inputs), pairwise_sq_dist(embeddings)};
}

/// D through the Gram identity D = 1·diag(G)ᵀ + diag(G)·1ᵀ − 2G with
/// G the Gram matrix of the embedding rows.
inline Matrix distance_matrix_gram(const Matrix& embeddings) {
  const auto g = row_gram(embeddings);
  const std::size_t n = g.rows();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d(i, j) = i == j ? 0.0 : g(i, i) + g(j, j) - 2.0 * g(i, j);
  return d;
}

/// (‖D‖_F² / ‖Y‖_F²)^{1/4}, a lower bound on the Lipschitz constant of φ.
inline double lipschitz_lower_bound(const Matrix& Y, const Matrix& D) {
  const double y = frobenius_norm(Y);
  if (y == 0.0) throw ArgumentError("lipschitz_lower_bound: all input points identical");
  return std::sqrt(frobenius_norm(D) / y);
}

/// The expansion
///   ‖D‖_F² = 4(n−2)‖diag G‖₂² S(diag G)² − 8 tr(J G diag G) + 2‖X‖₂⁴ S(X)⁴
/// evaluated term by term (G the Gram matrix of the embedding rows, J the
/// all-ones matrix with zero diagonal) next to the direct ‖D‖_F².
struct ClosedFormDiagnostic {
  double direct = 0.0;       // ground truth
  double closed_form = 0.0;  // the expansion above
  double term_diag = 0.0;
  double term_cross = 0.0;
  double term_stable = 0.0;
  double relative_discrepancy = 0.0;  // (closed_form − direct) / direct
};

inline ClosedFormDiagnostic closed_form_D_frobenius(const Matrix& embeddings) {
  const std::size_t n = embeddings.rows();
  if (n < 3) throw ArgumentError("closed_form_D_frobenius: need at least 3 points");
  ClosedFormDiagnostic out;
  const double dnorm = frobenius_norm(pairwise_sq_dist(embeddings));
  out.direct = dnorm * dnorm;

  const auto g = row_gram(embeddings);
  std::vector<double> gd(n);
  for (std::size_t i = 0; i < n; ++i) gd[i] = g(i, i);
  // diag G is diagonal, so its spectral norm is max |G_ii|.
  double diag_frob = 0.0, diag_spec = 0.0;
  for (double v : gd) {
    diag_frob += v * v;
    diag_spec = std::max(diag_spec, std::abs(v));
  }
  diag_frob = std::sqrt(diag_frob);
  if (diag_spec > 0.0) {
    const double s = diag_frob / diag_spec;
    out.term_diag = 4.0 * (static_cast<double>(n) - 2.0) * diag_spec * diag_spec * s * s;
  }
  // tr(J G diag G) = Σ_i (JG)_ii G_ii
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double jg_ii = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) jg_ii += g(k, i);
    trace += jg_ii * gd[i];
  }
  out.term_cross = -8.0 * trace;
  if (frobenius_norm(embeddings) > 0.0) {
    const auto sx = stable_rank(embeddings);
    out.term_stable = 2.0 * std::pow(sx.spectral, 4) * std::pow(sx.value, 4);
  }
  out.closed_form = out.term_diag + out.term_cross + out.term_stable;
  out.relative_discrepancy =
      out.direct > 0.0 ? (out.closed_form - out.direct) / out.direct : std::numeric_limits<double>::quiet_NaN();
  return out;
}

struct LipschitzBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t layer = 0;
  bool converged = false;
};

struct SweepRow {
  std::size_t layer = 0;
  StableRankReport stable;
  LipschitzBounds bounds;
  double closed_form_discrepancy = 0.0;
};

/// For each requested layer: stable rank of the embedding matrix, the
/// Lipschitz lower bound of the input→layer map and the spectral-norm
/// upper bound of the same map.
inline std::vector<SweepRow> stable_rank_sweep(const Mlp& m, const Matrix& inputs,
                                               const std::vector<std::size_t>& layers) {
  std::vector<SweepRow> rows;
  const auto Y = pairwise_sq_dist(inputs);
  for (std::size_t k : layers) {
    const auto emb = layer_embedding(m, inputs, k);
    SweepRow row;
    row.layer = k;
    row.stable = stable_rank(emb);
    row.bounds.layer = k;
    row.bounds.lower = lipschitz_lower_bound(Y, pairwise_sq_dist(emb));
    row.bounds.upper = lipschitz_upper_bound(m, k);
    row.bounds.converged = row.stable.converged;
    row.closed_form_discrepancy =
        inputs.rows() >= 3 ? closed_form_D_frobenius(emb).relative_discrepancy : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace astute
