#include <gtest/gtest.h>

#include <random>

#include "astute/stablerank.hpp"
#include "oracles.hpp"

using namespace astute;

namespace {

double double_loop_D_sq(const Matrix& emb) {
  double s = 0;
  for (std::size_t i = 0; i < emb.rows(); ++i)
    for (std::size_t j = 0; j < emb.rows(); ++j) {
      double d = 0;
      for (std::size_t k = 0; k < emb.cols(); ++k) d += (emb(i, k) - emb(j, k)) * (emb(i, k) - emb(j, k));
      s += d * d;
    }
  return s;
}

}  // namespace

TEST(StableRank, UnitValues) {
  EXPECT_NEAR(stable_rank(Matrix::identity(4)).value, 2.0, 1e-8);
  const double d[] = {3.0, 4.0};
  EXPECT_NEAR(stable_rank(Matrix::diagonal(d)).value, 1.25, 1e-8);
  Matrix rank1(3, 2, Vector{1, 2, 2, 4, -1, -2});
  EXPECT_NEAR(stable_rank(rank1).value, 1.0, 1e-8);
  EXPECT_THROW(stable_rank(Matrix(2, 2)), ArgumentError);
}

TEST(StableRank, BoundedByRootOfMinDimension) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 30; ++t) {
    const auto m = oracle::random_matrix(1 + t % 6, 1 + t % 5 + t % 3, rng);
    const double sr = stable_rank(m).value;
    EXPECT_GE(sr, 1.0 - 1e-9);
    EXPECT_LE(sr, std::sqrt(static_cast<double>(std::min(m.rows(), m.cols()))) + 1e-6);
    const auto sv = oracle::singular_values(m);
    double f = 0;
    for (double s : sv) f += s * s;
    EXPECT_NEAR(sr, std::sqrt(f) / sv.front(), 1e-6);
  }
}

TEST(DistanceMatrices, GramPathMatchesDirectPath) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    const auto emb = oracle::random_matrix(3 + t % 7, 1 + t % 4, rng);
    const auto direct = pairwise_sq_dist(emb);
    const auto gram = distance_matrix_gram(emb);
    for (std::size_t i = 0; i < emb.rows(); ++i)
      for (std::size_t j = 0; j < emb.rows(); ++j) EXPECT_NEAR(direct(i, j), gram(i, j), 1e-8);
  }
  EXPECT_THROW(distance_matrices(Matrix(3, 2), Matrix(4, 2)), DimensionError);
}

TEST(LipschitzLowerBound, IdentityAndScaling) {
  std::mt19937_64 rng(14);
  const auto x = oracle::random_matrix(8, 3, rng);
  const auto Y = pairwise_sq_dist(x);
  EXPECT_NEAR(lipschitz_lower_bound(Y, Y), 1.0, 1e-12);
  Matrix scaled = x;
  for (auto& v : scaled.data()) v *= -2.5;
  EXPECT_NEAR(lipschitz_lower_bound(Y, pairwise_sq_dist(scaled)), 2.5, 1e-12);
  EXPECT_THROW(lipschitz_lower_bound(Matrix(3, 3), Y), ArgumentError);
}

TEST(LipschitzLowerBound, NeverExceedsMaxPairRatio) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 20; ++t) {
    const auto x = oracle::random_matrix(10, 2, rng);
    const auto e = oracle::random_matrix(10, 3, rng);
    double mx = 0;
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = i + 1; j < 10; ++j)
        mx = std::max(mx, distance(e.row(i), e.row(j)) / distance(x.row(i), x.row(j)));
    EXPECT_LE(lipschitz_lower_bound(pairwise_sq_dist(x), pairwise_sq_dist(e)), mx + 1e-12);
  }
}

TEST(ClosedForm, DirectValueMatchesDoubleLoop) {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 50; ++t) {
    const auto emb = oracle::random_matrix(3 + t % 6, 1 + t % 5, rng);
    const auto cf = closed_form_D_frobenius(emb);
    EXPECT_NEAR(cf.direct, double_loop_D_sq(emb), 1e-8 * std::max(1.0, cf.direct));
    EXPECT_TRUE(std::isfinite(cf.relative_discrepancy));
    EXPECT_NEAR(cf.closed_form, cf.term_diag + cf.term_cross + cf.term_stable, 1e-9 * std::abs(cf.closed_form));
  }
}

TEST(ClosedForm, OrthonormalRowsKnownDiscrepancy) {
  // Rows e1, e2, e3: every off-diagonal squared distance is 2, so the direct
  // value is 6·4 = 24; the expansion evaluates to 12 + 0 + 18 = 30.
  const auto cf = closed_form_D_frobenius(Matrix::identity(3));
  EXPECT_NEAR(cf.direct, 24.0, 1e-12);
  EXPECT_NEAR(cf.closed_form, 30.0, 1e-9);
  EXPECT_NEAR(cf.relative_discrepancy, 0.25, 1e-9);
  EXPECT_THROW(closed_form_D_frobenius(Matrix(2, 2)), ArgumentError);
}

TEST(Sweep, LayerZeroIsIdentityAndChainHolds) {
  const auto m = make_mlp({2, 8, 8, 2}, Activation::tanh(), OutputMode::softmax_classifier, 3);
  std::mt19937_64 rng(17);
  const auto x = oracle::random_matrix(25, 2, rng);
  const auto rows = stable_rank_sweep(m, x, {0, 1, 2, 3});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_NEAR(rows[0].bounds.lower, 1.0, 1e-12);
  EXPECT_NEAR(rows[0].bounds.upper, 1.0, 1e-12);
  for (const auto& r : rows) EXPECT_LE(r.bounds.lower, r.bounds.upper + 1e-12);
  EXPECT_EQ(stable_rank_sweep(m, x, {3})[0].stable.value, rows[3].stable.value);
}
