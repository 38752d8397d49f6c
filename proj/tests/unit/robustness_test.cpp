#include <gtest/gtest.h>

#include <random>

#include "astute/robustness.hpp"
#include "oracles.hpp"

using namespace astute;

namespace {

PairSet all_pairs(const Matrix& x) { return eligible_pairs(x, std::numeric_limits<double>::infinity()); }

}  // namespace

TEST(PairRatios, LinearMapHasConstantRatio) {
  Matrix x(4, 1, Vector{0, 1, 3, 6});
  Matrix f(4, 1, Vector{0, 2, 6, 12});
  for (double q : pair_ratios(f, all_pairs(x))) EXPECT_DOUBLE_EQ(q, 2.0);
  EXPECT_THROW(pair_ratios(f, PairSet{}), EmptyPairsError);
}

TEST(ProbLipschitz, AlphaEndpoints) {
  Matrix x(3, 1, Vector{0, 1, 2});
  Matrix f(3, 1, Vector{0, 1, 5});
  const auto ps = all_pairs(x);
  EXPECT_EQ(empirical_prob_lipschitz(f, ps, 4.0).alpha, 0.0);
  EXPECT_EQ(empirical_prob_lipschitz(f, ps, 0.0).alpha, 1.0);
  EXPECT_NEAR(empirical_prob_lipschitz(f, ps, 1.0).alpha, 2.0 / 3.0, 1e-15);
  EXPECT_THROW(empirical_prob_lipschitz(f, ps, -1.0), ArgumentError);
}

TEST(Astuteness, FractionOfPairsWithinLambda) {
  const std::vector<double> q{0.5, 1.0, 2.0, 4.0};
  EXPECT_EQ(astuteness_from_ratios(q, 1.0), 0.5);
  EXPECT_EQ(astuteness_from_ratios(q, 4.0), 1.0);
  EXPECT_EQ(astuteness_from_ratios(q, 0.0), 0.0);
  EXPECT_THROW(astuteness_from_ratios({}, 1.0), EmptyPairsError);
}

TEST(AstutenessCurve, ContractsAndExactIntegralOnRandomInstances) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> count(1, 40), grid(2, 300);
  std::exponential_distribution<double> ratio(1.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> q(static_cast<std::size_t>(count(rng)));
    for (auto& v : q) v = ratio(rng);
    if (t % 10 == 0) q.push_back(q.front());  // ties
    const auto g = static_cast<std::size_t>(grid(rng));
    const auto c = astuteness_curve_from_ratios(q, g);
    ASSERT_EQ(c.lambdas.size(), g);
    for (std::size_t k = 1; k < g; ++k) EXPECT_GE(c.probs[k], c.probs[k - 1]);
    EXPECT_EQ(c.probs.back(), 1.0);
    EXPECT_EQ(c.lambdas.back(), c.lambda_max);
    const double auc = normalised_astuteness_auc(c);
    EXPECT_GE(auc, 0.0);
    EXPECT_LE(auc, 1.0);
    EXPECT_LE(std::abs(auc - oracle::ecdf_normalized_integral(q)), 1.0 / static_cast<double>(g)) << "case " << t;
  }
}

TEST(AstutenessCurve, ConstantExplainerIsDegenerateWithAucOne) {
  Matrix x(3, 1, Vector{0, 1, 2});
  Matrix e(3, 2, 0.5);
  const auto c = astuteness_curve(e, all_pairs(x));
  EXPECT_TRUE(c.degenerate);
  EXPECT_EQ(normalised_astuteness_auc(c), 1.0);
  EXPECT_THROW(astuteness_curve_from_ratios({1.0}, 1), ArgumentError);
}

TEST(LocalMetrics, MatchBruteForce) {
  std::mt19937_64 rng(5);
  const auto x = oracle::random_matrix(15, 2, rng);
  const auto e = oracle::random_matrix(15, 3, rng);
  const double eps = median_pairwise_distance(x);
  const auto nb = neighbor_lists(eligible_pairs(x, eps), 15);
  for (std::size_t i = 0; i < 15; ++i) {
    double mx = 0, sum = 0;
    int n = 0;
    for (std::size_t j = 0; j < 15; ++j) {
      const double d = distance(x.row(i), x.row(j));
      if (j == i || d > eps) continue;
      const double q = distance(e.row(i), e.row(j)) / d;
      mx = std::max(mx, q);
      sum += q;
      ++n;
    }
    const auto lle = local_lipschitz_estimate(e, x, i, nb[i]);
    const auto as = average_sensitivity(e, x, i, nb[i]);
    if (n == 0) {
      EXPECT_FALSE(lle.has_value());
      continue;
    }
    EXPECT_NEAR(*lle, mx, 1e-12);
    EXPECT_NEAR(*as, sum / n, 1e-12);
  }
}

TEST(TheoreticalLambda, Formulas) {
  EXPECT_NEAR(theoretical_lambda_ig(2.0, 4, 1.0, 0.5), 3 * 2 * 2 * 2.0, 1e-12);
  EXPECT_NEAR(theoretical_lambda_lime(1.0, 8, 2.0, 0.5), 1.0 + 2 * std::sqrt(16.0 + 4.0) / 0.5, 1e-12);
  EXPECT_NEAR(theoretical_lambda_sg(3.0, 0.25), 24.0, 1e-12);
  EXPECT_THROW(theoretical_lambda_sg(1.0, 0.0), ArgumentError);
}

TEST(VerifyTheorem, AlphaZeroRequiresFullAstuteness) {
  std::mt19937_64 rng(9);
  const auto x = oracle::random_matrix(20, 2, rng);
  const auto f = oracle::random_matrix(20, 2, rng);
  const auto e = oracle::random_matrix(20, 2, rng);
  const double r = median_pairwise_distance(x);
  const double L = max_pair_ratio(f, eligible_pairs(x, r));
  for (auto kind : {ExplainerKind::integrated_gradients, ExplainerKind::smoothgrad, ExplainerKind::lime}) {
    const auto v = verify_theorem(kind, x, f, e, r, {L, 0.0}, 20);
    ASSERT_EQ(v.checks.size(), 2u);
    EXPECT_EQ(v.checks[0].alpha, 0.0);
    EXPECT_EQ(v.checks[0].required, 1.0);
    EXPECT_LE(v.sup_d, r);
    EXPECT_EQ(v.checks[0].pass, v.checks[0].astuteness == 1.0);
    EXPECT_EQ(v.checks[1].alpha, 1.0);
    EXPECT_TRUE(v.checks[1].pass);
  }
  EXPECT_THROW(verify_theorem(ExplainerKind::kernel_shap, x, f, e, r, {L}, 20), ArgumentError);
  EXPECT_THROW(verify_theorem(ExplainerKind::lime, x, f, e, 1e-9, {L}, 20), EmptyPairsError);
}

TEST(Assess, OneLocalValuePerPoint) {
  std::mt19937_64 rng(10);
  const auto x = oracle::random_matrix(12, 2, rng);
  const auto e = oracle::random_matrix(12, 2, rng);
  const auto ps = eligible_pairs(x, median_pairwise_distance(x));
  const auto a = assess(e, x, ps, ps, 64);
  EXPECT_EQ(a.lle.size(), 12u);
  EXPECT_EQ(a.curve.lambdas.size(), 64u);
  EXPECT_DOUBLE_EQ(a.lambda_max, max_pair_ratio(e, ps));
}
