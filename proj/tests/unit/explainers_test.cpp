#include <gtest/gtest.h>

#include <random>

#include "astute/datasets.hpp"
#include "astute/explainers.hpp"
#include "oracles.hpp"

using namespace astute;

namespace {

Mlp linear(const Vector& w, double c = 0.0) {
  Mlp m;
  m.layers.push_back({Matrix(1, w.size(), w), Vector{c}});
  m.output = OutputMode::identity_regressor;
  return m;
}

Mlp trained_xor(ActivationKind kind) {
  const auto ds = gen_xor(200, 0.0, 17);
  TrainConfig cfg;
  cfg.epochs = 100;
  cfg.seed = 3;
  const auto act = kind == ActivationKind::relu ? Activation::relu() : Activation::tanh();
  return train(make_mlp({2, 16, 2}, act, OutputMode::softmax_classifier, 4), ds, cfg).model;
}

NeighborhoodConfig hood(std::size_t n, double sd, double sigma, std::uint64_t seed) { return {n, sd, sigma, seed}; }

}  // namespace

TEST(IntegratedGradients, LinearModelIsExact) {
  const auto m = linear({2, -1});
  const auto e = integrated_gradients(m, Vector{1, 1}, Vector{0, 0}, 1, 0);
  EXPECT_NEAR(e.attributions[0], 2.0, 1e-12);
  EXPECT_NEAR(e.attributions[1], -1.0, 1e-12);
}

TEST(IntegratedGradients, BaselineEqualsInputGivesZero) {
  const auto m = trained_xor(ActivationKind::tanh);
  const Vector x{0.3, -0.4};
  for (double v : integrated_gradients(m, x, x, 32, 1).attributions) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(integrated_gradients(m, x, Vector{0}, 8, 0), DimensionError);
  EXPECT_THROW(integrated_gradients(m, x, x, 0, 0), ArgumentError);
}

TEST(IntegratedGradients, CompletenessOnTrainedNets) {
  for (auto kind : {ActivationKind::relu, ActivationKind::tanh}) {
    const auto m = trained_xor(kind);
    const auto pts = gen_xor(20, 0.0, 99);
    const Vector base{0, 0};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto x = pts.point(i);
      const auto c = predict(m, x);
      const auto a = integrated_gradients(m, x, base, 1000, c).attributions;
      EXPECT_NEAR(a[0] + a[1], forward(m, x)[c] - forward(m, base)[c], 1e-3);
    }
  }
}

double ig_step_gap(const Mlp& m, std::size_t steps) {
  const auto pts = gen_xor(20, 0.0, 99);
  double gap = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto x = pts.point(i);
    const auto c = predict(m, x);
    const auto a = integrated_gradients(m, x, Vector{0, 0}, steps, c).attributions;
    const auto b = integrated_gradients(m, x, Vector{0, 0}, 2 * steps, c).attributions;
    gap = std::max({gap, std::abs(a[0] - b[0]), std::abs(a[1] - b[1])});
  }
  return gap;
}

TEST(IntegratedGradients, ConvergesOnSmoothNets) {
  EXPECT_LT(ig_step_gap(trained_xor(ActivationKind::tanh), 1000), 1e-4);
}

// ReLU kinks: midpoint rule drops to first order, 1000 vs 2000 gap ~6e-4.
TEST(IntegratedGradients, ConvergesAtFirstOrderOnReluNets) {
  const auto m = trained_xor(ActivationKind::relu);
  const double g1 = ig_step_gap(m, 1000), g2 = ig_step_gap(m, 2000);
  EXPECT_LT(g2, 0.75 * g1);
  EXPECT_LT(g1, 2e-3);
}

TEST(SmoothGrad, ZeroNoiseIsPlainGradient) {
  const auto m = trained_xor(ActivationKind::tanh);
  const Vector x{0.2, 0.7};
  EXPECT_EQ(smoothgrad(m, x, hood(50, 0.0, 1.0, 3), 0).attributions, input_gradient(m, x, 0));
}

TEST(SmoothGrad, LinearModelGivesWeightsForAnySeed) {
  const auto m = linear({0.5, -3, 2});
  for (std::uint64_t seed : {1u, 2u, 3u})
    EXPECT_EQ(smoothgrad(m, Vector{1, 2, 3}, hood(25, 0.7, 1.0, seed), 0).attributions, (Vector{0.5, -3, 2}));
}

TEST(SmoothGrad, DeterministicUnderSeed) {
  const auto m = trained_xor(ActivationKind::relu);
  const Vector x{0.2, -0.7};
  EXPECT_EQ(smoothgrad(m, x, hood(30, 0.1, 1, 8), 1).attributions,
            smoothgrad(m, x, hood(30, 0.1, 1, 8), 1).attributions);
  EXPECT_THROW(smoothgrad(m, x, hood(1, 0.1, 1, 8), 1), ArgumentError);
}

TEST(Lime, RecoversLinearModel) {
  const auto m = linear({1.5, -2, 0.25}, 4.0);
  const auto e = lime(m, Vector{0.3, 0.1, -1}, hood(100, 0.5, 1.0, 2), 0);
  EXPECT_NEAR(e.attributions[0], 1.5, 1e-6);
  EXPECT_NEAR(e.attributions[1], -2.0, 1e-6);
  EXPECT_NEAR(e.attributions[2], 0.25, 1e-6);
}

TEST(Lime, ConstantModelGivesZeroCoefficients) {
  const auto m = linear({0, 0}, 3.0);
  for (double v : lime(m, Vector{1, 1}, hood(30, 0.5, 1.0, 2), 0).attributions) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(Lime, KernelAndDegenerateNeighbourhood) {
  const Vector x{1, 2};
  EXPECT_EQ(lime_kernel(x, x, 0.3), 1.0);
  EXPECT_NEAR(lime_kernel(x, Vector{1, 3}, 2.0), std::exp(-0.25), 1e-15);
  EXPECT_THROW(lime(linear({1, 1}), x, hood(10, 0.0, 1.0, 1), 0), SingularityError);
  EXPECT_THROW(lime(linear({1, 1}), x, hood(10, 0.1, 1.0, 1), 0, -1.0), ArgumentError);
}

TEST(Lime, SmallNeighbourhoodMatchesGradientOnTanhNets) {
  const auto m = trained_xor(ActivationKind::tanh);
  const auto pts = gen_xor(10, 0.0, 5);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto x = pts.point(i);
    const auto c = predict(m, x);
    const auto a = lime(m, x, hood(200, 1e-3, 1.0, 6), c).attributions;
    const auto g = input_gradient(m, x, c);
    EXPECT_LT(std::max(std::abs(a[0] - g[0]), std::abs(a[1] - g[1])), 5e-2);
  }
}

TEST(KernelShap, LinearModelMatchesAnalyticValues) {
  const Vector w{1, -2, 0.5, 3}, x{0.2, 0.4, -1, 2}, mu{-0.1, 0.3, 0.5, 1};
  const auto e = kernel_shap(linear(w, 1.0), x, mu, 64, 0, 0);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(e.attributions[i], w[i] * (x[i] - mu[i]), 1e-4);
}

TEST(KernelShap, SampledLinearModelMatchesAnalyticValues) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1);
  Vector w(30), x(30), mu(30);
  for (std::size_t i = 0; i < 30; ++i) {
    w[i] = n(rng);
    x[i] = n(rng);
    mu[i] = n(rng);
  }
  const auto e = kernel_shap(linear(w), x, mu, 300, 4, 0);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_NEAR(e.attributions[i], w[i] * (x[i] - mu[i]), 1e-4);
}

TEST(KernelShap, ExhaustiveMatchesBruteForceShapley) {
  const auto m = make_mlp({4, 6, 3}, Activation::tanh(), OutputMode::softmax_classifier, 21);
  const Vector x{0.5, -1, 0.3, 2}, mu{0, 0.2, -0.4, 0.1};
  const std::size_t c = 2;
  const auto e = kernel_shap(m, x, mu, 14, 0, c);
  const auto ref = oracle::shapley(4, [&](const std::vector<char>& z) {
    Vector p(4);
    for (std::size_t i = 0; i < 4; ++i) p[i] = z[i] ? x[i] : mu[i];
    return forward(m, p)[c];
  });
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(e.attributions[i], ref[i], 1e-9);
}

TEST(KernelShap, EfficiencyNullAndSymmetry) {
  const auto m = make_mlp({3, 5, 2}, Activation::relu(), OutputMode::softmax_classifier, 8);
  const Vector x{1, 2, 3}, mu{0.5, 0.5, 0.5};
  const auto e = kernel_shap(m, x, mu, 6, 0, 1);
  EXPECT_NEAR(e.attributions[0] + e.attributions[1] + e.attributions[2], forward(m, x)[1] - forward(m, mu)[1],
              1e-12);
  for (double v : kernel_shap(m, mu, mu, 6, 0, 1).attributions) EXPECT_NEAR(v, 0.0, 1e-12);

  // Duplicated features with tied weights.
  auto sym = make_mlp({3, 4, 2}, Activation::tanh(), OutputMode::softmax_classifier, 9);
  for (std::size_t r = 0; r < 4; ++r) sym.layers[0].W(r, 1) = sym.layers[0].W(r, 0);
  const auto s = kernel_shap(sym, Vector{0.7, 0.7, -1}, Vector{0, 0, 0}, 6, 0, 0);
  EXPECT_NEAR(s.attributions[0], s.attributions[1], 1e-6);
  EXPECT_THROW(kernel_shap(m, x, mu, 4, 0, 1), ArgumentError);
}

TEST(KernelShap, EmptyBackgroundIsAnError) {
  Dataset empty;
  empty.X = Matrix(0, 2);
  EXPECT_THROW(kernel_shap(linear({1, 1}), Vector{1, 1}, empty, 10, 0, 0), ArgumentError);
}

TEST(Settings, ResolveDataDependentDefaults) {
  const auto ds = gen_xor(50, 0.0, 2);
  const auto s = resolve({}, ds);
  EXPECT_EQ(s.ig_baseline, (Vector{0, 0}));
  EXPECT_NEAR(s.lime.kernel_sigma, median_pairwise_distance(ds), 1e-15);
  EXPECT_NEAR(s.lime.sd, s.lime.kernel_sigma / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(s.lime.num_samples, 200u);
  EXPECT_EQ(s.shap_coalitions, 516u);
  EXPECT_GT(s.smoothgrad.sd, 0.0);
}

TEST(ExplainAll, OneRowPerPointAndCsvShape) {
  const auto m = trained_xor(ActivationKind::relu);
  const auto ds = gen_xor(12, 0.0, 2);
  const auto s = resolve({}, ds);
  for (auto kind : {ExplainerKind::integrated_gradients, ExplainerKind::smoothgrad, ExplainerKind::lime,
                    ExplainerKind::kernel_shap}) {
    const auto t = explain_all(kind, m, ds.X, s, ds.X);
    EXPECT_EQ(t.attributions.rows(), 12u);
    const auto csv = explanations_csv(t);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "point_index,target_class,feature_0,feature_1");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
    EXPECT_EQ(csv, explanations_csv(explain_all(kind, m, ds.X, s, ds.X)));
  }
  EXPECT_EQ(parse_explainer("shap"), ExplainerKind::kernel_shap);
  EXPECT_THROW(parse_explainer("gradcam"), ArgumentError);
}
