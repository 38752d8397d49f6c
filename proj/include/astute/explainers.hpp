#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "astute/datasets.hpp"
#include "astute/error.hpp"
#include "astute/linalg.hpp"
#include "astute/nn.hpp"

namespace astute {

enum class ExplainerKind { integrated_gradients, smoothgrad, lime, kernel_shap };

inline std::string_view to_string(ExplainerKind k) {
  switch (k) {
    case ExplainerKind::integrated_gradients: return "ig";
    case ExplainerKind::smoothgrad: return "smoothgrad";
    case ExplainerKind::lime: return "lime";
    case ExplainerKind::kernel_shap: return "shap";
  }
  return "ig";
}

inline ExplainerKind parse_explainer(std::string_view s) {
  if (s == "ig" || s == "integrated_gradients") return ExplainerKind::integrated_gradients;
  if (s == "smoothgrad" || s == "sg") return ExplainerKind::smoothgrad;
  if (s == "lime") return ExplainerKind::lime;
  if (s == "shap" || s == "kernel_shap") return ExplainerKind::kernel_shap;
  throw ArgumentError("unknown explainer '" + std::string(s) + "'");
}

struct Explanation {
  Vector attributions;
  ExplainerKind explainer = ExplainerKind::integrated_gradients;
  std::size_t target_class = 0;
  std::map<std::string, std::string> config_snapshot;
};

/// Sampled neighbourhood S_x shared by SmoothGrad and LIME.
struct NeighborhoodConfig {
  std::size_t num_samples = 50;
  double sd = 0.1;            // Gaussian perturbation scale
  double kernel_sigma = 1.0;  // σ of π(x, a) = exp(-‖x - a‖² / σ²)
  std::uint64_t seed = 0;
};

inline void validate(const NeighborhoodConfig& c) {
  if (c.num_samples < 2) throw ArgumentError("neighborhood: num_samples must be >= 2");
  if (!(c.sd >= 0.0)) throw ArgumentError("neighborhood: sd must be >= 0");
  if (!(c.kernel_sigma > 0.0)) throw ArgumentError("neighborhood: kernel_sigma must be > 0");
}

namespace detail {

inline std::string num(double v) { return fmt17(v); }

inline void check_point(const Mlp& m, std::span<const double> x, std::size_t target) {
  if (x.size() != m.input_dim()) throw DimensionError("explainer: point dim != model input dim");
  if (target >= m.output_dim()) throw DimensionError("explainer: target class out of range");
}

/// Offsets ε_k ~ N(0, sd²I). Drawn from the seed alone, so every explained
/// point gets the same offsets and |S_x| = |S_y|.
inline Matrix gaussian_offsets(std::size_t count, std::size_t dim, double sd, std::uint64_t seed) {
  Matrix e(count, dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& v : e.data()) v = sd * g(rng);
  return e;
}

}  // namespace detail

/// (x - x') ⊙ midpoint-rule average of ∇f along the straight path from the
/// baseline x' to x, with `steps` intervals.
inline Explanation integrated_gradients(const Mlp& m, std::span<const double> x,
                                        std::span<const double> baseline, std::size_t steps,
                                        std::size_t target) {
  detail::check_point(m, x, target);
  if (baseline.size() != x.size()) throw DimensionError("integrated_gradients: baseline dim");
  if (steps < 1) throw ArgumentError("integrated_gradients: steps must be >= 1");
  const std::size_t d = x.size();
  Vector avg(d, 0.0), point(d);
  for (std::size_t s = 0; s < steps; ++s) {
    const double alpha = (static_cast<double>(s) + 0.5) / static_cast<double>(steps);
    for (std::size_t i = 0; i < d; ++i) point[i] = (1.0 - alpha) * baseline[i] + alpha * x[i];
    const auto g = input_gradient(m, point, target);
    for (std::size_t i = 0; i < d; ++i) avg[i] += (g[i] - avg[i]) / static_cast<double>(s + 1);
  }
  Explanation e;
  e.explainer = ExplainerKind::integrated_gradients;
  e.target_class = target;
  e.attributions.resize(d);
  for (std::size_t i = 0; i < d; ++i) e.attributions[i] = (x[i] - baseline[i]) * avg[i];
  e.config_snapshot = {{"steps", std::to_string(steps)}};
  return e;
}

/// Mean input gradient over S_x = {x + ε_k}. sd = 0 returns the plain gradient.
inline Explanation smoothgrad(const Mlp& m, std::span<const double> x, const NeighborhoodConfig& cfg,
                              std::size_t target) {
  detail::check_point(m, x, target);
  validate(cfg);
  Explanation e;
  e.explainer = ExplainerKind::smoothgrad;
  e.target_class = target;
  e.config_snapshot = {{"num_samples", std::to_string(cfg.num_samples)},
                       {"sd", detail::num(cfg.sd)},
                       {"seed", std::to_string(cfg.seed)}};
  if (cfg.sd == 0.0) {
    e.attributions = input_gradient(m, x, target);
    return e;
  }
  const std::size_t d = x.size();
  const auto eps = detail::gaussian_offsets(cfg.num_samples, d, cfg.sd, cfg.seed);
  Vector avg(d, 0.0), point(d);
  for (std::size_t k = 0; k < cfg.num_samples; ++k) {
    for (std::size_t i = 0; i < d; ++i) point[i] = x[i] + eps(k, i);
    const auto g = input_gradient(m, point, target);
    // running mean: exact when every gradient is identical
    for (std::size_t i = 0; i < d; ++i) avg[i] += (g[i] - avg[i]) / static_cast<double>(k + 1);
  }
  e.attributions = std::move(avg);
  return e;
}

/// Gaussian locality kernel π(x, a).
inline double lime_kernel(std::span<const double> x, std::span<const double> a, double sigma) {
  return std::exp(-sq_distance(x, a) / (sigma * sigma));
}

/// Coefficients of the π-weighted least-squares linear fit to the target
/// output over S_x = {x} ∪ {x + ε_k}. The intercept is fitted, unpenalized,
/// and dropped from the attributions.
inline Explanation lime(const Mlp& m, std::span<const double> x, const NeighborhoodConfig& cfg,
                        std::size_t target, double ridge = 0.0) {
  detail::check_point(m, x, target);
  validate(cfg);
  if (ridge < 0.0) throw ArgumentError("lime: ridge must be >= 0");
  if (cfg.sd == 0.0) throw SingularityError("lime: degenerate neighbourhood (sd = 0, all samples equal x)");

  const std::size_t d = x.size();
  const std::size_t rows = cfg.num_samples + 1;
  const auto eps = detail::gaussian_offsets(cfg.num_samples, d, cfg.sd, cfg.seed);
  // Columns are the offsets a - x scaled by 1/sd (conditioning), then the intercept.
  const double scale = 1.0 / cfg.sd;
  Matrix design(rows, d + 1);
  Vector y(rows), w(rows);
  Vector point(x.begin(), x.end());
  for (std::size_t k = 0; k < rows; ++k) {
    if (k > 0)
      for (std::size_t i = 0; i < d; ++i) point[i] = x[i] + eps(k - 1, i);
    for (std::size_t i = 0; i < d; ++i) design(k, i) = (point[i] - x[i]) * scale;
    design(k, d) = 1.0;
    y[k] = forward(m, point)[target];
    w[k] = lime_kernel(x, point, cfg.kernel_sigma);
  }
  const std::size_t intercept[] = {d};
  const auto beta = weighted_least_squares(design, y, w, ridge * scale * scale, intercept);

  Explanation e;
  e.explainer = ExplainerKind::lime;
  e.target_class = target;
  e.attributions.resize(d);
  for (std::size_t i = 0; i < d; ++i) e.attributions[i] = beta[i] * scale;
  e.config_snapshot = {{"num_samples", std::to_string(cfg.num_samples)},
                       {"sd", detail::num(cfg.sd)},
                       {"kernel_sigma", detail::num(cfg.kernel_sigma)},
                       {"ridge", detail::num(ridge)},
                       {"seed", std::to_string(cfg.seed)}};
  return e;
}

namespace detail {

inline double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace detail

/// Background summary used by KernelSHAP: absent features take these values.
inline Vector feature_means(const Matrix& x) {
  if (x.rows() == 0) throw ArgumentError("kernel_shap: background is empty");
  Vector mu(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) mu[j] += x(i, j);
  for (auto& v : mu) v /= static_cast<double>(x.rows());
  return mu;
}

/// KernelSHAP with mean imputation. Coalitions are enumerated exhaustively
/// when 2^d - 2 ≤ num_coalitions, otherwise sampled in complementary pairs
/// with sizes drawn from the Shapley kernel. Efficiency
/// Σφ = f(x) - f(background mean) is imposed by eliminating the last feature.
inline Explanation kernel_shap(const Mlp& m, std::span<const double> x, std::span<const double> background_mean,
                               std::size_t num_coalitions, std::uint64_t seed, std::size_t target) {
  detail::check_point(m, x, target);
  const std::size_t d = x.size();
  if (background_mean.size() != d) throw DimensionError("kernel_shap: background dim");
  if (num_coalitions < d + 2) throw ArgumentError("kernel_shap: num_coalitions must be >= d + 2");

  const double full = forward(m, x)[target];
  const double base = forward(m, background_mean)[target];
  const double delta = full - base;

  Explanation e;
  e.explainer = ExplainerKind::kernel_shap;
  e.target_class = target;
  e.config_snapshot = {{"num_coalitions", std::to_string(num_coalitions)}, {"seed", std::to_string(seed)}};
  if (d == 1) {
    e.attributions = {delta};
    return e;
  }

  std::vector<std::vector<char>> masks;
  std::vector<double> weights;
  const bool exhaustive = d < 62 && (std::uint64_t{1} << d) - 2 <= num_coalitions;
  if (exhaustive) {
    for (std::uint64_t bits = 1; bits + 1 < (std::uint64_t{1} << d); ++bits) {
      std::vector<char> z(d);
      std::size_t s = 0;
      for (std::size_t i = 0; i < d; ++i) s += (z[i] = (bits >> i) & 1u);
      masks.push_back(std::move(z));
      weights.push_back(static_cast<double>(d - 1) /
                        (detail::binomial(d, s) * static_cast<double>(s) * static_cast<double>(d - s)));
    }
  } else {
    std::vector<double> size_w(d - 1);
    for (std::size_t s = 1; s < d; ++s)
      size_w[s - 1] = static_cast<double>(d - 1) / (static_cast<double>(s) * static_cast<double>(d - s));
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> pick_size(size_w.begin(), size_w.end());
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    while (masks.size() < num_coalitions) {
      const std::size_t s = pick_size(rng) + 1;
      std::shuffle(idx.begin(), idx.end(), rng);
      std::vector<char> z(d, 0);
      for (std::size_t i = 0; i < s; ++i) z[idx[i]] = 1;
      std::vector<char> comp(d);
      for (std::size_t i = 0; i < d; ++i) comp[i] = static_cast<char>(1 - z[i]);
      masks.push_back(std::move(z));
      masks.push_back(std::move(comp));
      weights.push_back(1.0);
      weights.push_back(1.0);
    }
  }

  // v(z) - base - z_last·Δ = Σ_{i<last} (z_i - z_last) φ_i
  const std::size_t rows = masks.size();
  Matrix design(rows, d - 1);
  Vector y(rows);
  Vector point(d);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& z = masks[r];
    for (std::size_t i = 0; i < d; ++i) point[i] = z[i] ? x[i] : background_mean[i];
    const double zl = z[d - 1];
    y[r] = forward(m, point)[target] - base - zl * delta;
    for (std::size_t i = 0; i + 1 < d; ++i) design(r, i) = static_cast<double>(z[i]) - zl;
  }
  const auto phi = weighted_least_squares(design, y, weights, exhaustive ? 0.0 : 1e-12);
  e.attributions.assign(phi.begin(), phi.end());
  e.attributions.push_back(delta - std::accumulate(phi.begin(), phi.end(), 0.0));
  return e;
}

inline Explanation kernel_shap(const Mlp& m, std::span<const double> x, const Dataset& background,
                               std::size_t num_coalitions, std::uint64_t seed, std::size_t target) {
  if (background.size() == 0) throw ArgumentError("kernel_shap: background is empty");
  return kernel_shap(m, x, feature_means(background.X), num_coalitions, seed, target);
}

// Batch explanation -----------------------------------------------------------

/// Every knob of the four explainers, with defaults. Zero / empty values
/// mean "derive from the data" (see `resolve`).
struct ExplainerSettings {
  std::size_t ig_steps = 64;
  Vector ig_baseline;  // empty => zero vector
  NeighborhoodConfig smoothgrad{50, 0.0, 1.0, 0};
  NeighborhoodConfig lime{0, 0.0, 0.0, 0};  // num_samples 0 => max(200, 2d + 100)
  double lime_ridge = 0.0;
  std::size_t shap_coalitions = 0;  // 0 => 2d + 512, at least 2^d - 2 for small d
  std::uint64_t shap_seed = 0;
};

/// Fills data-dependent defaults: SmoothGrad sd = 0.1 × mean feature range,
/// LIME σ = median pairwise distance, LIME sd = σ/√d (samples land about σ
/// from x whatever the dimension).
inline ExplainerSettings resolve(ExplainerSettings s, const Dataset& data) {
  if (s.ig_baseline.empty()) s.ig_baseline.assign(data.dim(), 0.0);
  if (s.smoothgrad.sd == 0.0) {
    double range = 0.0;
    for (std::size_t j = 0; j < data.dim(); ++j) {
      double lo = data.X(0, j), hi = lo;
      for (std::size_t i = 1; i < data.size(); ++i) {
        lo = std::min(lo, data.X(i, j));
        hi = std::max(hi, data.X(i, j));
      }
      range += hi - lo;
    }
    s.smoothgrad.sd = 0.1 * range / static_cast<double>(data.dim());
  }
  if (s.lime.kernel_sigma == 0.0) s.lime.kernel_sigma = median_pairwise_distance(data);
  if (s.lime.sd == 0.0) s.lime.sd = s.lime.kernel_sigma / std::sqrt(static_cast<double>(data.dim()));
  if (s.lime.num_samples == 0) s.lime.num_samples = std::max<std::size_t>(200, 2 * data.dim() + 100);
  if (s.shap_coalitions == 0) {
    const std::size_t d = data.dim();
    s.shap_coalitions = 2 * d + 512;
    if (d < 20) s.shap_coalitions = std::max<std::size_t>(s.shap_coalitions, (std::size_t{1} << d) - 2);
  }
  return s;
}

/// Attributions for every row of `points` (one row per point), explaining
/// the model's predicted class (or output 0 for single-output regressors).
struct ExplanationTable {
  ExplainerKind explainer = ExplainerKind::integrated_gradients;
  std::vector<std::size_t> targets;
  Matrix attributions;
};

inline ExplanationTable explain_all(ExplainerKind kind, const Mlp& m, const Matrix& points,
                                    const ExplainerSettings& s, const Matrix& background) {
  ExplanationTable t;
  t.explainer = kind;
  t.attributions = Matrix(points.rows(), points.cols());
  std::optional<Vector> bg_mean;
  if (kind == ExplainerKind::kernel_shap) bg_mean = feature_means(background);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto x = points.row(i);
    const std::size_t target = predict(m, x);
    Explanation e;
    switch (kind) {
      case ExplainerKind::integrated_gradients:
        e = integrated_gradients(m, x, s.ig_baseline, s.ig_steps, target);
        break;
      case ExplainerKind::smoothgrad: e = smoothgrad(m, x, s.smoothgrad, target); break;
      case ExplainerKind::lime: e = lime(m, x, s.lime, target, s.lime_ridge); break;
      case ExplainerKind::kernel_shap:
        e = kernel_shap(m, x, *bg_mean, s.shap_coalitions, s.shap_seed, target);
        break;
    }
    t.targets.push_back(target);
    std::copy(e.attributions.begin(), e.attributions.end(), t.attributions.row(i).begin());
  }
  return t;
}

/// `point_index,target_class,feature_0..feature_{d-1}` with 17 significant digits.
inline std::string explanations_csv(const ExplanationTable& t) {
  std::string out = "point_index,target_class";
  for (std::size_t j = 0; j < t.attributions.cols(); ++j) out += ",feature_" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < t.attributions.rows(); ++i) {
    out += std::to_string(i) + ',' + std::to_string(t.targets[i]);
    for (double v : t.attributions.row(i)) out += ',' + detail::fmt17(v);
    out += '\n';
  }
  return out;
}

}  // namespace astute
