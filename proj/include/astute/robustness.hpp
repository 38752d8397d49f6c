#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "astute/datasets.hpp"
#include "astute/error.hpp"
#include "astute/explainers.hpp"
#include "astute/linalg.hpp"
#include "astute/nn.hpp"

namespace astute {

/// ‖v(i) − v(j)‖ / ‖x_i − x_j‖ for every pair, where `values` holds one row
/// per point and the pair distances come from the PairSet.
inline std::vector<double> pair_ratios(const Matrix& values, const PairSet& pairs) {
  if (pairs.empty()) throw EmptyPairsError();
  std::vector<double> out(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs.pairs[k];
    if (i >= values.rows() || j >= values.rows()) throw DimensionError("pair index out of range");
    out[k] = distance(values.row(i), values.row(j)) / pairs.distances[k];
  }
  return out;
}

struct ProbLipEstimate {
  double L = 0.0;
  double r = 0.0;
  double alpha = 0.0;  // 1 − satisfied/eligible
  std::size_t num_pairs = 0;
};

/// Def. of probabilistic Lipschitzness estimated over every eligible pair.
inline ProbLipEstimate empirical_prob_lipschitz(const Matrix& outputs, const PairSet& pairs, double L) {
  if (L < 0.0) throw ArgumentError("empirical_prob_lipschitz: L must be >= 0");
  const auto ratios = pair_ratios(outputs, pairs);
  const auto ok = std::count_if(ratios.begin(), ratios.end(), [L](double q) { return q <= L; });
  ProbLipEstimate est;
  est.L = L;
  est.r = pairs.radius;
  est.num_pairs = ratios.size();
  est.alpha = 1.0 - static_cast<double>(ok) / static_cast<double>(ratios.size());
  return est;
}

/// Fraction of ratios ≤ λ.
inline double astuteness_from_ratios(const std::vector<double>& ratios, double lambda) {
  if (ratios.empty()) throw EmptyPairsError();
  if (lambda < 0.0) throw ArgumentError("astuteness: lambda must be >= 0");
  const auto ok = std::count_if(ratios.begin(), ratios.end(), [lambda](double q) { return q <= lambda; });
  return static_cast<double>(ok) / static_cast<double>(ratios.size());
}

/// A_{r,λ}(ψ): fraction of eligible pairs with ‖ψ(x) − ψ(y)‖ ≤ λ‖x − y‖.
inline double explainer_astuteness(const Matrix& explanations, const PairSet& pairs, double lambda) {
  return astuteness_from_ratios(pair_ratios(explanations, pairs), lambda);
}

/// Astuteness sampled on a uniform λ grid over [0, λ_max], λ_max the largest
/// pair ratio. A constant explainer gives the degenerate curve {(0, 1)}.
struct AstutenessCurve {
  std::vector<double> lambdas;
  std::vector<double> probs;
  double lambda_max = 0.0;
  bool degenerate = false;
};

inline AstutenessCurve astuteness_curve_from_ratios(std::vector<double> ratios, std::size_t grid_size = 256) {
  if (ratios.empty()) throw EmptyPairsError();
  if (grid_size < 2) throw ArgumentError("astuteness_curve: grid_size must be >= 2");
  std::sort(ratios.begin(), ratios.end());
  AstutenessCurve c;
  c.lambda_max = ratios.back();
  if (c.lambda_max == 0.0) {
    c.degenerate = true;
    c.lambdas = {0.0};
    c.probs = {1.0};
    return c;
  }
  const double n = static_cast<double>(ratios.size());
  c.lambdas.resize(grid_size);
  c.probs.resize(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) {
    const double lam = k + 1 == grid_size
                           ? c.lambda_max
                           : c.lambda_max * static_cast<double>(k) / static_cast<double>(grid_size - 1);
    c.lambdas[k] = lam;
    const auto ok = std::upper_bound(ratios.begin(), ratios.end(), lam) - ratios.begin();
    c.probs[k] = static_cast<double>(ok) / n;
  }
  return c;
}

inline AstutenessCurve astuteness_curve(const Matrix& explanations, const PairSet& pairs,
                                        std::size_t grid_size = 256) {
  return astuteness_curve_from_ratios(pair_ratios(explanations, pairs), grid_size);
}

/// Trapezoidal area under the curve after rescaling λ by 1/λ_max. The
/// degenerate (constant explainer) curve scores 1.
inline double normalised_astuteness_auc(const AstutenessCurve& c) {
  if (c.degenerate) return 1.0;
  if (c.lambdas.size() != c.probs.size() || c.lambdas.size() < 2 || !(c.lambda_max > 0.0))
    throw ArgumentError("normalised_astuteness_auc: malformed curve");
  double area = 0.0;
  for (std::size_t k = 1; k < c.lambdas.size(); ++k) {
    const double dt = (c.lambdas[k] - c.lambdas[k - 1]) / c.lambda_max;
    area += 0.5 * dt * (c.probs[k] + c.probs[k - 1]);
  }
  return std::clamp(area, 0.0, 1.0);
}

/// Neighbour lists (within the PairSet radius) for `n` points.
inline std::vector<std::vector<std::size_t>> neighbor_lists(const PairSet& pairs, std::size_t n) {
  std::vector<std::vector<std::size_t>> nb(n);
  for (const auto& [i, j] : pairs.pairs) {
    nb[i].push_back(j);
    nb[j].push_back(i);
  }
  return nb;
}

namespace detail {
template <class Reduce>
std::optional<double> neighborhood_ratio(const Matrix& explanations, const Matrix& points, std::size_t i,
                                         std::span<const std::size_t> neighbors, Reduce reduce) {
  if (neighbors.empty()) return std::nullopt;
  std::vector<double> q;
  q.reserve(neighbors.size());
  for (std::size_t j : neighbors) {
    const double dx = distance(points.row(i), points.row(j));
    if (dx == 0.0) continue;
    q.push_back(distance(explanations.row(i), explanations.row(j)) / dx);
  }
  if (q.empty()) return std::nullopt;
  return reduce(q);
}
}  // namespace detail

/// Local Lipschitz estimate: max ratio over the ε-neighbourhood of point i.
/// Empty neighbourhoods yield no value.
inline std::optional<double> local_lipschitz_estimate(const Matrix& explanations, const Matrix& points,
                                                      std::size_t i, std::span<const std::size_t> neighbors) {
  return detail::neighborhood_ratio(explanations, points, i, neighbors,
                                    [](const std::vector<double>& q) { return *std::max_element(q.begin(), q.end()); });
}

/// Average sensitivity: mean ratio over the ε-neighbourhood of point i.
inline std::optional<double> average_sensitivity(const Matrix& explanations, const Matrix& points,
                                                 std::size_t i, std::span<const std::size_t> neighbors) {
  return detail::neighborhood_ratio(explanations, points, i, neighbors, [](const std::vector<double>& q) {
    return std::accumulate(q.begin(), q.end(), 0.0) / static_cast<double>(q.size());
  });
}

// Theoretical astuteness parameters ------------------------------------------

/// Integrated gradients: λ = 3 L √n · sup_d / inf_d.
inline double theoretical_lambda_ig(double L, std::size_t n, double sup_d, double inf_d) {
  if (!(inf_d > 0.0)) throw ArgumentError("theoretical_lambda_ig: inf_d must be > 0");
  return 3.0 * L * std::sqrt(static_cast<double>(n)) * (sup_d / inf_d);
}

/// LIME: λ = L + C / inf_d with C = 2√(2|D| + L²r²).
inline double theoretical_lambda_lime(double L, std::size_t dataset_size, double r, double inf_d) {
  if (!(inf_d > 0.0)) throw ArgumentError("theoretical_lambda_lime: inf_d must be > 0");
  const double c = 2.0 * std::sqrt(2.0 * static_cast<double>(dataset_size) + L * L * r * r);
  return L + c / inf_d;
}

/// SmoothGrad: λ = 2L / inf_d.
inline double theoretical_lambda_sg(double L, double inf_d) {
  if (!(inf_d > 0.0)) throw ArgumentError("theoretical_lambda_sg: inf_d must be > 0");
  return 2.0 * L / inf_d;
}

struct TheoremCheck {
  double L = 0.0;
  double alpha = 0.0;
  double lambda = 0.0;
  double astuteness = 0.0;
  double required = 0.0;  // 1 − α
  double margin = 0.0;    // astuteness − required
  bool pass = false;
};

struct TheoremVerification {
  ExplainerKind explainer = ExplainerKind::integrated_gradients;
  double r = 0.0;
  double sup_d = 0.0;  // over eligible pairs
  double inf_d = 0.0;
  std::size_t num_pairs = 0;
  std::vector<TheoremCheck> checks;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const TheoremCheck& c) { return c.pass; });
  }
};

/// For each L: α from the model outputs, λ from the theorem for `kind`, and
/// the check A_{r,λ}(ψ) ≥ 1 − α on the given explanations.
inline TheoremVerification verify_theorem(ExplainerKind kind, const Matrix& points, const Matrix& model_outputs,
                                          const Matrix& explanations, double r, const std::vector<double>& L_grid,
                                          std::size_t dataset_size) {
  if (kind == ExplainerKind::kernel_shap) throw ArgumentError("verify_theorem: no theorem for KernelSHAP");
  const auto pairs = eligible_pairs(points, r);
  if (pairs.empty()) throw EmptyPairsError();
  TheoremVerification v;
  v.explainer = kind;
  v.r = r;
  v.num_pairs = pairs.size();
  v.sup_d = *std::max_element(pairs.distances.begin(), pairs.distances.end());
  v.inf_d = *std::min_element(pairs.distances.begin(), pairs.distances.end());
  const auto expl_ratios = pair_ratios(explanations, pairs);
  for (double L : L_grid) {
    TheoremCheck c;
    c.L = L;
    c.alpha = empirical_prob_lipschitz(model_outputs, pairs, L).alpha;
    switch (kind) {
      case ExplainerKind::integrated_gradients:
        c.lambda = theoretical_lambda_ig(L, points.cols(), v.sup_d, v.inf_d);
        break;
      case ExplainerKind::lime: c.lambda = theoretical_lambda_lime(L, dataset_size, r, v.inf_d); break;
      case ExplainerKind::smoothgrad: c.lambda = theoretical_lambda_sg(L, v.inf_d); break;
      case ExplainerKind::kernel_shap: break;
    }
    c.astuteness = astuteness_from_ratios(expl_ratios, c.lambda);
    c.required = 1.0 - c.alpha;
    c.margin = c.astuteness - c.required;
    c.pass = c.astuteness >= c.required;
    v.checks.push_back(c);
  }
  return v;
}

/// Largest ratio ‖f(x) − f(y)‖/‖x − y‖ over the pairs (0 if none).
inline double max_pair_ratio(const Matrix& values, const PairSet& pairs) {
  if (pairs.empty()) return 0.0;
  const auto q = pair_ratios(values, pairs);
  return *std::max_element(q.begin(), q.end());
}

// Aggregated report -------------------------------------------------------------

struct ExplainerRobustness {
  ExplainerKind explainer = ExplainerKind::integrated_gradients;
  double auc = 0.0;
  double lambda_max = 0.0;
  AstutenessCurve curve;
  std::vector<std::optional<double>> lle;
  std::vector<std::optional<double>> as;
};

struct RobustnessReport {
  std::string dataset;
  std::string model;
  std::uint64_t seed = 0;
  double r = 0.0;
  double epsilon = 0.0;
  std::size_t num_pairs = 0;
  std::vector<ExplainerRobustness> explainers;
  std::optional<ExplainerRobustness> classifier;  // ψ := f (output probabilities)
};

/// Curve, AUC, LLE and AS for one table of per-point values (explanations
/// or model outputs) over radius r and neighbourhood ε.
inline ExplainerRobustness assess(const Matrix& values, const Matrix& points, const PairSet& pairs,
                                  const PairSet& eps_pairs, std::size_t grid_size) {
  ExplainerRobustness out;
  out.curve = astuteness_curve(values, pairs, grid_size);
  out.auc = normalised_astuteness_auc(out.curve);
  out.lambda_max = out.curve.lambda_max;
  const auto nb = neighbor_lists(eps_pairs, points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    out.lle.push_back(local_lipschitz_estimate(values, points, i, nb[i]));
    out.as.push_back(average_sensitivity(values, points, i, nb[i]));
  }
  return out;
}

}  // namespace astute
