#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "astute/datasets.hpp"
#include "astute/explainers.hpp"
#include "astute/harness/config.hpp"
#include "astute/harness/io.hpp"
#include "astute/nn.hpp"
#include "astute/robustness.hpp"
#include "astute/stablerank.hpp"

namespace astute::harness {

/// Independent streams derived from one run seed (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

enum Stream : std::uint64_t { kInit = 1, kShuffle, kXorTrain, kXorEval, kSplit, kSmoothGrad, kLime, kShap };

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// q-quantile by linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct SeedData {
  Dataset train;
  Dataset eval;
};

inline SeedData load_data(const DatasetSpec& d, std::uint64_t seed) {
  if (d.name == "xor")
    return {gen_xor(d.train_size, d.noise_sd, derive_seed(seed, kXorTrain)),
            gen_xor(d.eval_size, d.noise_sd, derive_seed(seed, kXorEval))};
  if (d.name == "iris") {
    auto ds = load_iris(d.iris_path, d.features);
    if (d.standardize) ds = standardize(ds);
    auto sp = shuffle_split(ds, d.train_size, d.eval_size, derive_seed(seed, kSplit));
    return {std::move(sp.train), std::move(sp.eval)};
  }
  const std::filesystem::path dir(d.mnist_dir);
  return {load_mnist((dir / "train-images-idx3-ubyte").string(), (dir / "train-labels-idx1-ubyte").string(),
                     d.train_size, d.downsample),
          load_mnist((dir / "eval-images-idx3-ubyte").string(), (dir / "eval-labels-idx1-ubyte").string(),
                     d.eval_size, d.downsample)};
}

inline Activation make_activation(const std::string& kind, double a) {
  switch (parse_activation_kind(kind)) {
    case ActivationKind::relu: return Activation::relu();
    case ActivationKind::tanh: return Activation::tanh();
    case ActivationKind::gaussian: return Activation::gaussian(a);
  }
  return Activation::relu();
}

inline Optimizer parse_optimizer(const std::string& s) { return s == "adam" ? Optimizer::adam : Optimizer::sgd; }

struct SeedRun {
  std::uint64_t seed = 0;
  SeedData data;
  Mlp model;
  std::vector<double> epoch_loss;  // empty when the model was loaded

  const Matrix& points(const ExperimentConfig& c) const {
    return c.dataset.explain_on == "train" ? data.train.X : data.eval.X;
  }
};

/// Data for `seed` plus a classifier: loaded from `model.file` or trained.
inline SeedRun prepare(const ExperimentConfig& c, std::uint64_t seed) {
  SeedRun run;
  run.seed = seed;
  run.data = load_data(c.dataset, seed);
  if (!c.model.file.empty()) {
    run.model = load_mlp(c.model.file);
    if (run.model.input_dim() != run.data.train.dim())
      throw DimensionError("model input dimension " + std::to_string(run.model.input_dim()) +
                           " does not match dataset dimension " + std::to_string(run.data.train.dim()));
    return run;
  }
  std::vector<std::size_t> dims{run.data.train.dim()};
  for (std::size_t k = 1; k < c.model.depth; ++k) dims.push_back(c.model.width);
  dims.push_back(run.data.train.num_classes);
  auto m = make_mlp(dims, make_activation(c.model.activation, c.model.gaussian_a), OutputMode::softmax_classifier,
                    derive_seed(seed, kInit));
  TrainConfig tc;
  tc.epochs = c.training.epochs;
  tc.batch_size = c.training.batch_size;
  tc.learning_rate = c.training.learning_rate;
  tc.optimizer = parse_optimizer(c.training.optimizer);
  tc.momentum = c.training.momentum;
  tc.seed = derive_seed(seed, kShuffle);
  auto res = train(std::move(m), run.data.train, tc);
  run.model = std::move(res.model);
  run.epoch_loss = std::move(res.epoch_loss);
  return run;
}

inline double resolve_radius(const RadiusPolicy& p, const Matrix& points) {
  return p.fixed ? *p.fixed : median_pairwise_distance(points);
}

inline ExplainerSettings seeded_settings(const ExperimentConfig& c, const SeedRun& run) {
  auto s = resolve(c.explainers.settings, run.data.train);
  s.smoothgrad.seed = derive_seed(run.seed, kSmoothGrad);
  s.lime.seed = derive_seed(run.seed, kLime);
  s.shap_seed = derive_seed(run.seed, kShap);
  return s;
}

inline std::vector<ExplainerKind> explainer_kinds(const ExperimentConfig& c) {
  std::vector<ExplainerKind> out;
  for (const auto& e : c.explainers.list) out.push_back(parse_explainer(e));
  return out;
}

inline std::string seed_dir(std::uint64_t seed) { return "seed_" + std::to_string(seed) + "/"; }

// train ------------------------------------------------------------------------

struct TrainSeedResult {
  std::uint64_t seed = 0;
  double train_accuracy = 0.0;
  double eval_accuracy = 0.0;
  double final_loss = 0.0;
  Mlp model;
};

inline std::vector<TrainSeedResult> cmd_train(const ExperimentConfig& c, ArtifactWriter& w) {
  std::vector<TrainSeedResult> out;
  std::string table = "seed,train_accuracy,eval_accuracy,final_loss\n";
  for (auto seed : c.seeds) {
    StageTimer t(w, "train seed " + std::to_string(seed));
    auto run = prepare(c, seed);
    TrainSeedResult r;
    r.seed = seed;
    r.train_accuracy = accuracy(run.model, run.data.train);
    r.eval_accuracy = accuracy(run.model, run.data.eval);
    r.final_loss = run.epoch_loss.empty() ? 0.0 : run.epoch_loss.back();
    std::string loss = "epoch,loss\n";
    for (std::size_t e = 0; e < run.epoch_loss.size(); ++e)
      loss += std::to_string(e + 1) + ',' + num(run.epoch_loss[e]) + '\n';
    w.write(seed_dir(seed) + "loss.csv", loss);
    w.write(seed_dir(seed) + "model.txt", serialize(run.model));
    table += std::to_string(seed) + ',' + num(r.train_accuracy) + ',' + num(r.eval_accuracy) + ',' +
             num(r.final_loss) + '\n';
    r.model = std::move(run.model);
    out.push_back(std::move(r));
  }
  std::vector<double> tr, ev, lo;
  for (const auto& r : out) {
    tr.push_back(r.train_accuracy);
    ev.push_back(r.eval_accuracy);
    lo.push_back(r.final_loss);
  }
  table += "median," + num(median(tr)) + ',' + num(median(ev)) + ',' + num(median(lo)) + '\n';
  w.write("train.csv", table);
  return out;
}

// explain ----------------------------------------------------------------------

struct ExplainSeedResult {
  std::uint64_t seed = 0;
  std::vector<ExplanationTable> tables;
};

inline std::vector<ExplainSeedResult> cmd_explain(const ExperimentConfig& c, ArtifactWriter& w) {
  std::vector<ExplainSeedResult> out;
  for (auto seed : c.seeds) {
    auto run = prepare(c, seed);
    const auto s = seeded_settings(c, run);
    ExplainSeedResult r;
    r.seed = seed;
    for (auto kind : explainer_kinds(c)) {
      StageTimer t(w, std::string(to_string(kind)) + " seed " + std::to_string(seed));
      auto table = explain_all(kind, run.model, run.points(c), s, run.data.train.X);
      w.write(seed_dir(seed) + "explanations_" + std::string(to_string(kind)) + ".csv", explanations_csv(table));
      r.tables.push_back(std::move(table));
    }
    out.push_back(std::move(r));
  }
  return out;
}

// robustness ---------------------------------------------------------------------

struct RobustnessSeedResult {
  RobustnessReport report;
  std::map<std::string, double> auc;  // explainer name (or "classifier") -> AUC
};

namespace detail {

inline nlohmann::json summary_json(const ExplainerRobustness& e) {
  std::vector<double> lle, as;
  for (const auto& v : e.lle)
    if (v) lle.push_back(*v);
  for (const auto& v : e.as)
    if (v) as.push_back(*v);
  return {{"auc", e.auc},
          {"lambda_max", e.lambda_max},
          {"lle", {{"min", lle.empty() ? 0.0 : quantile(lle, 0.0)},
                   {"q1", lle.empty() ? 0.0 : quantile(lle, 0.25)},
                   {"median", lle.empty() ? 0.0 : quantile(lle, 0.5)},
                   {"q3", lle.empty() ? 0.0 : quantile(lle, 0.75)},
                   {"max", lle.empty() ? 0.0 : quantile(lle, 1.0)},
                   {"points_with_neighbors", lle.size()}}},
          {"as_mean", as.empty() ? 0.0 : std::accumulate(as.begin(), as.end(), 0.0) / static_cast<double>(as.size())}};
}

}  // namespace detail

inline std::vector<RobustnessSeedResult> cmd_robustness(const ExperimentConfig& c, ArtifactWriter& w) {
  std::vector<RobustnessSeedResult> out;
  std::string table = "seed,explainer,auc,lambda_max,lle_median,as_mean\n";
  std::map<std::string, std::vector<double>> aucs;
  std::vector<std::string> order;
  for (auto seed : c.seeds) {
    StageTimer t(w, "robustness seed " + std::to_string(seed));
    auto run = prepare(c, seed);
    const auto& pts = run.points(c);
    const auto s = seeded_settings(c, run);
    RobustnessSeedResult res;
    auto& rep = res.report;
    rep.dataset = c.dataset.name;
    rep.model = c.model.activation + " depth " + std::to_string(run.model.depth());
    rep.seed = seed;
    rep.r = resolve_radius(c.robustness.r, pts);
    rep.epsilon = resolve_radius(c.robustness.epsilon, pts);
    const auto pairs = eligible_pairs(pts, rep.r);
    const auto eps_pairs = eligible_pairs(pts, rep.epsilon);
    rep.num_pairs = pairs.size();
    if (pairs.empty()) throw EmptyPairsError();

    std::string curves = "explainer,lambda,normalized_lambda,astuteness\n";
    std::string per_point = "point_index,explainer,lle,as\n";
    std::vector<PlotSeries> plot;
    nlohmann::json js;
    js["dataset"] = rep.dataset;
    js["model"] = rep.model;
    js["seed"] = seed;
    js["r"] = rep.r;
    js["epsilon"] = rep.epsilon;
    js["num_pairs"] = rep.num_pairs;
    js["classifier_definition"] = "classifier normalised astuteness (assumed: astuteness pipeline applied to psi := f)";

    auto record = [&](const std::string& name, const ExplainerRobustness& e) {
      res.auc[name] = e.auc;
      if (!aucs.count(name)) order.push_back(name);
      aucs[name].push_back(e.auc);
      PlotSeries ps{name, {}, e.curve.probs};
      for (double lam : e.curve.lambdas) {
        const double nl = e.curve.degenerate ? 0.0 : lam / e.curve.lambda_max;
        ps.x.push_back(nl);
      }
      for (std::size_t k = 0; k < ps.x.size(); ++k)
        curves += name + ',' + num(e.curve.lambdas[k]) + ',' + num(ps.x[k]) + ',' + num(ps.y[k]) + '\n';
      plot.push_back(std::move(ps));
      for (std::size_t i = 0; i < e.lle.size(); ++i)
        per_point += std::to_string(i) + ',' + name + ',' + (e.lle[i] ? num(*e.lle[i]) : "") + ',' +
                     (e.as[i] ? num(*e.as[i]) : "") + '\n';
      auto sj = detail::summary_json(e);
      js["explainers"][name] = sj;
      table += std::to_string(seed) + ',' + name + ',' + num(e.auc) + ',' + num(e.lambda_max) + ',' +
               num(sj["lle"]["median"].get<double>()) + ',' + num(sj["as_mean"].get<double>()) + '\n';
    };

    for (auto kind : explainer_kinds(c)) {
      const auto expl = explain_all(kind, run.model, pts, s, run.data.train.X);
      auto e = assess(expl.attributions, pts, pairs, eps_pairs, c.robustness.grid_size);
      e.explainer = kind;
      record(std::string(to_string(kind)), e);
      rep.explainers.push_back(std::move(e));
    }
    rep.classifier = assess(forward_all(run.model, pts), pts, pairs, eps_pairs, c.robustness.grid_size);
    record("classifier", *rep.classifier);

    w.write(seed_dir(seed) + "curves.csv", curves);
    w.write(seed_dir(seed) + "local_metrics.csv", per_point);
    w.write(seed_dir(seed) + "curves.svg",
            svg_curves(c.dataset.name + " seed " + std::to_string(seed) + ": astuteness curves", plot));
    w.write(seed_dir(seed) + "report.json", js.dump(2) + '\n');
    out.push_back(std::move(res));
  }
  for (const auto& name : order) table += "median," + name + ',' + num(median(aucs[name])) + ",,,\n";
  w.write("robustness.csv", table);
  return out;
}

// stablerank ---------------------------------------------------------------------

struct StableRankSeedResult {
  std::uint64_t seed = 0;
  std::vector<SweepRow> sweep;
  double output_stable_rank = 0.0;
  double classifier_auc = 0.0;
  double lipschitz_lower = 0.0;   // output layer
  double max_output_ratio = 0.0;  // over all point pairs
  double lipschitz_upper = 0.0;   // whole network
};

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string s = "layer,stable_rank,frobenius,spectral,lipschitz_lower,lipschitz_upper,closed_form_discrepancy\n";
  for (const auto& r : rows)
    s += std::to_string(r.layer) + ',' + num(r.stable.value) + ',' + num(r.stable.frobenius) + ',' +
         num(r.stable.spectral) + ',' + num(r.bounds.lower) + ',' + num(r.bounds.upper) + ',' +
         num(r.closed_form_discrepancy) + '\n';
  return s;
}

inline std::vector<StableRankSeedResult> cmd_stablerank(const ExperimentConfig& c, ArtifactWriter& w) {
  std::vector<StableRankSeedResult> out;
  std::string table =
      "seed,output_stable_rank,classifier_auc,lipschitz_lower,max_output_ratio,lipschitz_upper\n";
  std::vector<double> sr, auc;
  for (auto seed : c.seeds) {
    StageTimer t(w, "stablerank seed " + std::to_string(seed));
    auto run = prepare(c, seed);
    const auto& pts = run.points(c);
    std::vector<std::size_t> layers = c.layers;
    if (layers.empty())
      for (std::size_t k = 0; k <= run.model.depth(); ++k) layers.push_back(k);
    for (auto k : layers)
      if (k > run.model.depth())
        throw ConfigError("config field 'stablerank.layers': layer " + std::to_string(k) + " exceeds depth " +
                          std::to_string(run.model.depth()));
    StableRankSeedResult r;
    r.seed = seed;
    r.sweep = stable_rank_sweep(run.model, pts, layers);
    const auto outputs = forward_all(run.model, pts);
    r.output_stable_rank = stable_rank(outputs).value;
    const double radius = resolve_radius(c.robustness.r, pts);
    r.classifier_auc = normalised_astuteness_auc(
        astuteness_curve(outputs, eligible_pairs(pts, radius), c.robustness.grid_size));
    r.lipschitz_lower = lipschitz_lower_bound(pairwise_sq_dist(pts), pairwise_sq_dist(outputs));
    r.max_output_ratio = max_pair_ratio(outputs, eligible_pairs(pts, std::numeric_limits<double>::infinity()));
    r.lipschitz_upper = lipschitz_upper_bound(run.model);
    w.write(seed_dir(seed) + "sweep.csv", sweep_csv(r.sweep));
    table += std::to_string(seed) + ',' + num(r.output_stable_rank) + ',' + num(r.classifier_auc) + ',' +
             num(r.lipschitz_lower) + ',' + num(r.max_output_ratio) + ',' + num(r.lipschitz_upper) + '\n';
    sr.push_back(r.output_stable_rank);
    auc.push_back(r.classifier_auc);
    out.push_back(std::move(r));
  }
  table += "median," + num(median(sr)) + ',' + num(median(auc)) + ",,,\n";
  w.write("stablerank.csv", table);
  return out;
}

// verify -------------------------------------------------------------------------

struct VerifySeedResult {
  std::uint64_t seed = 0;
  std::vector<TheoremVerification> theorems;

  bool all_pass() const {
    return std::all_of(theorems.begin(), theorems.end(), [](const auto& t) { return t.all_pass(); });
  }
};

inline std::vector<VerifySeedResult> cmd_verify(const ExperimentConfig& c, ArtifactWriter& w) {
  std::vector<VerifySeedResult> out;
  std::string table = "seed,explainer,r,sup_d,inf_d,num_pairs,L,alpha,lambda,astuteness,required,margin,pass\n";
  for (auto seed : c.seeds) {
    StageTimer t(w, "verify seed " + std::to_string(seed));
    auto run = prepare(c, seed);
    const auto& pts = run.points(c);
    const auto s = seeded_settings(c, run);
    const double r = resolve_radius(c.robustness.r, pts);
    const auto outputs = forward_all(run.model, pts);
    std::vector<double> L_grid = c.verify_L;
    if (L_grid.empty()) L_grid.push_back(max_pair_ratio(outputs, eligible_pairs(pts, r)));
    VerifySeedResult res;
    res.seed = seed;
    for (auto kind : explainer_kinds(c)) {
      if (kind == ExplainerKind::kernel_shap) continue;
      const auto expl = explain_all(kind, run.model, pts, s, run.data.train.X);
      auto v = verify_theorem(kind, pts, outputs, expl.attributions, r, L_grid, pts.rows());
      for (const auto& ch : v.checks)
        table += std::to_string(seed) + ',' + std::string(to_string(kind)) + ',' + num(v.r) + ',' + num(v.sup_d) +
                 ',' + num(v.inf_d) + ',' + std::to_string(v.num_pairs) + ',' + num(ch.L) + ',' + num(ch.alpha) +
                 ',' + num(ch.lambda) + ',' + num(ch.astuteness) + ',' + num(ch.required) + ',' +
                 num(ch.margin) + ',' + (ch.pass ? "pass" : "fail") + '\n';
      res.theorems.push_back(std::move(v));
    }
    out.push_back(std::move(res));
  }
  w.write("verify.csv", table);
  return out;
}

// autoencoder --------------------------------------------------------------------

struct AutoencoderRun {
  std::string config;  // sharp | distorted
  double a = 0.0;
  double psnr = 0.0;
  double stable_rank = 0.0;
  double lipschitz_lower = 0.0;
  double lipschitz_upper = 0.0;
  double auc = 0.0;
  AstutenessCurve curve;
};

struct AutoencoderSeedResult {
  std::uint64_t seed = 0;
  AutoencoderRun sharp;
  AutoencoderRun distorted;
};

inline std::vector<AutoencoderSeedResult> cmd_autoencoder(const ExperimentConfig& c, ArtifactWriter& w) {
  const auto& ac = c.autoencoder;
  std::vector<AutoencoderSeedResult> out;
  std::string table = "seed,config,a,psnr,stable_rank,lipschitz_lower,lipschitz_upper,auc\n";
  std::map<std::string, std::vector<double>> med_psnr, med_sr, med_lb;
  for (auto seed : c.seeds) {
    StageTimer t(w, "autoencoder seed " + std::to_string(seed));
    const auto data = load_data(c.dataset, seed);
    const auto& pts = c.dataset.explain_on == "train" ? data.train.X : data.eval.X;
    const std::size_t d = data.train.dim();
    const double r = resolve_radius(c.robustness.r, pts);
    const auto pairs = eligible_pairs(pts, r);
    const auto Y = pairwise_sq_dist(pts);
    AutoencoderSeedResult res;
    res.seed = seed;
    std::vector<PlotSeries> plot;
    std::string recon = "config,point_index,kind";
    for (std::size_t j = 0; j < d; ++j) recon += ",px_" + std::to_string(j);
    recon += '\n';
    for (int which = 0; which < 2; ++which) {
      AutoencoderRun& ar = which == 0 ? res.sharp : res.distorted;
      ar.config = which == 0 ? "sharp" : "distorted";
      ar.a = which == 0 ? ac.sharp_a : ac.distorted_a;
      auto m = make_mlp({d, ac.hidden, d}, Activation::gaussian(ar.a), OutputMode::identity_regressor,
                        derive_seed(seed, kInit));
      TrainConfig tc;
      tc.epochs = ac.epochs;
      tc.batch_size = c.training.batch_size;
      tc.learning_rate = ac.learning_rate;
      tc.optimizer = parse_optimizer(ac.optimizer);
      tc.loss = Loss::mse;
      tc.seed = derive_seed(seed, kShuffle);
      const auto model = train(std::move(m), data.train, tc).model;
      const auto rec = forward_all(model, pts);
      ar.psnr = psnr(pts.data(), rec.data(), 1.0);
      ar.stable_rank = stable_rank(rec).value;
      ar.lipschitz_lower = lipschitz_lower_bound(Y, pairwise_sq_dist(rec));
      ar.lipschitz_upper = lipschitz_upper_bound(model);
      ar.curve = astuteness_curve(rec, pairs, c.robustness.grid_size);
      ar.auc = normalised_astuteness_auc(ar.curve);
      PlotSeries ps{ar.config, {}, ar.curve.probs};
      for (double lam : ar.curve.lambdas) ps.x.push_back(ar.curve.degenerate ? 0.0 : lam / ar.curve.lambda_max);
      plot.push_back(std::move(ps));
      for (std::size_t i = 0; i < std::min(ac.reconstructions, pts.rows()); ++i) {
        if (which == 0) {
          recon += "original," + std::to_string(i) + ",original";
          for (double v : pts.row(i)) recon += ',' + num(v);
          recon += '\n';
        }
        recon += ar.config + ',' + std::to_string(i) + ",reconstruction";
        for (double v : rec.row(i)) recon += ',' + num(v);
        recon += '\n';
      }
      w.write(seed_dir(seed) + "autoencoder_" + ar.config + ".txt", serialize(model));
      table += std::to_string(seed) + ',' + ar.config + ',' + num(ar.a) + ',' + num(ar.psnr) + ',' +
               num(ar.stable_rank) + ',' + num(ar.lipschitz_lower) + ',' + num(ar.lipschitz_upper) + ',' +
               num(ar.auc) + '\n';
      med_psnr[ar.config].push_back(ar.psnr);
      med_sr[ar.config].push_back(ar.stable_rank);
      med_lb[ar.config].push_back(ar.lipschitz_lower);
    }
    w.write(seed_dir(seed) + "reconstructions.csv", recon);
    w.write(seed_dir(seed) + "autoencoder_curves.svg",
            svg_curves("autoencoder seed " + std::to_string(seed) + ": astuteness curves", plot));
    std::string curves = "config,lambda,normalized_lambda,astuteness\n";
    for (const auto* ar : {&res.sharp, &res.distorted})
      for (std::size_t k = 0; k < ar->curve.lambdas.size(); ++k)
        curves += ar->config + ',' + num(ar->curve.lambdas[k]) + ',' +
                  num(ar->curve.degenerate ? 0.0 : ar->curve.lambdas[k] / ar->curve.lambda_max) + ',' +
                  num(ar->curve.probs[k]) + '\n';
    w.write(seed_dir(seed) + "autoencoder_curves.csv", curves);
    out.push_back(std::move(res));
  }
  for (const char* cfg : {"sharp", "distorted"})
    table += std::string("median,") + cfg + ",," + num(median(med_psnr[cfg])) + ',' + num(median(med_sr[cfg])) +
             ',' + num(median(med_lb[cfg])) + ",,\n";
  w.write("autoencoder.csv", table);
  return out;
}

// dispatch -----------------------------------------------------------------------

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"train",      "explain", "robustness",
                                                 "stablerank", "verify",  "autoencoder"};
  return names;
}

/// Runs `command` and writes its artifacts plus `manifest.json` under `c.output_dir`.
inline void run_command(const std::string& command, const ExperimentConfig& c) {
  ArtifactWriter w(c.output_dir);
  if (command == "train") cmd_train(c, w);
  else if (command == "explain") cmd_explain(c, w);
  else if (command == "robustness") cmd_robustness(c, w);
  else if (command == "stablerank") cmd_stablerank(c, w);
  else if (command == "verify") cmd_verify(c, w);
  else if (command == "autoencoder") cmd_autoencoder(c, w);
  else throw ArgumentError("unknown command '" + command + "'");
  w.write_manifest(command, to_json(c));
}

}  // namespace astute::harness
