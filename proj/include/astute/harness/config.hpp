#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "astute/error.hpp"
#include "astute/explainers.hpp"
#include "astute/nn.hpp"

#ifndef ASTUTE_DEFAULT_DATA_DIR
#define ASTUTE_DEFAULT_DATA_DIR "data"
#endif

namespace astute::harness {

using json = nlohmann::json;

inline constexpr int kConfigSchemaVersion = 1;

struct DatasetSpec {
  std::string name = "xor";  // xor | iris | mnist
  std::size_t train_size = 200;
  std::size_t eval_size = 200;
  double noise_sd = 0.0;              // xor
  std::string iris_path = "bundled";  // iris
  std::vector<std::string> features;  // iris; empty => all four
  bool standardize = true;            // iris
  std::string mnist_dir = ASTUTE_DEFAULT_DATA_DIR "/mnist";
  std::size_t downsample = 2;  // mnist
  std::string explain_on = "eval";  // eval | train
};

struct ModelSpec {
  std::size_t depth = 2;  // number of affine layers
  std::size_t width = 16;
  std::string activation = "relu";
  double gaussian_a = 1.0;
  std::string file;  // load instead of training when set
};

struct TrainingSpec {
  std::size_t epochs = 100;
  std::size_t batch_size = 16;
  double learning_rate = 0.05;
  std::string optimizer = "sgd";
  double momentum = 0.0;
};

struct ExplainerSpec {
  std::vector<std::string> list = {"ig", "smoothgrad", "lime", "shap"};
  ExplainerSettings settings;
};

/// r and ε: "median" (pairwise median over the explained points) or a fixed value.
struct RadiusPolicy {
  std::optional<double> fixed;
};

struct RobustnessSpec {
  RadiusPolicy r;
  RadiusPolicy epsilon;
  std::size_t grid_size = 256;
  double p = 2.0;
};

struct AutoencoderSpec {
  std::size_t hidden = 64;
  double sharp_a = 0.5;
  double distorted_a = 5.0;
  std::size_t epochs = 30;
  double learning_rate = 0.003;
  std::string optimizer = "adam";
  std::size_t reconstructions = 8;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  DatasetSpec dataset;
  ModelSpec model;
  TrainingSpec training;
  ExplainerSpec explainers;
  RobustnessSpec robustness;
  std::vector<std::size_t> layers;  // stablerank; empty => 0..depth
  std::vector<double> verify_L;     // empty => max output pair ratio (α = 0)
  AutoencoderSpec autoencoder;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::string output_dir = "out";
};

namespace detail {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected a table");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(field(key), "wrong type");
    }
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail(path_.empty() ? k : path_ + "." + k, "unknown key");
  }

  [[noreturn]] static void fail(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline RadiusPolicy read_radius(const json* j, const std::string& field) {
  RadiusPolicy p;
  if (!j) return p;
  if (j->is_string()) {
    if (j->get<std::string>() != "median") Reader::fail(field, "expected \"median\" or a positive number");
    return p;
  }
  if (!j->is_number() || !(j->get<double>() > 0.0)) Reader::fail(field, "expected \"median\" or a positive number");
  p.fixed = j->get<double>();
  return p;
}

inline json radius_json(const RadiusPolicy& p) { return p.fixed ? json(*p.fixed) : json("median"); }

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  using detail::Reader;
  const auto& d = c.dataset;
  if (d.name != "xor" && d.name != "iris" && d.name != "mnist")
    Reader::fail("dataset.name", "expected xor, iris or mnist");
  if (d.train_size < 4) Reader::fail("dataset.train_size", "must be >= 4");
  if (d.eval_size < 4) Reader::fail("dataset.eval_size", "must be >= 4");
  if (d.noise_sd < 0.0) Reader::fail("dataset.noise_sd", "must be >= 0");
  if (d.downsample < 1 || 28 % d.downsample != 0) Reader::fail("dataset.downsample", "must divide 28");
  if (d.explain_on != "eval" && d.explain_on != "train") Reader::fail("dataset.explain_on", "expected eval or train");
  if (c.model.depth < 1) Reader::fail("model.depth", "must be >= 1");
  if (c.model.width < 1) Reader::fail("model.width", "must be >= 1");
  try {
    parse_activation_kind(c.model.activation);
  } catch (const Error&) {
    Reader::fail("model.activation", "expected relu, tanh or gaussian");
  }
  if (c.model.gaussian_a == 0.0) Reader::fail("model.gaussian_a", "must be nonzero");
  if (c.training.epochs < 1) Reader::fail("training.epochs", "must be >= 1");
  if (c.training.batch_size < 1) Reader::fail("training.batch_size", "must be >= 1");
  if (!(c.training.learning_rate > 0.0)) Reader::fail("training.learning_rate", "must be > 0");
  if (c.training.optimizer != "sgd" && c.training.optimizer != "adam")
    Reader::fail("training.optimizer", "expected sgd or adam");
  for (const auto& e : c.explainers.list) {
    try {
      parse_explainer(e);
    } catch (const Error&) {
      Reader::fail("explainers.list", "unknown explainer '" + e + "'");
    }
  }
  if (c.explainers.settings.ig_steps < 1) Reader::fail("explainers.ig_steps", "must be >= 1");
  if (c.robustness.grid_size < 2) Reader::fail("robustness.grid_size", "must be >= 2");
  if (c.robustness.p != 2.0) Reader::fail("robustness.p", "only p = 2 is supported");
  if (c.autoencoder.sharp_a == 0.0) Reader::fail("autoencoder.sharp_a", "must be nonzero");
  if (c.autoencoder.distorted_a == 0.0) Reader::fail("autoencoder.distorted_a", "must be nonzero");
  if (c.autoencoder.hidden < 1) Reader::fail("autoencoder.hidden", "must be >= 1");
  if (c.autoencoder.epochs < 1) Reader::fail("autoencoder.epochs", "must be >= 1");
  if (!(c.autoencoder.learning_rate > 0.0)) Reader::fail("autoencoder.learning_rate", "must be > 0");
  if (c.seeds.empty()) Reader::fail("seeds", "at least one seed required");
}

inline ExperimentConfig parse_config(const json& root) {
  using detail::Reader;
  ExperimentConfig c;
  Reader top(root, "");
  if (!root.contains("schema_version")) Reader::fail("schema_version", "missing");
  top.get("schema_version", c.schema_version);
  if (c.schema_version != kConfigSchemaVersion)
    Reader::fail("schema_version", "unsupported version " + std::to_string(c.schema_version));

  if (const auto* j = top.sub("dataset")) {
    Reader r(*j, "dataset");
    auto& d = c.dataset;
    r.get("name", d.name);
    r.get("train_size", d.train_size);
    r.get("eval_size", d.eval_size);
    r.get("noise_sd", d.noise_sd);
    r.get("iris_path", d.iris_path);
    r.get("features", d.features);
    r.get("standardize", d.standardize);
    r.get("mnist_dir", d.mnist_dir);
    r.get("downsample", d.downsample);
    r.get("explain_on", d.explain_on);
    r.finish();
  }
  if (const auto* j = top.sub("model")) {
    Reader r(*j, "model");
    r.get("depth", c.model.depth);
    r.get("width", c.model.width);
    r.get("activation", c.model.activation);
    r.get("gaussian_a", c.model.gaussian_a);
    r.get("file", c.model.file);
    r.finish();
  }
  if (const auto* j = top.sub("training")) {
    Reader r(*j, "training");
    r.get("epochs", c.training.epochs);
    r.get("batch_size", c.training.batch_size);
    r.get("learning_rate", c.training.learning_rate);
    r.get("optimizer", c.training.optimizer);
    r.get("momentum", c.training.momentum);
    r.finish();
  }
  if (const auto* j = top.sub("explainers")) {
    Reader r(*j, "explainers");
    auto& s = c.explainers.settings;
    r.get("list", c.explainers.list);
    r.get("ig_steps", s.ig_steps);
    r.get("ig_baseline", s.ig_baseline);
    r.get("smoothgrad_samples", s.smoothgrad.num_samples);
    r.get("smoothgrad_sd", s.smoothgrad.sd);
    r.get("lime_samples", s.lime.num_samples);
    r.get("lime_sd", s.lime.sd);
    r.get("lime_sigma", s.lime.kernel_sigma);
    r.get("lime_ridge", s.lime_ridge);
    r.get("shap_coalitions", s.shap_coalitions);
    r.finish();
  }
  if (const auto* j = top.sub("robustness")) {
    Reader r(*j, "robustness");
    c.robustness.r = detail::read_radius(r.sub("r"), "robustness.r");
    c.robustness.epsilon = detail::read_radius(r.sub("epsilon"), "robustness.epsilon");
    r.get("grid_size", c.robustness.grid_size);
    r.get("p", c.robustness.p);
    r.finish();
  }
  if (const auto* j = top.sub("stablerank")) {
    Reader r(*j, "stablerank");
    r.get("layers", c.layers);
    r.finish();
  }
  if (const auto* j = top.sub("verify")) {
    Reader r(*j, "verify");
    r.get("L", c.verify_L);
    r.finish();
  }
  if (const auto* j = top.sub("autoencoder")) {
    Reader r(*j, "autoencoder");
    auto& a = c.autoencoder;
    r.get("hidden", a.hidden);
    r.get("sharp_a", a.sharp_a);
    r.get("distorted_a", a.distorted_a);
    r.get("epochs", a.epochs);
    r.get("learning_rate", a.learning_rate);
    r.get("optimizer", a.optimizer);
    r.get("reconstructions", a.reconstructions);
    r.finish();
  }
  top.get("seeds", c.seeds);
  top.get("output_dir", c.output_dir);
  top.finish();
  validate(c);
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Fully resolved config as JSON. Keys are sorted, so the dump is canonical.
inline json to_json(const ExperimentConfig& c) {
  const auto& s = c.explainers.settings;
  json j;
  j["schema_version"] = c.schema_version;
  j["dataset"] = {{"name", c.dataset.name},           {"train_size", c.dataset.train_size},
                  {"eval_size", c.dataset.eval_size}, {"noise_sd", c.dataset.noise_sd},
                  {"iris_path", c.dataset.iris_path}, {"features", c.dataset.features},
                  {"standardize", c.dataset.standardize}, {"mnist_dir", c.dataset.mnist_dir},
                  {"downsample", c.dataset.downsample},   {"explain_on", c.dataset.explain_on}};
  j["model"] = {{"depth", c.model.depth},
                {"width", c.model.width},
                {"activation", c.model.activation},
                {"gaussian_a", c.model.gaussian_a},
                {"file", c.model.file}};
  j["training"] = {{"epochs", c.training.epochs},
                   {"batch_size", c.training.batch_size},
                   {"learning_rate", c.training.learning_rate},
                   {"optimizer", c.training.optimizer},
                   {"momentum", c.training.momentum}};
  j["explainers"] = {{"list", c.explainers.list},
                     {"ig_steps", s.ig_steps},
                     {"ig_baseline", s.ig_baseline},
                     {"smoothgrad_samples", s.smoothgrad.num_samples},
                     {"smoothgrad_sd", s.smoothgrad.sd},
                     {"lime_samples", s.lime.num_samples},
                     {"lime_sd", s.lime.sd},
                     {"lime_sigma", s.lime.kernel_sigma},
                     {"lime_ridge", s.lime_ridge},
                     {"shap_coalitions", s.shap_coalitions}};
  j["robustness"] = {{"r", detail::radius_json(c.robustness.r)},
                     {"epsilon", detail::radius_json(c.robustness.epsilon)},
                     {"grid_size", c.robustness.grid_size},
                     {"p", c.robustness.p}};
  j["stablerank"] = {{"layers", c.layers}};
  j["verify"] = {{"L", c.verify_L}};
  const auto& a = c.autoencoder;
  j["autoencoder"] = {{"hidden", a.hidden},   {"sharp_a", a.sharp_a},
                      {"distorted_a", a.distorted_a}, {"epochs", a.epochs},
                      {"learning_rate", a.learning_rate}, {"optimizer", a.optimizer},
                      {"reconstructions", a.reconstructions}};
  j["seeds"] = c.seeds;
  j["output_dir"] = c.output_dir;
  return j;
}

}  // namespace astute::harness
