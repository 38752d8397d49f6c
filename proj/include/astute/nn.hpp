#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "astute/datasets.hpp"
#include "astute/error.hpp"
#include "astute/linalg.hpp"

namespace astute {

enum class ActivationKind { relu, tanh, gaussian };

struct Activation {
  ActivationKind kind = ActivationKind::relu;
  double a = 1.0;  // width of the gaussian bump; unused otherwise

  static Activation relu() { return {ActivationKind::relu, 1.0}; }
  static Activation tanh() { return {ActivationKind::tanh, 1.0}; }
  static Activation gaussian(double a) {
    if (a == 0.0 || !std::isfinite(a)) throw ArgumentError("gaussian activation needs a != 0");
    return {ActivationKind::gaussian, a};
  }

  double operator()(double z) const {
    switch (kind) {
      case ActivationKind::relu: return z > 0.0 ? z : 0.0;
      case ActivationKind::tanh: return std::tanh(z);
      case ActivationKind::gaussian: return std::exp(-0.5 * z * z / (a * a));
    }
    return z;
  }

  /// g'(z) given z and g(z). ReLU uses g'(0) = 0.
  double derivative(double z, double gz) const {
    switch (kind) {
      case ActivationKind::relu: return z > 0.0 ? 1.0 : 0.0;
      case ActivationKind::tanh: return 1.0 - gz * gz;
      case ActivationKind::gaussian: return -z / (a * a) * gz;
    }
    return 1.0;
  }

  /// sup |g'|.
  double lipschitz() const {
    if (kind == ActivationKind::gaussian) return std::exp(-0.5) / std::abs(a);
    return 1.0;
  }

  friend bool operator==(const Activation&, const Activation&) = default;
};

inline std::string_view to_string(ActivationKind k) {
  switch (k) {
    case ActivationKind::relu: return "relu";
    case ActivationKind::tanh: return "tanh";
    case ActivationKind::gaussian: return "gaussian";
  }
  return "relu";
}

inline ActivationKind parse_activation_kind(std::string_view s) {
  if (s == "relu") return ActivationKind::relu;
  if (s == "tanh") return ActivationKind::tanh;
  if (s == "gaussian") return ActivationKind::gaussian;
  throw ArgumentError("unknown activation '" + std::string(s) + "'");
}

enum class OutputMode { softmax_classifier, identity_regressor };

inline std::string_view to_string(OutputMode m) {
  return m == OutputMode::softmax_classifier ? "softmax_classifier" : "identity_regressor";
}

struct Layer {
  Matrix W;  // out x in
  Vector b;  // out
  friend bool operator==(const Layer&, const Layer&) = default;
};

/// Fully connected network. The activation follows every affine layer but
/// the last; the last feeds softmax (classifier) or is returned raw.
struct Mlp {
  std::vector<Layer> layers;
  Activation activation;
  OutputMode output = OutputMode::softmax_classifier;

  std::size_t depth() const noexcept { return layers.size(); }
  std::size_t input_dim() const { return layers.front().W.cols(); }
  std::size_t output_dim() const { return layers.back().W.rows(); }
  /// Width of the representation after layer k (k = 0 is the input).
  std::size_t width(std::size_t k) const { return k == 0 ? input_dim() : layers[k - 1].W.rows(); }

  friend bool operator==(const Mlp&, const Mlp&) = default;
};

inline void validate(const Mlp& m) {
  if (m.layers.empty()) throw DimensionError("mlp has no layers");
  for (std::size_t k = 0; k < m.layers.size(); ++k) {
    const auto& l = m.layers[k];
    if (l.W.rows() != l.b.size()) throw DimensionError("layer " + std::to_string(k) + ": bias length");
    if (k > 0 && l.W.cols() != m.layers[k - 1].W.rows())
      throw DimensionError("layer " + std::to_string(k) + ": input dim does not match previous layer");
  }
  if (m.activation.kind == ActivationKind::gaussian && m.activation.a == 0.0)
    throw ArgumentError("gaussian activation needs a != 0");
}

/// `dims` = {input, hidden..., output}. Weights and biases are drawn from
/// U(-1/√fan_in, 1/√fan_in).
inline Mlp make_mlp(const std::vector<std::size_t>& dims, Activation act, OutputMode mode,
                    std::uint64_t seed) {
  if (dims.size() < 2) throw ArgumentError("make_mlp: need at least input and output dims");
  Mlp m;
  m.activation = act;
  m.output = mode;
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[k]));
    std::uniform_real_distribution<double> u(-bound, bound);
    Layer l{Matrix(dims[k + 1], dims[k]), Vector(dims[k + 1])};
    for (auto& w : l.W.data()) w = u(rng);
    for (auto& b : l.b) b = u(rng);
    m.layers.push_back(std::move(l));
  }
  return m;
}

inline Vector softmax(std::span<const double> z) {
  const double mx = *std::max_element(z.begin(), z.end());
  Vector p(z.size());
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += (p[i] = std::exp(z[i] - mx));
  for (auto& v : p) v /= s;
  return p;
}

/// Per-layer values of one forward pass: pre[k] is the pre-activation of
/// layer k, post[k] the representation after layer k (post[0] = input).
struct ForwardTrace {
  std::vector<Vector> pre;
  std::vector<Vector> post;
};

inline ForwardTrace forward_trace(const Mlp& m, std::span<const double> x) {
  if (x.size() != m.input_dim())
    throw DimensionError("forward: input length " + std::to_string(x.size()) + " != " +
                         std::to_string(m.input_dim()));
  ForwardTrace t;
  t.post.emplace_back(x.begin(), x.end());
  for (std::size_t k = 0; k < m.depth(); ++k) {
    Vector z = matvec(m.layers[k].W, t.post.back());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += m.layers[k].b[i];
    Vector h;
    if (k + 1 < m.depth()) {
      h.resize(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) h[i] = m.activation(z[i]);
    } else {
      h = m.output == OutputMode::softmax_classifier ? softmax(z) : z;
    }
    t.pre.push_back(std::move(z));
    t.post.push_back(std::move(h));
  }
  return t;
}

inline Vector forward(const Mlp& m, std::span<const double> x) {
  return std::move(forward_trace(m, x).post.back());
}

inline std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

inline std::size_t predict(const Mlp& m, std::span<const double> x) { return argmax(forward(m, x)); }

namespace detail {

/// Given dL/d(pre-activation of the last layer), returns dL/dx and, if
/// `grads` is non-null, accumulates parameter gradients into it.
inline Vector backprop(const Mlp& m, const ForwardTrace& t, Vector delta,
                       std::vector<Layer>* grads) {
  for (std::size_t k = m.depth(); k-- > 0;) {
    const auto& layer = m.layers[k];
    if (grads) {
      auto& g = (*grads)[k];
      const auto& in = t.post[k];
      for (std::size_t i = 0; i < delta.size(); ++i) {
        if (delta[i] == 0.0) continue;
        auto row = g.W.row(i);
        for (std::size_t j = 0; j < in.size(); ++j) row[j] += delta[i] * in[j];
        g.b[i] += delta[i];
      }
    }
    Vector up = matvec_transposed(layer.W, delta);
    if (k > 0) {
      const auto& z = t.pre[k - 1];
      const auto& h = t.post[k];
      for (std::size_t j = 0; j < up.size(); ++j) up[j] *= m.activation.derivative(z[j], h[j]);
    }
    delta = std::move(up);
  }
  return delta;
}

/// d output[c] / d (last pre-activation).
inline Vector output_seed(const Mlp& m, const Vector& out, std::size_t c) {
  Vector seed(out.size(), 0.0);
  if (m.output == OutputMode::softmax_classifier) {
    for (std::size_t i = 0; i < out.size(); ++i) seed[i] = out[c] * ((i == c ? 1.0 : 0.0) - out[i]);
  } else {
    seed[c] = 1.0;
  }
  return seed;
}

}  // namespace detail

/// ∇ₓ of output `class_index` (a softmax probability for classifiers).
inline Vector input_gradient(const Mlp& m, std::span<const double> x, std::size_t class_index) {
  if (class_index >= m.output_dim())
    throw DimensionError("input_gradient: class index " + std::to_string(class_index) +
                         " >= output dim " + std::to_string(m.output_dim()));
  const auto t = forward_trace(m, x);
  return detail::backprop(m, t, detail::output_seed(m, t.post.back(), class_index), nullptr);
}

enum class Loss { cross_entropy, mse };
enum class Optimizer { sgd, adam };

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 16;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  Loss loss = Loss::cross_entropy;
  Optimizer optimizer = Optimizer::sgd;
  double momentum = 0.0;  // sgd only
};

struct TrainResult {
  Mlp model;
  std::vector<double> epoch_loss;
};

/// Mini-batch training. Cross-entropy uses `ds.labels`; mse reconstructs
/// `ds.X` (autoencoder). Deterministic given the model and `cfg.seed`.
inline TrainResult train(Mlp m, const Dataset& ds, const TrainConfig& cfg) {
  validate(m);
  if (cfg.epochs < 1) throw ArgumentError("train: epochs must be >= 1");
  if (cfg.batch_size < 1) throw ArgumentError("train: batch_size must be >= 1");
  if (!(cfg.learning_rate >= 0.0)) throw ArgumentError("train: learning_rate must be >= 0");
  if (ds.dim() != m.input_dim()) throw DimensionError("train: dataset dim != model input dim");
  if (cfg.loss == Loss::cross_entropy) {
    if (m.output != OutputMode::softmax_classifier)
      throw ArgumentError("train: cross_entropy needs a softmax classifier");
    if (static_cast<std::size_t>(ds.num_classes) > m.output_dim())
      throw DimensionError("train: more classes than model outputs");
  } else if (m.output_dim() != ds.dim()) {
    throw DimensionError("train: mse reconstruction needs output dim == input dim");
  }

  const std::size_t n = ds.size();
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  auto zero_like = [&] {
    std::vector<Layer> g;
    for (const auto& l : m.layers) g.push_back({Matrix(l.W.rows(), l.W.cols()), Vector(l.b.size(), 0.0)});
    return g;
  };
  std::vector<Layer> vel = zero_like(), mom2 = zero_like();
  std::size_t step = 0;
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  TrainResult res;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      auto grads = zero_like();
      for (std::size_t bi = start; bi < end; ++bi) {
        const std::size_t i = order[bi];
        const auto t = forward_trace(m, ds.point(i));
        const auto& out = t.post.back();
        Vector delta(out.size());
        if (cfg.loss == Loss::cross_entropy) {
          const auto y = static_cast<std::size_t>(ds.labels[i]);
          total += -std::log(std::max(out[y], 1e-300));
          for (std::size_t c = 0; c < out.size(); ++c) delta[c] = out[c] - (c == y ? 1.0 : 0.0);
        } else {
          const auto target = ds.point(i);
          double se = 0.0;
          for (std::size_t c = 0; c < out.size(); ++c) {
            const double r = out[c] - target[c];
            se += r * r;
            delta[c] = 2.0 * r / static_cast<double>(out.size());
          }
          total += se / static_cast<double>(out.size());
        }
        detail::backprop(m, t, std::move(delta), &grads);
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      ++step;
      const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      auto update = [&](double& p, double g, double& v, double& s) {
        g *= scale;
        if (cfg.optimizer == Optimizer::sgd) {
          v = cfg.momentum * v + g;
          p -= cfg.learning_rate * v;
        } else {
          v = beta1 * v + (1.0 - beta1) * g;
          s = beta2 * s + (1.0 - beta2) * g * g;
          p -= cfg.learning_rate * (v / bc1) / (std::sqrt(s / bc2) + eps);
        }
      };
      for (std::size_t k = 0; k < m.depth(); ++k) {
        auto& W = m.layers[k].W.data();
        auto& b = m.layers[k].b;
        for (std::size_t j = 0; j < W.size(); ++j)
          update(W[j], grads[k].W.data()[j], vel[k].W.data()[j], mom2[k].W.data()[j]);
        for (std::size_t j = 0; j < b.size(); ++j) update(b[j], grads[k].b[j], vel[k].b[j], mom2[k].b[j]);
      }
    }
    const double mean_loss = total / static_cast<double>(n);
    if (!std::isfinite(mean_loss))
      throw DivergenceError("training diverged (non-finite loss) at epoch " + std::to_string(epoch + 1));
    res.epoch_loss.push_back(mean_loss);
  }
  res.model = std::move(m);
  return res;
}

inline double accuracy(const Mlp& m, const Dataset& ds) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    hit += predict(m, ds.point(i)) == static_cast<std::size_t>(ds.labels[i]) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(ds.size());
}

/// Outputs of the model for every row of `x`, stacked.
inline Matrix forward_all(const Mlp& m, const Matrix& x) {
  Matrix out(x.rows(), m.output_dim());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto y = forward(m, x.row(i));
    std::copy(y.begin(), y.end(), out.row(i).begin());
  }
  return out;
}

/// Representation after layer `layer_k` for every row of `x`: k = 0 is the
/// input itself, k = depth the model output.
inline Matrix layer_embedding(const Mlp& m, const Matrix& x, std::size_t layer_k) {
  if (layer_k > m.depth())
    throw ArgumentError("layer_embedding: layer " + std::to_string(layer_k) + " > depth " +
                        std::to_string(m.depth()));
  Matrix out(x.rows(), m.width(layer_k));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto t = forward_trace(m, x.row(i));
    std::copy(t.post[layer_k].begin(), t.post[layer_k].end(), out.row(i).begin());
  }
  return out;
}

inline Matrix layer_embedding(const Mlp& m, const Dataset& ds, std::size_t layer_k) {
  return layer_embedding(m, ds.X, layer_k);
}

/// ∏ ‖W_i‖₂ times the activation's Lipschitz factor for each hidden
/// activation, over the first `upto` layers (default: all). Softmax is
/// 1-Lipschitz in ℓ₂ and contributes no factor.
inline double lipschitz_upper_bound(const Mlp& m, std::size_t upto = std::numeric_limits<std::size_t>::max()) {
  upto = std::min(upto, m.depth());
  double bound = 1.0;
  for (std::size_t k = 0; k < upto; ++k) {
    bound *= spectral_norm(m.layers[k].W).value;
    if (k + 1 < m.depth()) bound *= m.activation.lipschitz();
  }
  return bound;
}

/// Peak signal-to-noise ratio in dB; +inf when the reconstruction is exact.
inline double psnr(std::span<const double> original, std::span<const double> reconstruction,
                   double max_val = 1.0) {
  if (original.size() != reconstruction.size() || original.empty())
    throw DimensionError("psnr: length mismatch");
  if (!(max_val > 0.0)) throw ArgumentError("psnr: max_val must be > 0");
  const double mse = sq_distance(original, reconstruction) / static_cast<double>(original.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_val * max_val / mse);
}

// Serialization -------------------------------------------------------------

inline constexpr int kModelSchemaVersion = 1;

namespace detail {
inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

/// Line-oriented text format; every real printed with 17 significant digits
/// so parse(serialize(m)) == m bit for bit.
///
///   astute-mlp 1
///   activation <relu|tanh|gaussian> <a>
///   output <softmax_classifier|identity_regressor>
///   layers <count>
///   layer <rows> <cols>
///   <rows lines of W>
///   <one line of b>
inline std::string serialize(const Mlp& m) {
  std::ostringstream os;
  os << "astute-mlp " << kModelSchemaVersion << '\n';
  os << "activation " << to_string(m.activation.kind) << ' ' << detail::fmt17(m.activation.a) << '\n';
  os << "output " << to_string(m.output) << '\n';
  os << "layers " << m.depth() << '\n';
  for (const auto& l : m.layers) {
    os << "layer " << l.W.rows() << ' ' << l.W.cols() << '\n';
    for (std::size_t i = 0; i < l.W.rows(); ++i) {
      for (std::size_t j = 0; j < l.W.cols(); ++j) os << (j ? " " : "") << detail::fmt17(l.W(i, j));
      os << '\n';
    }
    for (std::size_t i = 0; i < l.b.size(); ++i) os << (i ? " " : "") << detail::fmt17(l.b[i]);
    os << '\n';
  }
  os << "end\n";
  return os.str();
}

inline Mlp parse_mlp(std::string_view text) {
  std::istringstream is{std::string(text)};
  auto expect = [&](const char* word) {
    std::string w;
    if (!(is >> w) || w != word) throw ParseError(std::string("model file: expected '") + word + "'");
  };
  auto real = [&] {
    std::string tok;
    if (!(is >> tok)) throw ParseError("model file: truncated");
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) throw ParseError("model file: bad number '" + tok + "'");
    return v;
  };
  auto count = [&] {
    long long v = 0;
    if (!(is >> v) || v < 0) throw ParseError("model file: bad count");
    return static_cast<std::size_t>(v);
  };

  expect("astute-mlp");
  const auto version = count();
  if (version != kModelSchemaVersion)
    throw ParseError("model file: unsupported schema version " + std::to_string(version));
  Mlp m;
  expect("activation");
  std::string act;
  is >> act;
  m.activation.kind = parse_activation_kind(act);
  m.activation.a = real();
  expect("output");
  std::string mode;
  is >> mode;
  if (mode == "softmax_classifier") m.output = OutputMode::softmax_classifier;
  else if (mode == "identity_regressor") m.output = OutputMode::identity_regressor;
  else throw ParseError("model file: unknown output mode '" + mode + "'");
  expect("layers");
  const auto n = count();
  for (std::size_t k = 0; k < n; ++k) {
    expect("layer");
    const auto rows = count(), cols = count();
    Layer l{Matrix(rows, cols), Vector(rows)};
    for (auto& w : l.W.data()) w = real();
    for (auto& b : l.b) b = real();
    m.layers.push_back(std::move(l));
  }
  expect("end");
  std::string extra;
  if (is >> extra) throw ParseError("model file: trailing content '" + extra + "'");
  validate(m);
  return m;
}

inline void save_mlp(const Mlp& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write model file '" + path + "'");
  os << serialize(m);
  if (!os) throw IoError("failed writing model file '" + path + "'");
}

inline Mlp load_mlp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_mlp(ss.str());
}

}  // namespace astute
