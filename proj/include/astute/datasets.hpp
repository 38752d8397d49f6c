#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "astute/error.hpp"
#include "astute/iris_data.hpp"
#include "astute/linalg.hpp"
#include "astute/log.hpp"

namespace astute {

/// How feature values were preprocessed (the units a radius r is in).
enum class FeatureScale { raw, standardized, unit_interval, symmetric_unit };

inline std::string_view to_string(FeatureScale s) {
  switch (s) {
    case FeatureScale::raw: return "raw";
    case FeatureScale::standardized: return "standardized";
    case FeatureScale::unit_interval: return "unit_interval";
    case FeatureScale::symmetric_unit: return "symmetric_unit";
  }
  return "raw";
}

struct Dataset {
  std::string name;
  Matrix X;  // n points x d features
  std::vector<int> labels;
  int num_classes = 0;
  std::vector<std::string> feature_names;
  FeatureScale scale = FeatureScale::raw;

  std::size_t size() const noexcept { return X.rows(); }
  std::size_t dim() const noexcept { return X.cols(); }
  std::span<const double> point(std::size_t i) const { return X.row(i); }
};

inline void validate(const Dataset& ds) {
  if (ds.size() < 2) throw ArgumentError("dataset '" + ds.name + "' needs at least 2 points");
  if (ds.labels.size() != ds.size()) throw DimensionError("dataset labels/points length mismatch");
  for (int l : ds.labels)
    if (l < 0 || l >= ds.num_classes) throw ArgumentError("label out of range in '" + ds.name + "'");
  for (double v : ds.X.data())
    if (!std::isfinite(v)) throw ArgumentError("non-finite feature in '" + ds.name + "'");
}

/// Unordered index pairs (i < j) at distance 0 < d ≤ radius.
struct PairSet {
  double radius = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> distances;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }
};

/// Points uniform on [-1,1]², label 1 iff the coordinates have opposite
/// signs; Gaussian feature noise is added after labelling.
inline Dataset gen_xor(std::size_t n, double noise_sd, std::uint64_t seed) {
  if (n < 4) throw ArgumentError("gen_xor: n must be >= 4");
  if (noise_sd < 0.0) throw ArgumentError("gen_xor: noise_sd must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset ds;
  ds.name = "xor";
  ds.X = Matrix(n, 2);
  ds.labels.resize(n);
  ds.num_classes = 2;
  ds.feature_names = {"x0", "x1"};
  ds.scale = FeatureScale::symmetric_unit;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = unif(rng);
    const double b = unif(rng);
    ds.labels[i] = (a < 0.0) != (b < 0.0) ? 1 : 0;
    ds.X(i, 0) = a;
    ds.X(i, 1) = b;
  }
  if (noise_sd > 0.0)
    for (auto& v : ds.X.data()) v += noise_sd * gauss(rng);
  return ds;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline Dataset parse_iris(std::istream& in, const std::string& origin) {
  static const std::array<std::string, 4> kColumns = {"sepal_length", "sepal_width",
                                                      "petal_length", "petal_width"};
  std::vector<std::array<double, 4>> rows;
  std::vector<std::string> classes;
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (first_content) {
      first_content = false;
      if (fields.size() == 5 && !parse_double(fields[0])) continue;  // header
    }
    if (fields.size() != 5)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected 5 columns, got " +
                       std::to_string(fields.size()));
    std::array<double, 4> r{};
    for (std::size_t k = 0; k < 4; ++k) {
      const auto v = parse_double(fields[k]);
      if (!v)
        throw ParseError(origin + ":" + std::to_string(lineno) + ": non-numeric value '" +
                         fields[k] + "' in column " + kColumns[k]);
      r[k] = *v;
    }
    if (fields[4].empty())
      throw ParseError(origin + ":" + std::to_string(lineno) + ": empty class field");
    rows.push_back(r);
    classes.push_back(fields[4]);
  }
  if (rows.size() < 2) throw ParseError(origin + ": fewer than 2 data rows");

  std::map<std::string, int> class_index;  // sorted => alphabetical ids
  for (const auto& c : classes) class_index.emplace(c, 0);
  int next = 0;
  for (auto& [name, id] : class_index) id = next++;

  Dataset ds;
  ds.name = "iris";
  ds.X = Matrix(rows.size(), 4);
  ds.labels.resize(rows.size());
  ds.num_classes = static_cast<int>(class_index.size());
  ds.feature_names.assign(kColumns.begin(), kColumns.end());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < 4; ++k) ds.X(i, k) = rows[i][k];
    ds.labels[i] = class_index.at(classes[i]);
  }
  return ds;
}

}  // namespace detail

/// Keeps only the named feature columns, in the given order.
inline Dataset select_features(const Dataset& ds, const std::vector<std::string>& names) {
  std::vector<std::size_t> cols;
  for (const auto& n : names) {
    const auto it = std::find(ds.feature_names.begin(), ds.feature_names.end(), n);
    if (it == ds.feature_names.end())
      throw ArgumentError("unknown feature '" + n + "' in dataset '" + ds.name + "'");
    cols.push_back(static_cast<std::size_t>(it - ds.feature_names.begin()));
  }
  Dataset out = ds;
  out.X = Matrix(ds.size(), cols.size());
  out.feature_names = names;
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t k = 0; k < cols.size(); ++k) out.X(i, k) = ds.X(i, cols[k]);
  return out;
}

/// Loads an Iris CSV (`path`) or the bundled copy (`path == "bundled"`).
/// Values are returned unscaled; see `standardize`.
inline Dataset load_iris(const std::string& path = "bundled",
                         const std::vector<std::string>& features = {}) {
  Dataset ds;
  if (path == "bundled") {
    std::istringstream in(detail::kIrisCsv);
    ds = detail::parse_iris(in, "bundled iris");
  } else {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open iris file '" + path + "'");
    ds = detail::parse_iris(in, path);
  }
  if (!features.empty()) ds = select_features(ds, features);
  return ds;
}

/// Per-feature zero mean / unit variance (population sd). Constant
/// features are centred only.
inline Dataset standardize(const Dataset& ds) {
  Dataset out = ds;
  const std::size_t n = ds.size();
  for (std::size_t k = 0; k < ds.dim(); ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += ds.X(i, k);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (ds.X(i, k) - mean) * (ds.X(i, k) - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      out.X(i, k) = sd > 0.0 ? (ds.X(i, k) - mean) / sd : ds.X(i, k) - mean;
  }
  out.scale = FeatureScale::standardized;
  return out;
}

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError("truncated IDX header in '" + path + "'");
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

}  // namespace detail

/// Reads the first `limit` images of an MNIST IDX pair, scaled to [0,1] and
/// average-pooled by `downsample` (28 must be divisible by it).
inline Dataset load_mnist(const std::string& images_path, const std::string& labels_path,
                          std::size_t limit, std::size_t downsample = 1) {
  if (limit < 1) throw ArgumentError("load_mnist: limit must be >= 1");
  if (downsample < 1) throw ArgumentError("load_mnist: downsample must be >= 1");

  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw IoError("cannot open MNIST images '" + images_path + "'");
  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw IoError("cannot open MNIST labels '" + labels_path + "'");

  if (detail::read_be32(img, images_path) != 0x00000803u)
    throw FormatError("bad magic number in images file '" + images_path + "'");
  const std::uint32_t count = detail::read_be32(img, images_path);
  const std::uint32_t h = detail::read_be32(img, images_path);
  const std::uint32_t w = detail::read_be32(img, images_path);
  if (detail::read_be32(lab, labels_path) != 0x00000801u)
    throw FormatError("bad magic number in labels file '" + labels_path + "'");
  const std::uint32_t label_count = detail::read_be32(lab, labels_path);
  if (count != label_count)
    throw FormatError("image count " + std::to_string(count) + " != label count " +
                      std::to_string(label_count));
  if (h % downsample != 0 || w % downsample != 0)
    throw ArgumentError("load_mnist: downsample must divide the image size");

  std::size_t n = limit;
  if (limit > count) {
    warn("load_mnist: limit " + std::to_string(limit) + " exceeds file count " +
         std::to_string(count) + "; truncating");
    n = count;
  }
  const std::size_t oh = h / downsample, ow = w / downsample;
  const double pool = static_cast<double>(downsample * downsample);

  Dataset ds;
  ds.name = "mnist";
  ds.X = Matrix(n, oh * ow);
  ds.labels.resize(n);
  ds.num_classes = 10;
  ds.scale = FeatureScale::unit_interval;
  for (std::size_t k = 0; k < oh * ow; ++k) ds.feature_names.push_back("px" + std::to_string(k));

  std::vector<unsigned char> buf(static_cast<std::size_t>(h) * w);
  for (std::size_t i = 0; i < n; ++i) {
    if (!img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
      throw FormatError("truncated image data in '" + images_path + "'");
    char l = 0;
    if (!lab.read(&l, 1)) throw FormatError("truncated label data in '" + labels_path + "'");
    const int label = static_cast<unsigned char>(l);
    if (label > 9) throw FormatError("label " + std::to_string(label) + " out of range");
    ds.labels[i] = label;
    for (std::size_t r = 0; r < oh; ++r)
      for (std::size_t c = 0; c < ow; ++c) {
        double s = 0.0;
        for (std::size_t dr = 0; dr < downsample; ++dr)
          for (std::size_t dc = 0; dc < downsample; ++dc)
            s += buf[(r * downsample + dr) * w + c * downsample + dc];
        ds.X(i, r * ow + c) = s / (255.0 * pool);
      }
  }
  return ds;
}

inline Dataset subset(const Dataset& ds, std::span<const std::size_t> indices) {
  Dataset out = ds;
  out.X = Matrix(indices.size(), ds.dim());
  out.labels.resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = ds.point(indices[i]);
    std::copy(src.begin(), src.end(), out.X.row(i).begin());
    out.labels[i] = ds.labels[indices[i]];
  }
  return out;
}

struct Split {
  Dataset train;
  Dataset eval;
};

/// Seeded shuffle, then the first `train_count` points train and the next
/// `eval_count` evaluate.
inline Split shuffle_split(const Dataset& ds, std::size_t train_count, std::size_t eval_count,
                           std::uint64_t seed) {
  if (train_count + eval_count > ds.size())
    throw ArgumentError("shuffle_split: requested " + std::to_string(train_count + eval_count) +
                        " points from a dataset of " + std::to_string(ds.size()));
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const std::span<const std::size_t> all(idx);
  return {subset(ds, all.subspan(0, train_count)), subset(ds, all.subspan(train_count, eval_count))};
}

/// Median of the n(n-1)/2 Euclidean distances between rows of `x`.
inline double median_pairwise_distance(const Matrix& x) {
  const std::size_t n = x.rows();
  if (n < 2) throw ArgumentError("median_pairwise_distance: need at least 2 points");
  std::vector<double> d;
  d.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d.push_back(distance(x.row(i), x.row(j)));
  const std::size_t m = d.size();
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(m / 2);
  std::nth_element(d.begin(), mid, d.end());
  double med = *mid;
  if (m % 2 == 0) med = 0.5 * (med + *std::max_element(d.begin(), mid));
  if (med == 0.0 && *std::max_element(d.begin(), d.end()) == 0.0)
    warn("median_pairwise_distance: all points identical (degenerate dataset)");
  return med;
}

inline double median_pairwise_distance(const Dataset& ds) { return median_pairwise_distance(ds.X); }

/// All unordered pairs of rows with 0 < distance ≤ r.
inline PairSet eligible_pairs(const Matrix& x, double r) {
  if (r < 0.0) throw ArgumentError("eligible_pairs: r must be >= 0");
  PairSet ps;
  ps.radius = r;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = i + 1; j < x.rows(); ++j) {
      const double d = distance(x.row(i), x.row(j));
      if (d > 0.0 && d <= r) {
        ps.pairs.emplace_back(i, j);
        ps.distances.push_back(d);
      }
    }
  return ps;
}

inline PairSet eligible_pairs(const Dataset& ds, double r) { return eligible_pairs(ds.X, r); }

}  // namespace astute
