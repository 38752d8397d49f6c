#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "astute/datasets.hpp"

using namespace astute;

namespace {

std::filesystem::path temp_dir() {
  auto p = std::filesystem::temp_directory_path() / "astute_datasets_test";
  std::filesystem::create_directories(p);
  return p;
}

void put_be32(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {char(v >> 24), char(v >> 16), char(v >> 8), char(v)};
  out.write(b, 4);
}

// Two 4x4 images: image k has every pixel equal to 100·(k+1) except pixel (0,0) = 0.
void write_idx(const std::filesystem::path& img, const std::filesystem::path& lab, std::uint32_t label_count,
               std::uint32_t image_magic = 0x803) {
  std::ofstream i(img, std::ios::binary);
  put_be32(i, image_magic);
  put_be32(i, 2);
  put_be32(i, 4);
  put_be32(i, 4);
  for (int k = 0; k < 2; ++k)
    for (int p = 0; p < 16; ++p) i.put(static_cast<char>(p == 0 ? 0 : 100 * (k + 1)));
  std::ofstream l(lab, std::ios::binary);
  put_be32(l, 0x801);
  put_be32(l, label_count);
  for (std::uint32_t k = 0; k < label_count; ++k) l.put(static_cast<char>(k + 3));
}

}  // namespace

TEST(Xor, LabelsFollowSignRule) {
  const auto ds = gen_xor(500, 0.0, 9);
  ASSERT_EQ(ds.size(), 500u);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const bool opposite = (ds.X(i, 0) < 0) != (ds.X(i, 1) < 0);
    EXPECT_EQ(ds.labels[i], opposite ? 1 : 0);
    EXPECT_LE(std::abs(ds.X(i, 0)), 1.0);
  }
  EXPECT_NO_THROW(validate(ds));
}

TEST(Xor, DeterministicAndValidated) {
  EXPECT_EQ(gen_xor(20, 0.1, 4).X, gen_xor(20, 0.1, 4).X);
  EXPECT_NE(gen_xor(20, 0.1, 4).X, gen_xor(20, 0.1, 5).X);
  EXPECT_THROW(gen_xor(3, 0.0, 0), ArgumentError);
  EXPECT_THROW(gen_xor(10, -1.0, 0), ArgumentError);
}

TEST(Iris, BundledCopyHas150RowsThreeBalancedClasses) {
  const auto ds = load_iris();
  EXPECT_EQ(ds.size(), 150u);
  EXPECT_EQ(ds.dim(), 4u);
  EXPECT_EQ(ds.num_classes, 3);
  int counts[3] = {0, 0, 0};
  for (int l : ds.labels) ++counts[l];
  EXPECT_EQ(counts[0], 50);
  EXPECT_EQ(counts[2], 50);
  EXPECT_DOUBLE_EQ(ds.X(0, 0), 5.1);
  EXPECT_EQ(ds.labels[0], 0);  // Iris-setosa sorts first
}

TEST(Iris, FeatureSelection) {
  const auto ds = load_iris("bundled", {"sepal_length", "sepal_width"});
  EXPECT_EQ(ds.dim(), 2u);
  EXPECT_DOUBLE_EQ(ds.X(0, 1), 3.5);
  EXPECT_THROW(load_iris("bundled", {"petal_area"}), ArgumentError);
}

TEST(Iris, HeaderOptionalAndParseErrorsCarryLineNumbers) {
  std::istringstream no_header("1,2,3,4,b\n5,6,7,8,a\n");
  const auto ds = detail::parse_iris(no_header, "mem");
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.labels[0], 1);

  std::istringstream bad("sepal_length,sepal_width,petal_length,petal_width,class\n1,2,3,4,a\n1,x,3,4,a\n");
  try {
    detail::parse_iris(bad, "mem");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("mem:3"), std::string::npos) << e.what();
  }
  std::istringstream short_row("1,2,3,4,a\n1,2,3\n");
  EXPECT_THROW(detail::parse_iris(short_row, "mem"), ParseError);
  EXPECT_THROW(load_iris("/nonexistent/iris.csv"), IoError);
}

TEST(Standardize, ZeroMeanUnitVariance) {
  const auto ds = standardize(load_iris());
  for (std::size_t k = 0; k < 4; ++k) {
    double m = 0, v = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) m += ds.X(i, k);
    m /= 150;
    for (std::size_t i = 0; i < ds.size(); ++i) v += (ds.X(i, k) - m) * (ds.X(i, k) - m);
    EXPECT_NEAR(m, 0.0, 1e-12);
    EXPECT_NEAR(v / 150, 1.0, 1e-12);
  }
  EXPECT_EQ(ds.scale, FeatureScale::standardized);
}

TEST(Mnist, ParsesScalesAndPools) {
  const auto dir = temp_dir();
  write_idx(dir / "img", dir / "lab", 2);
  const auto full = load_mnist((dir / "img").string(), (dir / "lab").string(), 2);
  EXPECT_EQ(full.dim(), 16u);
  EXPECT_EQ(full.labels[1], 4);
  EXPECT_DOUBLE_EQ(full.X(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(full.X(1, 5), 200.0 / 255.0);
  const auto pooled = load_mnist((dir / "img").string(), (dir / "lab").string(), 2, 2);
  EXPECT_EQ(pooled.dim(), 4u);
  EXPECT_DOUBLE_EQ(pooled.X(0, 0), 3 * 100.0 / (255.0 * 4));
  EXPECT_DOUBLE_EQ(pooled.X(0, 3), 100.0 / 255.0);
}

TEST(Mnist, FormatErrors) {
  const auto dir = temp_dir();
  write_idx(dir / "img_bad", dir / "lab_bad", 2, 0x999);
  EXPECT_THROW(load_mnist((dir / "img_bad").string(), (dir / "lab_bad").string(), 1), FormatError);
  write_idx(dir / "img_mis", dir / "lab_mis", 3);
  EXPECT_THROW(load_mnist((dir / "img_mis").string(), (dir / "lab_mis").string(), 1), FormatError);
  EXPECT_THROW(load_mnist((dir / "none").string(), (dir / "none").string(), 1), IoError);
}

TEST(Mnist, LimitBeyondCountWarnsAndTruncates) {
  const auto dir = temp_dir();
  write_idx(dir / "img_l", dir / "lab_l", 2);
  std::vector<std::string> warnings;
  auto saved = warning_sink();
  warning_sink() = [&](std::string_view m) { warnings.emplace_back(m); };
  const auto ds = load_mnist((dir / "img_l").string(), (dir / "lab_l").string(), 10);
  warning_sink() = saved;
  EXPECT_EQ(ds.size(), 2u);
  ASSERT_EQ(warnings.size(), 1u);
}

TEST(Mnist, BundledSubsetLoads) {
  const std::filesystem::path dir = ASTUTE_DEFAULT_DATA_DIR "/mnist";
  const auto tr = load_mnist((dir / "train-images-idx3-ubyte").string(), (dir / "train-labels-idx1-ubyte").string(),
                             1000, 2);
  EXPECT_EQ(tr.size(), 1000u);
  EXPECT_EQ(tr.dim(), 196u);
  std::vector<int> counts(10, 0);
  for (int l : tr.labels) ++counts[l];
  for (int c : counts) EXPECT_EQ(c, 100);
}

TEST(PairwiseMedian, OddAndEvenCounts) {
  Matrix three(3, 1, Vector{0, 1, 3});  // distances 1, 2, 3
  EXPECT_DOUBLE_EQ(median_pairwise_distance(three), 2.0);
  Matrix four(4, 1, Vector{0, 1, 3, 7});  // 1,2,3,4,6,7
  EXPECT_DOUBLE_EQ(median_pairwise_distance(four), 3.5);
  EXPECT_THROW(median_pairwise_distance(Matrix(1, 2)), ArgumentError);
}

TEST(EligiblePairs, ExcludesDuplicatesAndFarPairs) {
  Matrix x(4, 1, Vector{0, 0, 1, 5});
  const auto ps = eligible_pairs(x, 1.0);
  ASSERT_EQ(ps.size(), 2u);  // (0,2) and (1,2); (0,1) is a duplicate
  EXPECT_EQ(ps.pairs[0], std::make_pair(std::size_t{0}, std::size_t{2}));
  EXPECT_TRUE(eligible_pairs(x, 0.5).empty());
  EXPECT_THROW(eligible_pairs(x, -1.0), ArgumentError);
}

TEST(ShuffleSplit, DisjointAndDeterministic) {
  const auto ds = load_iris();
  const auto a = shuffle_split(ds, 100, 50, 7), b = shuffle_split(ds, 100, 50, 7);
  EXPECT_EQ(a.train.X, b.train.X);
  EXPECT_EQ(a.train.size(), 100u);
  EXPECT_EQ(a.eval.size(), 50u);
  EXPECT_THROW(shuffle_split(ds, 100, 51, 7), ArgumentError);
}
