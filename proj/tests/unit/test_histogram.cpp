#include <map>

#include <gtest/gtest.h>

#include "rscc/histogram.hpp"
#include "test_support.hpp"

using namespace rscc;

namespace {

// Per-dimension bin by linear search over bin edges, combined row-major.
std::uint64_t brute_bin(const Eigen::VectorXd& z, const BinSpec& s) {
  std::uint64_t flat = 0;
  for (int j = 0; j < s.dims; ++j) {
    const double w = (s.hi[j] - s.lo[j]) / s.bins;
    int idx = 0;
    for (int b = 0; b < s.bins; ++b) {
      if (z[j] >= s.lo[j] + b * w) idx = b;
    }
    flat = flat * s.bins + idx;
  }
  return flat;
}

}  // namespace

TEST(BinSpec, CellCountAndValidation) {
  BinSpec s(30, {0, 0, 0}, {1, 1, 1});
  EXPECT_EQ(s.cell_count(), 27000u);
  EXPECT_THROW(BinSpec(0, {0}, {1}), std::invalid_argument);
  EXPECT_THROW(BinSpec(3, {1}, {1}), std::invalid_argument);
  EXPECT_THROW(BinSpec(3, {0, 0}, {1}), std::invalid_argument);
  EXPECT_THROW(BinSpec(1000, std::vector<double>(8, 0.0), std::vector<double>(8, 1.0)), std::invalid_argument);
}

TEST(Bounds, WidenedByTenthOfAPercent) {
  auto [lo, hi] = calibrate_bounds({Eigen::Vector2d(0, 5), Eigen::Vector2d(10, 5)});
  EXPECT_DOUBLE_EQ(lo[0], -0.01);
  EXPECT_DOUBLE_EQ(hi[0], 10.01);
  EXPECT_DOUBLE_EQ(lo[1], 5 - 5e-7);  // constant dimension
  EXPECT_DOUBLE_EQ(hi[1], 5 + 5e-7);
  EXPECT_THROW(calibrate_bounds({}), std::invalid_argument);
}

TEST(Bounds, MergeEqualsSinglePass) {
  Rng rng(3);
  BoundsAccumulator all(3), a(3), b(3);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd z = test::random_vector(rng, 3, -4, 4);
    all.add(z);
    (i % 2 ? a : b).add(z);
  }
  a.merge(b);
  EXPECT_EQ(a.bounds(), all.bounds());
  EXPECT_EQ(a.samples(), 100u);
}

TEST(BinIndex, MatchesLinearSearchOracle) {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const int dims = 1 + static_cast<int>(rng.below(4));
    const int bins = 1 + static_cast<int>(rng.below(30));
    std::vector<double> lo(dims), hi(dims);
    for (int j = 0; j < dims; ++j) {
      lo[j] = rng.uniform(-2, 0);
      hi[j] = lo[j] + rng.uniform(0.1, 3);
    }
    BinSpec s(bins, lo, hi);
    for (int i = 0; i < 500; ++i) {
      Eigen::VectorXd z(dims);
      for (int j = 0; j < dims; ++j) z[j] = rng.uniform(lo[j], hi[j]);
      EXPECT_EQ(bin_index(z, s), brute_bin(z, s));
    }
  }
}

TEST(BinIndex, ClampsOutOfRangeAndRowMajor) {
  BinSpec s(4, {0, 0}, {1, 1});
  EXPECT_EQ(bin_index(Eigen::Vector2d(-5, -5), s), 0u);
  EXPECT_EQ(bin_index(Eigen::Vector2d(5, 5), s), 15u);
  EXPECT_EQ(bin_index(Eigen::Vector2d(1.0, 0.0), s), 12u);  // upper edge -> last bin
  EXPECT_EQ(bin_index(Eigen::Vector2d(0.3, 0.6), s), 1u * 4 + 2);
  EXPECT_THROW(bin_index(Eigen::Vector3d(0, 0, 0), s), std::invalid_argument);
}

TEST(HistogramGrid, DenseAndSparseAgreeWithBruteForce) {
  Rng rng(5);
  BinSpec s(7, {0, 0, 0}, {1, 1, 1});
  HistogramGrid dense(s), sparse(s, 0);
  ASSERT_TRUE(dense.is_dense());
  ASSERT_FALSE(sparse.is_dense());
  std::map<std::uint64_t, std::uint64_t> ref;
  for (int i = 0; i < 2000; ++i) {
    Eigen::VectorXd z = test::random_vector(rng, 3, 0, 1);
    z[0] = z[0] * z[0];  // skew the distribution
    dense.add(z);
    sparse.add(z);
    ++ref[brute_bin(z, s)];
  }
  const std::vector<std::pair<std::uint64_t, std::uint64_t>> expected(ref.begin(), ref.end());
  EXPECT_EQ(dense.occupied(), expected);
  EXPECT_EQ(sparse.occupied(), expected);
  EXPECT_EQ(dense.total(), 2000u);
  for (auto [cell, n] : expected) EXPECT_EQ(sparse.count(cell), n);
  EXPECT_EQ(sparse.count(s.cell_count() - 1), ref.count(s.cell_count() - 1) ? ref[s.cell_count() - 1] : 0u);
}

TEST(HistogramGrid, MergeAddsCounts) {
  BinSpec s(3, {0}, {1});
  HistogramGrid a(s), b(s, 0);
  a.add_index(0, 2);
  b.add_index(0, 1);
  b.add_index(2, 5);
  a.merge(b);
  EXPECT_EQ(a.count(0), 3u);
  EXPECT_EQ(a.count(2), 5u);
  EXPECT_EQ(a.total(), 8u);
  HistogramGrid other(BinSpec(4, {0}, {1}));
  EXPECT_THROW(a.merge(other), std::invalid_argument);
  EXPECT_THROW(a.add_index(3), std::out_of_range);
}

TEST(HistogramGrid, LargeGridsAreSparse) {
  BinSpec s(30, std::vector<double>(5, 0.0), std::vector<double>(5, 1.0));
  HistogramGrid g(s);
  EXPECT_FALSE(g.is_dense());
  g.add(Eigen::VectorXd::Constant(5, 0.99));
  EXPECT_EQ(g.occupied().size(), 1u);
  EXPECT_EQ(g.occupied()[0].first, s.cell_count() - 1);
}
