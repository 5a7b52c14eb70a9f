#include <fstream>
#include <limits>
#include <set>

#include <gtest/gtest.h>

#include "rscc/illuminants.hpp"
#include "test_support.hpp"

using namespace rscc;

namespace {

IlluminantSet bundled() { return load_illuminants(test::kDataDir / "illuminants" / "manifest.txt"); }

Illuminant flat(const std::string& name, double level) {
  return {name, Spectrum(SpectralAxis{}, Eigen::VectorXd::Constant(31, level))};
}

double wcss_of(const std::vector<Eigen::VectorXd>& pts, const std::vector<int>& assign, int k) {
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(pts[0].size());
    int n = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (assign[i] == c) {
        mean += pts[i];
        ++n;
      }
    }
    if (n == 0) continue;
    mean /= n;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (assign[i] == c) total += (pts[i] - mean).squaredNorm();
  }
  return total;
}

// Global optimum over every 2-partition with both parts non-empty.
double best_two_partition(const std::vector<Eigen::VectorXd>& pts) {
  const std::size_t n = pts.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask + 1 < (1ULL << n); ++mask) {
    std::vector<int> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = (mask >> i) & 1;
    best = std::min(best, wcss_of(pts, a, 2));
  }
  return best;
}

}  // namespace

TEST(IlluminantSet, BundledManifestHas28Members) {
  auto set = bundled();
  EXPECT_EQ(set.size(), 28u);
  EXPECT_EQ(set.role(), IlluminantRole::full);
  EXPECT_GE(set.find("D65"), 0);
  EXPECT_GE(set.find("LED-V2"), 0);
  EXPECT_EQ(set.find("nope"), -1);
  EXPECT_THROW(set.at("nope"), std::invalid_argument);
  std::set<std::string> unique;
  for (const auto& n : set.names()) unique.insert(n);
  EXPECT_EQ(unique.size(), 28u);
}

TEST(IlluminantSet, Validation) {
  EXPECT_THROW(IlluminantSet({flat("a", 1), flat("a", 2)}, IlluminantRole::full), std::invalid_argument);
  EXPECT_THROW(IlluminantSet({flat("z", 0)}, IlluminantRole::full), std::invalid_argument);
  EXPECT_THROW(IlluminantSet({flat("n", -1)}, IlluminantRole::full), std::invalid_argument);
  Illuminant other{"o", Spectrum(SpectralAxis(400, 5, 61), Eigen::VectorXd::Ones(61))};
  EXPECT_THROW(IlluminantSet({flat("a", 1), other}, IlluminantRole::full), std::invalid_argument);
}

TEST(IlluminantSet, SubsetKeepsRequestedOrder) {
  auto set = bundled();
  auto sub = set.subset({"F2", "A"}, IlluminantRole::projection);
  ASSERT_EQ(sub.size(), 2u);
  EXPECT_EQ(sub[0].name, "F2");
  EXPECT_EQ(sub[1].name, "A");
  EXPECT_EQ(sub.role(), IlluminantRole::projection);
  EXPECT_THROW(set.subset({"F2", "missing"}, IlluminantRole::projection), std::invalid_argument);
}

TEST(IlluminantManifest, ErrorsAndNameLists) {
  test::ScratchDir dir;
  {
    std::ofstream os(dir / "m.txt");
    os << "only_one_field\n";
  }
  EXPECT_THROW(load_illuminants(dir / "m.txt"), std::runtime_error);
  {
    std::ofstream os(dir / "empty.txt");
    os << "# nothing\n";
  }
  EXPECT_THROW(load_illuminants(dir / "empty.txt"), std::runtime_error);
  write_name_list(dir / "names.txt", {"A", "D65", "F11"});
  EXPECT_EQ(read_name_list(dir / "names.txt"), (std::vector<std::string>{"A", "D65", "F11"}));
}

TEST(ChromaticityMatrix, RowsSumToOne) {
  auto x = chromaticity_matrix(bundled());
  EXPECT_EQ(x.rows(), 28);
  for (Eigen::Index i = 0; i < x.rows(); ++i) EXPECT_NEAR(x.row(i).sum(), 1.0, 1e-12);
}

TEST(KMeans, MatchesExhaustiveTwoPartitionOracle) {
  Rng rng(11);
  for (int t = 0; t < 30; ++t) {
    // two blobs of 4-6 points each; small enough to enumerate all partitions
    std::vector<Eigen::VectorXd> pts;
    const int na = 4 + static_cast<int>(rng.below(3));
    const int nb = 4 + static_cast<int>(rng.below(3));
    Eigen::VectorXd ca = test::random_vector(rng, 3, -5, 5);
    Eigen::VectorXd cb = ca + Eigen::VectorXd::Constant(3, 4.0);
    for (int i = 0; i < na; ++i) pts.push_back(ca + test::random_vector(rng, 3, -0.5, 0.5));
    for (int i = 0; i < nb; ++i) pts.push_back(cb + test::random_vector(rng, 3, -0.5, 0.5));
    const auto res = kmeans(pts, 2, static_cast<std::uint64_t>(t));
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.wcss(), best_two_partition(pts), 1e-9);
    EXPECT_NEAR(res.wcss(), wcss_of(pts, res.assignments, 2), 1e-9);
  }
}

TEST(KMeans, WcssNonIncreasingAndFixedPoint) {
  Rng rng(2);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 200; ++i) pts.push_back(test::random_vector(rng, 4));
  const auto res = kmeans(pts, 7, 99);
  ASSERT_TRUE(res.converged);
  for (std::size_t i = 1; i < res.wcss_history.size(); ++i) {
    EXPECT_LE(res.wcss_history[i], res.wcss_history[i - 1] + 1e-12);
  }
  // converged: every point sits with its nearest centroid (lowest index on ties)
  for (std::size_t i = 0; i < pts.size(); ++i) {
    int best = 0;
    for (int c = 1; c < 7; ++c) {
      if ((pts[i] - res.centroids[c]).squaredNorm() < (pts[i] - res.centroids[best]).squaredNorm()) best = c;
    }
    EXPECT_EQ(res.assignments[i], best);
  }
}

TEST(KMeans, DeterministicPerSeed) {
  Rng rng(8);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(test::random_vector(rng, 2));
  const auto a = kmeans(pts, 5, 3);
  const auto b = kmeans(pts, 5, 3);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.wcss_history, b.wcss_history);
}

TEST(KMeans, DuplicatePointsAndEdgeCases) {
  std::vector<Eigen::VectorXd> same(5, Eigen::VectorXd::Ones(2));
  const auto res = kmeans(same, 3, 0);
  EXPECT_EQ(res.wcss(), 0.0);
  EXPECT_THROW(kmeans(same, 6, 0), std::invalid_argument);
  EXPECT_THROW(kmeans(same, 0, 0), std::invalid_argument);
  EXPECT_THROW(kmeans({}, 1, 0), std::invalid_argument);
  const auto one = kmeans(same, 5, 0);
  EXPECT_EQ(one.centroids.size(), 5u);
}

TEST(ProjectionSet, TenDistinctRepresentatives) {
  auto full = bundled();
  auto sel = select_projection_set(full, 10, 0);
  EXPECT_EQ(sel.size(), 10u);
  EXPECT_EQ(sel.role(), IlluminantRole::projection);
  std::set<std::string> names;
  for (const auto& n : sel.names()) {
    names.insert(n);
    EXPECT_GE(full.find(n), 0);
  }
  EXPECT_EQ(names.size(), 10u);
  EXPECT_EQ(select_projection_set(full, 10, 0).names(), sel.names());
}

TEST(ProjectionSet, KEqualsNReturnsEveryMember) {
  auto full = bundled();
  auto sel = select_projection_set(full, 28, 5);
  const auto listed = sel.names();
  std::set<std::string> names(listed.begin(), listed.end());
  EXPECT_EQ(names.size(), 28u);
}
