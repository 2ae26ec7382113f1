#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "relvec/ari.hpp"
#include "relvec/kmeans.hpp"
#include "test_support.hpp"

using namespace relvec;

namespace {

// Minimum within-cluster sum of squares over every 2-partition (exhaustive).
double best_two_partition(const Matrix& x) {
  const std::size_t n = x.rows();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask + 1 < (1ull << n); ++mask) {
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1 ? a : b).push_back(i);
    best = std::min(best, relvec::testing::sum_squares_about_mean(x, a) + relvec::testing::sum_squares_about_mean(x, b));
  }
  return best;
}

}  // namespace

TEST(KMeans, SeparatedGroupsReachExhaustiveOptimum) {
  std::mt19937_64 rng(21);
  auto blobs = relvec::testing::make_blobs(rng, {{0, 0}, {10, 10}}, 6, 0.3);
  KMeansConfig cfg;
  cfg.k = 2;
  cfg.seed = 4;
  const auto r = kmeans_fit(cfg, blobs.x);
  EXPECT_DOUBLE_EQ(adjusted_rand_index(r.assignments, blobs.truth), 1.0);
  EXPECT_NEAR(r.diagnostics.values.at("inertia"), best_two_partition(blobs.x), 1e-9);
}

TEST(KMeans, SingleClusterInertiaIsTotalScatter) {
  std::mt19937_64 rng(2);
  const auto x = relvec::testing::normal_matrix(rng, 30, 4);
  KMeansConfig cfg;
  cfg.k = 1;
  const auto r = kmeans_fit(cfg, x);
  EXPECT_TRUE(std::all_of(r.assignments.begin(), r.assignments.end(), [](int l) { return l == 0; }));
  std::vector<std::size_t> all(30);
  for (std::size_t i = 0; i < 30; ++i) all[i] = i;
  EXPECT_NEAR(r.diagnostics.values.at("inertia"), relvec::testing::sum_squares_about_mean(x, all), 1e-9);
}

TEST(KMeans, IdenticalRowsShareACluster) {
  Matrix x(6, 2);
  for (std::size_t i = 3; i < 6; ++i) x(i, 0) = 5.0;
  KMeansConfig cfg;
  cfg.k = 2;
  const auto r = kmeans_fit(cfg, x);
  EXPECT_EQ(r.assignments[0], r.assignments[1]);
  EXPECT_EQ(r.assignments[0], r.assignments[2]);
  EXPECT_EQ(r.assignments[3], r.assignments[5]);
  EXPECT_NE(r.assignments[0], r.assignments[3]);
  EXPECT_EQ(r.diagnostics.values.at("inertia"), 0.0);
}

TEST(KMeans, InvalidKIsError) {
  Matrix x(3, 2);
  KMeansConfig cfg;
  cfg.k = 4;
  EXPECT_THROW(kmeans_fit(cfg, x), Error);
  cfg.k = 0;
  EXPECT_THROW(kmeans_fit(cfg, x), Error);
}

TEST(KMeans, ConvergedRunIsAFixedPoint) {
  std::mt19937_64 rng(8);
  const auto x = relvec::testing::normal_matrix(rng, 80, 5);
  const auto run = kmeans_single(x, 4, 300, 1e-6, 17);
  ASSERT_TRUE(run.converged);
  // Reassigning to the final centroids changes no label; recomputed means match the centroids.
  std::vector<int> labels(x.rows());
  detail::assign_nearest(x, run.centroids, labels);
  EXPECT_EQ(labels, run.labels);
  for (int c = 0; c < 4; ++c) {
    std::vector<double> mean(5, 0.0);
    int count = 0;
    for (std::size_t i = 0; i < x.rows(); ++i)
      if (run.labels[i] == c) {
        ++count;
        for (std::size_t j = 0; j < 5; ++j) mean[j] += x(i, j);
      }
    ASSERT_GT(count, 0);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(mean[j] / count, run.centroids(c, j), 1e-6);
  }
}

TEST(KMeans, InertiaNeverIncreases) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 20; ++t) {
    const auto x = relvec::testing::normal_matrix(rng, 60, 3);
    const auto run = kmeans_single(x, 5, 300, 0.0, rng());
    for (std::size_t i = 1; i < run.inertia_trace.size(); ++i)
      ASSERT_LE(run.inertia_trace[i], run.inertia_trace[i - 1] * (1 + 1e-12));
  }
}

TEST(KMeans, BestRestartIsLowestInertia) {
  std::mt19937_64 rng(31);
  const auto x = relvec::testing::normal_matrix(rng, 50, 3);
  KMeansConfig cfg;
  cfg.k = 6;
  cfg.n_restarts = 8;
  cfg.seed = 100;
  const auto r = kmeans_fit(cfg, x);
  const auto& per = r.diagnostics.traces.at("restart_inertia");
  ASSERT_EQ(per.size(), 8u);
  EXPECT_EQ(r.diagnostics.values.at("inertia"), *std::min_element(per.begin(), per.end()));
  EXPECT_EQ(r.restart_assignments.size(), 8u);
  for (int s = 0; s < 8; ++s) EXPECT_DOUBLE_EQ(kmeans_single(x, 6, 300, 1e-6, 100 + s).inertia(), per[s]);
}

TEST(KMeans, DeterministicAndIndependentOfWorkers) {
  std::mt19937_64 rng(4);
  const auto x = relvec::testing::normal_matrix(rng, 120, 6);
  KMeansConfig cfg;
  cfg.k = 5;
  cfg.seed = 12;
  const auto a = kmeans_fit(cfg, x);
  cfg.workers = 4;
  const auto b = kmeans_fit(cfg, x);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.diagnostics.traces, b.diagnostics.traces);
}

TEST(KMeans, LabelsAreInRange) {
  std::mt19937_64 rng(6);
  const auto x = relvec::testing::normal_matrix(rng, 40, 2);
  KMeansConfig cfg;
  cfg.k = 7;
  const auto r = kmeans_fit(cfg, x);
  for (int l : r.assignments) {
    EXPECT_GE(l, 0);
    EXPECT_LT(l, r.n_clusters);
  }
}
