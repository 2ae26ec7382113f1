#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "relvec/distance.hpp"
#include "test_support.hpp"

using namespace relvec;

TEST(Distance, ThreeFourFive) {
  const std::vector<double> a{0, 0}, b{3, 4};
  EXPECT_DOUBLE_EQ(distance(DistanceMetric::euclidean, a, b), 5.0);
  EXPECT_DOUBLE_EQ(distance(DistanceMetric::l2, a, b), 5.0);
  EXPECT_DOUBLE_EQ(distance(DistanceMetric::manhattan, a, b), 7.0);
  EXPECT_DOUBLE_EQ(squared_euclidean(a, b), 25.0);
}

TEST(Distance, Cosine) {
  const std::vector<double> x{1, 0}, y{0, 2}, z{3, 0}, w{-1, 0};
  EXPECT_NEAR(distance(DistanceMetric::cosine, x, y), 1.0, 1e-15);
  EXPECT_NEAR(distance(DistanceMetric::cosine, x, z), 0.0, 1e-15);
  EXPECT_NEAR(distance(DistanceMetric::cosine, x, w), 2.0, 1e-15);
  EXPECT_GE(distance(DistanceMetric::cosine, z, z), 0.0);
}

TEST(Distance, ManhattanMatchesScalarLoop) {
  std::mt19937_64 rng(1);
  const auto m = relvec::testing::normal_matrix(rng, 2, 30);
  double s = 0;
  for (std::size_t j = 0; j < 30; ++j) s += std::abs(m(0, j) - m(1, j));
  EXPECT_NEAR(distance(DistanceMetric::l1, m.row(0), m.row(1)), s, 1e-12);
  const std::vector<double> a{1, 2, 3}, b{2, 4, 2};
  EXPECT_DOUBLE_EQ(distance(DistanceMetric::manhattan, a, b), 4.0);
}

TEST(Distance, ZeroNormCosineIsErrorNamingRow) {
  Matrix m(3, 2);
  m(0, 0) = 1;
  m(2, 1) = 1;
  try {
    pairwise_distance(DistanceMetric::cosine, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("1"), std::string::npos) << e.what();
  }
  const std::vector<double> zero{0, 0}, one{1, 0};
  EXPECT_THROW(distance(DistanceMetric::cosine, zero, one), Error);
}

TEST(Distance, PairwiseMatrixProperties) {
  std::mt19937_64 rng(9);
  const auto x = relvec::testing::normal_matrix(rng, 25, 7);
  for (auto metric : {DistanceMetric::euclidean, DistanceMetric::manhattan, DistanceMetric::cosine}) {
    const auto d = pairwise_distance(metric, x);
    ASSERT_EQ(d.rows(), 25u);
    for (std::size_t i = 0; i < 25; ++i) {
      EXPECT_EQ(d(i, i), 0.0);
      for (std::size_t j = 0; j < 25; ++j) {
        EXPECT_EQ(d(i, j), d(j, i));
        EXPECT_GE(d(i, j), 0.0);
        if (i != j) {
          EXPECT_NEAR(d(i, j), distance(metric, x.row(i), x.row(j)), 1e-12);
        }
      }
    }
    if (metric == DistanceMetric::cosine) continue;  // not a metric
    for (std::size_t i = 0; i < 25; ++i)
      for (std::size_t j = 0; j < 25; ++j)
        for (std::size_t k = 0; k < 25; ++k) EXPECT_LE(d(i, k), d(i, j) + d(j, k) + 1e-12);
  }
}

TEST(Distance, MetricNames) {
  EXPECT_EQ(parse_metric("cityblock"), DistanceMetric::manhattan);
  EXPECT_EQ(parse_metric("cosine"), DistanceMetric::cosine);
  EXPECT_TRUE(is_euclidean(parse_metric("l2")));
  EXPECT_THROW(parse_metric("hamming"), Error);
}
