#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "relvec/pooling.hpp"
#include "test_support.hpp"

using namespace relvec;

namespace {

double scalar_pool(PoolingStrategy s, double a, double b) {
  switch (s) {
    case PoolingStrategy::subtract: return a - b;
    case PoolingStrategy::abs_subtract: return a > b ? a - b : b - a;
    case PoolingStrategy::add: return a + b;
    case PoolingStrategy::min: return a < b ? a : b;
    case PoolingStrategy::max: return a < b ? b : a;
    case PoolingStrategy::mean: return (a + b) / 2;
  }
  return 0;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g(0.0, 2.0);
  std::vector<double> v(d);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST(Pooling, WorkedExample) {
  const std::vector<double> a{1, -2, 3}, b{4, 0, -1};
  EXPECT_EQ(pool(PoolingStrategy::subtract, a, b), (std::vector<double>{-3, -2, 4}));
  EXPECT_EQ(pool(PoolingStrategy::abs_subtract, a, b), (std::vector<double>{3, 2, 4}));
  EXPECT_EQ(pool(PoolingStrategy::add, a, b), (std::vector<double>{5, -2, 2}));
  EXPECT_EQ(pool(PoolingStrategy::min, a, b), (std::vector<double>{1, -2, -1}));
  EXPECT_EQ(pool(PoolingStrategy::max, a, b), (std::vector<double>{4, 0, 3}));
  EXPECT_EQ(pool(PoolingStrategy::mean, a, b), (std::vector<double>{2.5, -1, 1}));
}

TEST(Pooling, SmallExamples) {
  const std::vector<double> x{0.5, -1.0}, a{1, 4}, b{3, 2};
  EXPECT_EQ(pool(PoolingStrategy::subtract, x, x), (std::vector<double>{0, 0}));
  EXPECT_EQ(pool(PoolingStrategy::min, a, b), (std::vector<double>{1, 2}));
  EXPECT_EQ(pool(PoolingStrategy::max, a, b), (std::vector<double>{3, 4}));
  EXPECT_EQ(pool(PoolingStrategy::mean, a, b), (std::vector<double>{2, 3}));
}

TEST(Pooling, MatchesScalarDefinition) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_vector(rng, 100), b = random_vector(rng, 100);
    for (auto s : kAllStrategies) {
      const auto got = pool(s, a, b);
      ASSERT_EQ(got.size(), a.size());
      for (std::size_t i = 0; i < a.size(); ++i) ASSERT_DOUBLE_EQ(got[i], scalar_pool(s, a[i], b[i]));
    }
  }
}

TEST(Pooling, SubtractUsesFirstWordMinusSecond) {
  WordVector japan{"japan", {1.0, 5.0}}, yen{"yen", {0.5, 2.0}};
  EXPECT_EQ(pool(PoolingStrategy::subtract, japan, yen), (std::vector<double>{0.5, 3.0}));
}

TEST(Pooling, DimensionMismatchIsError) {
  const std::vector<double> a{1, 2}, b{1, 2, 3};
  EXPECT_THROW(pool(PoolingStrategy::add, a, b), Error);
}

TEST(Pooling, Properties) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = 1 + rng() % 64;
    const auto a = random_vector(rng, d), b = random_vector(rng, d);
    const auto sab = pool(PoolingStrategy::subtract, a, b), sba = pool(PoolingStrategy::subtract, b, a);
    for (std::size_t i = 0; i < d; ++i) ASSERT_EQ(sab[i], -sba[i]);
    for (auto s : {PoolingStrategy::abs_subtract, PoolingStrategy::add, PoolingStrategy::min, PoolingStrategy::max,
                   PoolingStrategy::mean})
      ASSERT_EQ(pool(s, a, b), pool(s, b, a)) << strategy_name(s);
    const auto lo = pool(PoolingStrategy::min, a, b), hi = pool(PoolingStrategy::max, a, b);
    const auto mid = pool(PoolingStrategy::mean, a, b), sum = pool(PoolingStrategy::add, a, b);
    const auto ab = pool(PoolingStrategy::abs_subtract, a, b);
    for (std::size_t i = 0; i < d; ++i) {
      ASSERT_LE(lo[i], mid[i]);
      ASSERT_LE(mid[i], hi[i]);
      ASSERT_NEAR(sum[i], 2 * mid[i], 1e-12 * (1 + std::abs(sum[i])));
      ASSERT_GE(ab[i], 0.0);
      ASSERT_NEAR(ab[i], hi[i] - lo[i], 1e-12 * (1 + std::abs(ab[i])));
    }
  }
}

TEST(Pooling, StrategyNamesRoundTrip) {
  for (auto s : kAllStrategies) {
    EXPECT_EQ(parse_strategy(strategy_name(s)), s);
    EXPECT_EQ(parse_strategy(strategy_column(s)), s);
  }
  EXPECT_EQ(strategy_column(kAllStrategies[0]), "X_subs");
  EXPECT_EQ(strategy_column(kAllStrategies[5]), "X_mean");
  EXPECT_THROW(parse_strategy("product"), Error);
}

TEST(Pooling, DatasetRowsAlignWithPairs) {
  std::vector<ResolvedPair> rp{
      {{"japan", "yen", "currency"}, {"japan", {1, 2}}, {"yen", {0, 1}}},
      {{"paris", "france", "capital"}, {"paris", {3, 3}}, {"france", {1, 4}}},
      {{"korea", "won", "currency"}, {"korea", {2, 2}}, {"won", {2, 0}}},
  };
  const auto ds = pool_dataset(PoolingStrategy::subtract, rp);
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.labels, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(ds.categories, (std::vector<std::string>{"currency", "capital"}));
  EXPECT_EQ(ds.vectors(1, 0), 2.0);
  EXPECT_EQ(ds.vectors(1, 1), -1.0);
  EXPECT_EQ(ds.sources[2].word_b, "won");
}

TEST(Pooling, RelationCsvRoundTrip) {
  std::mt19937_64 rng(3);
  std::vector<ResolvedPair> rp;
  for (int i = 0; i < 12; ++i)
    rp.push_back({{"a" + std::to_string(i), "b" + std::to_string(i), i % 3 ? "x" : "y"},
                  {"a", random_vector(rng, 5)},
                  {"b", random_vector(rng, 5)}});
  for (auto s : kAllStrategies) {
    const auto ds = pool_dataset(s, rp);
    std::ostringstream out;
    write_relation_csv(ds, out);
    std::istringstream in(out.str());
    const auto back = read_relation_csv(in, "mem");
    EXPECT_EQ(back.vectors, ds.vectors);
    EXPECT_EQ(back.labels, ds.labels);
    EXPECT_EQ(back.categories, ds.categories);
    EXPECT_EQ(back.sources, ds.sources);
  }
}
