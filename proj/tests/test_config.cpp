#include <gtest/gtest.h>

#include <sstream>

#include "relvec/config.hpp"

using namespace relvec;

namespace {

ExperimentConfig from_text(const std::string& text, ExperimentConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, "mem", std::move(base));
}

}  // namespace

TEST(Config, DefaultGrids) {
  const auto a = default_agglomerative_grid();
  ASSERT_EQ(a.size(), 16u);
  EXPECT_EQ(agglomerative_label(a[0]), "(ward, euclidean)");
  EXPECT_EQ(agglomerative_label(a[1]), "(single, euclidean)");
  EXPECT_EQ(agglomerative_label(a[5]), "(complete, cosine)");
  EXPECT_EQ(agglomerative_label(a[15]), "(average, l2)");
  const auto d = default_dbscan_grid();
  ASSERT_EQ(d.size(), 5u);
  EXPECT_EQ(dbscan_label(d[0]), "(euclidean, 0.50)");
  EXPECT_EQ(dbscan_label(d[2]), "(cosine, 0.30)");
  EXPECT_EQ(dbscan_label(d[4]), "(manhattan, 0.50)");
}

TEST(Config, ParsesAllSections) {
  const auto c = from_text(R"(# comment
embeddings = "/data/glove.txt"
corpus = /data/q.txt   # trailing comment
seed = 42
workers = 3
models = ["kmeans", "dbscan"]
strategies = [subtract, mean]

[kmeans]
k = 5
restarts = 2
tol = 1e-4

[gmm]
covariance = "diagonal"
reg_covar = 1e-5

[agglomerative]
configs = ["ward:euclidean", "complete:cosine"]

[dbscan]
min_points = 3
exclude_noise = true
configs = ["cosine:0.3"]
)");
  EXPECT_EQ(c.embeddings_path, "/data/glove.txt");
  EXPECT_EQ(c.corpus_path, "/data/q.txt");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.workers, 3);
  EXPECT_EQ(c.models, (std::vector<Model>{Model::kmeans, Model::dbscan}));
  EXPECT_EQ(c.strategies, (std::vector<PoolingStrategy>{PoolingStrategy::subtract, PoolingStrategy::mean}));
  EXPECT_EQ(c.kmeans_k, 5);
  EXPECT_EQ(c.kmeans_restarts, 2);
  EXPECT_DOUBLE_EQ(c.kmeans_tol, 1e-4);
  EXPECT_EQ(c.gmm_covariance, CovarianceType::diagonal);
  EXPECT_DOUBLE_EQ(c.gmm_reg_covar, 1e-5);
  ASSERT_EQ(c.agglomerative.size(), 2u);
  EXPECT_EQ(c.agglomerative[1].linkage, Linkage::complete);
  EXPECT_EQ(c.agglomerative[1].metric, DistanceMetric::cosine);
  EXPECT_EQ(c.dbscan_min_points, 3);
  EXPECT_TRUE(c.dbscan_exclude_noise);
  ASSERT_EQ(c.dbscan.size(), 1u);
  EXPECT_EQ(dbscan_label(c.dbscan[0]), "(cosine, 0.30)");
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, TextRoundTrip) {
  ExperimentConfig c;
  c.embeddings_path = "e.txt";
  c.corpus_path = "c.txt";
  c.output_dir = "out dir";
  c.expected_dim = 100;
  c.seed = 123456789;
  c.kmeans_tol = 1.5e-7;
  c.gmm_k = 3;
  c.gmm_covariance = CovarianceType::diagonal;
  c.dbscan = {{DistanceMetric::cosine, 0.275}, {DistanceMetric::l1, 2.0}};
  c.models = {Model::gmm, Model::agglomerative};
  const auto back = from_text(to_config_text(c));
  EXPECT_EQ(to_config_text(back), to_config_text(c));
  EXPECT_EQ(back.expected_dim, c.expected_dim);
  EXPECT_EQ(back.kmeans_tol, c.kmeans_tol);
  EXPECT_EQ(back.dbscan[0].eps, 0.275);
  EXPECT_EQ(back.models, c.models);
}

TEST(Config, Errors) {
  EXPECT_THROW(from_text("colour = blue\n"), Error);
  EXPECT_THROW(from_text("[kmeans]\nrestart = 3\n"), Error);
  EXPECT_THROW(from_text("seed = 1\nseed = 2\n"), ParseError);
  EXPECT_THROW(from_text("seed = twelve\n"), Error);
  EXPECT_THROW(from_text("just words\n"), ParseError);
  EXPECT_THROW(from_text("embeddings = \"open\n"), ParseError);
  EXPECT_THROW(from_text("[gmm]\ncovariance = spherical\n"), Error);
  EXPECT_THROW(from_text("[dbscan]\nconfigs = [\"cosine\"]\n"), Error);
}

TEST(Config, ValidationRejectsBadGrids) {
  ExperimentConfig c;
  c.embeddings_path = "e";
  c.corpus_path = "c";
  EXPECT_NO_THROW(c.validate());
  auto bad = c;
  bad.agglomerative = {{Linkage::ward, DistanceMetric::cosine}};
  EXPECT_THROW(bad.validate(), Error);
  bad = c;
  bad.dbscan = {{DistanceMetric::cosine, 0.0}};
  EXPECT_THROW(bad.validate(), Error);
  bad = c;
  bad.strategies = {PoolingStrategy::add, PoolingStrategy::add};
  EXPECT_THROW(bad.validate(), Error);
  bad = c;
  bad.embeddings_path.clear();
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Config, LaterLayerOverridesEarlier) {
  // File settings layered over defaults, then command-line style overrides on top.
  auto c = from_text("seed = 5\nworkers = 2\n[kmeans]\nrestarts = 4\n");
  c = from_text("seed = 9\n", c);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.workers, 2);
  EXPECT_EQ(c.kmeans_restarts, 4);
}

TEST(Config, ManifestSectionIsIgnored) {
  const auto c = from_text("seed = 3\n[manifest]\nanything = goes\ncell = \"x | y\"\n");
  EXPECT_EQ(c.seed, 3u);
}
