// relvec command-line front end: run | pool | cluster | score | project

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relvec/relvec.hpp"

namespace {

using namespace relvec;

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  return f;
}

RelationDataset load_relations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open relation CSV: " + path);
  return read_relation_csv(in, path);
}

std::vector<std::string> read_label_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open label file: " + path);
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) labels.push_back(line);
  }
  return labels;
}

/// `row,category,assigned_label` as written by `cluster`.
void read_assignments(const std::string& path, std::vector<std::string>& truth, std::vector<int>& pred) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open assignments file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line_no == 1) continue;
    const auto a = line.find(',');
    const auto b = line.rfind(',');
    if (a == std::string::npos || a == b) throw ParseError(path, line_no, "expected row,category,assigned_label");
    truth.push_back(line.substr(a + 1, b - a - 1));
    try {
      pred.push_back(std::stoi(line.substr(b + 1)));
    } catch (const std::exception&) {
      throw ParseError(path, line_no, "bad assigned label");
    }
  }
}

void print_grid(const ScoreGrid& g) { write_grid_markdown(g, std::cout); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Word-pair relation vectors: pooling, clustering and Adjusted Rand Index scoring"};
  app.require_subcommand(1);
  app.set_version_flag("--version", RELVEC_VERSION);

  // run
  auto* run = app.add_subcommand("run", "Run the full (clustering configuration x pooling strategy) grid");
  std::string config_path, embeddings, corpus, output;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers, restart_workers;
  bool keep_going = false, export_vectors = false;
  std::vector<std::string> strategies, models;
  run->add_option("-c,--config", config_path, "Config file (TOML-style key = value)");
  run->add_option("--embeddings", embeddings, "GloVe text file (default $RELVEC_DATA_DIR/glove.6B.100d.txt)");
  run->add_option("--corpus", corpus, "Analogy questions file (default $RELVEC_DATA_DIR/questions-words.txt)");
  run->add_option("-o,--output", output, "Output directory");
  run->add_option("--seed", seed, "Seed for every stochastic choice");
  run->add_option("-j,--workers", workers, "Grid cells run concurrently");
  run->add_option("--restart-workers", restart_workers, "Restarts run concurrently inside a k-means/GMM cell");
  run->add_flag("--keep-going", keep_going, "Record failing cells as NaN instead of aborting");
  run->add_flag("--export-vectors", export_vectors, "Also write pooled vectors and 2-d projections");
  run->add_option("--strategies", strategies, "Pooling strategies to run")->delimiter(',');
  run->add_option("--models", models, "Models to run (kmeans,gmm,agglomerative,dbscan)")->delimiter(',');

  // pool
  auto* pool_cmd = app.add_subcommand("pool", "Write relation-vector CSVs for the resolved word pairs");
  std::string pool_embeddings, pool_corpus, pool_output = ".";
  std::vector<std::string> pool_strategies;
  pool_cmd->add_option("--embeddings", pool_embeddings, "GloVe text file");
  pool_cmd->add_option("--corpus", pool_corpus, "Analogy questions file");
  pool_cmd->add_option("-o,--output", pool_output, "Output directory");
  pool_cmd->add_option("--strategies", pool_strategies, "Strategies (default: all six)")->delimiter(',');

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Cluster one relation CSV with one configuration");
  std::string cl_input, cl_method = "kmeans", cl_output, cl_diag, cl_linkage = "ward", cl_metric = "euclidean",
                        cl_covariance = "full";
  int cl_k = 0, cl_restarts = -1, cl_min_points = 5, cl_workers = 1;
  double cl_eps = 0.5, cl_reg = 1e-6;
  std::uint64_t cl_seed = 0;
  cluster->add_option("-i,--input", cl_input, "Relation CSV from `pool`")->required();
  cluster->add_option("-m,--method", cl_method, "kmeans | gmm | agglomerative | dbscan");
  cluster->add_option("-k", cl_k, "Cluster count (default: number of categories)");
  cluster->add_option("--seed", cl_seed, "Seed");
  cluster->add_option("--restarts", cl_restarts, "Restarts for kmeans (default 10) or gmm (default 1)");
  cluster->add_option("--restart-workers", cl_workers, "Concurrent restarts");
  cluster->add_option("--linkage", cl_linkage, "ward | complete | average | single");
  cluster->add_option("--metric", cl_metric, "euclidean | l2 | manhattan | l1 | cosine");
  cluster->add_option("--eps", cl_eps, "DBSCAN neighbourhood radius");
  cluster->add_option("--min-points", cl_min_points, "DBSCAN core threshold (point itself included)");
  cluster->add_option("--covariance", cl_covariance, "GMM covariance: full | diagonal");
  cluster->add_option("--reg-covar", cl_reg, "GMM diagonal regularisation");
  cluster->add_option("-o,--output", cl_output, "Assignments CSV (default stdout)");
  cluster->add_option("--diagnostics", cl_diag, "Diagnostics key-value file");

  // score
  auto* score = app.add_subcommand("score", "Adjusted Rand Index of two labelings");
  std::string sc_truth, sc_pred, sc_assign;
  bool sc_exclude_noise = false;
  score->add_option("--truth", sc_truth, "File with one label per line");
  score->add_option("--pred", sc_pred, "File with one label per line");
  score->add_option("--assignments", sc_assign, "CSV row,category,assigned_label (from `cluster`)");
  score->add_flag("--exclude-noise", sc_exclude_noise, "Drop rows labelled -1 before scoring");

  // project
  auto* project = app.add_subcommand("project", "PCA 2-d projection of a relation CSV");
  std::string pj_input, pj_output;
  bool pj_allow_degenerate = false;
  project->add_option("-i,--input", pj_input, "Relation CSV")->required();
  project->add_option("-o,--output", pj_output, "Projection CSV (default stdout)");
  project->add_flag("--allow-degenerate", pj_allow_degenerate, "Emit a zero column instead of failing on rank-1 data");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig cfg;
      if (!config_path.empty()) cfg = load_config(config_path);
      if (!embeddings.empty()) cfg.embeddings_path = embeddings;
      if (!corpus.empty()) cfg.corpus_path = corpus;
      if (!output.empty()) cfg.output_dir = output;
      if (seed) cfg.seed = *seed;
      if (workers) cfg.workers = *workers;
      if (restart_workers) cfg.restart_workers = *restart_workers;
      if (keep_going) cfg.keep_going = true;
      if (export_vectors) cfg.export_vectors = true;
      if (!strategies.empty()) {
        cfg.strategies.clear();
        for (const auto& s : strategies) cfg.strategies.push_back(parse_strategy(s));
      }
      if (!models.empty()) {
        cfg.models.clear();
        for (const auto& m : models) cfg.models.push_back(parse_model(m));
      }
      std::cerr << "seed = " << cfg.seed << '\n';
      const auto outcome = run_experiment(cfg);
      std::cerr << "resolved " << outcome.resolution.resolved.size() << " of " << outcome.corpus_pairs
                << " pairs in " << outcome.resolution.report.size() << " categories\n";
      for (const auto& [model, table] : outcome.run.tables) {
        std::cout << "\n## " << model_name(model) << "\n\n";
        print_grid(table);
      }
      std::cout << "\n## best average per model\n\n";
      print_grid(outcome.run.summary);
      std::cerr << "wrote " << outcome.files.size() << " files to " << outcome.config.output_dir << '\n';
      return 0;
    }

    if (*pool_cmd) {
      const auto table = load_embeddings(resolve_data_path(pool_embeddings, kDefaultEmbeddingsFile));
      const auto corpus_data = parse_analogy_file(resolve_data_path(pool_corpus, kDefaultCorpusFile));
      const auto resolution = resolve_pairs(corpus_data, table);
      std::filesystem::create_directories(pool_output);
      std::vector<PoolingStrategy> chosen(kAllStrategies.begin(), kAllStrategies.end());
      if (!pool_strategies.empty()) {
        chosen.clear();
        for (const auto& s : pool_strategies) chosen.push_back(parse_strategy(s));
      }
      for (auto s : chosen) {
        const auto ds = pool_dataset(s, resolution.resolved);
        const auto path = (std::filesystem::path(pool_output) / ("relations_" + std::string(strategy_name(s)) + ".csv")).string();
        auto f = open_out(path);
        write_relation_csv(ds, f);
        std::cerr << "wrote " << path << '\n';
      }
      auto f = open_out((std::filesystem::path(pool_output) / "drop_report.csv").string());
      write_drop_report(resolution, f);
      return 0;
    }

    if (*cluster) {
      const auto ds = load_relations(cl_input);
      const int k = cl_k > 0 ? cl_k : static_cast<int>(ds.categories.size());
      ClusteringResult result;
      const std::string method = to_lower(cl_method);
      if (method == "kmeans") {
        KMeansConfig c;
        c.k = k;
        c.seed = cl_seed;
        c.n_restarts = cl_restarts > 0 ? cl_restarts : 10;
        c.workers = cl_workers;
        result = kmeans_fit(c, ds.vectors);
      } else if (method == "gmm") {
        GmmConfig c;
        c.k = k;
        c.seed = cl_seed;
        c.n_restarts = cl_restarts > 0 ? cl_restarts : 1;
        c.reg_covar = cl_reg;
        c.covariance = to_lower(cl_covariance) == "full" ? CovarianceType::full : CovarianceType::diagonal;
        c.workers = cl_workers;
        result = gmm_fit(c, ds.vectors);
      } else if (method == "agglomerative") {
        result = agglomerative_fit({k, parse_linkage(cl_linkage), parse_metric(cl_metric)}, ds.vectors);
      } else if (method == "dbscan") {
        result = dbscan_fit({cl_eps, cl_min_points, parse_metric(cl_metric)}, ds.vectors);
      } else {
        throw Error("unknown method '" + cl_method + "'");
      }
      std::vector<std::string> names;
      for (const auto& s : ds.sources) names.push_back(s.category);
      if (cl_output.empty()) {
        write_assignments_csv(result, names, std::cout);
      } else {
        auto f = open_out(cl_output);
        write_assignments_csv(result, names, f);
      }
      if (!cl_diag.empty()) {
        auto f = open_out(cl_diag);
        write_diagnostics(result.diagnostics, f);
      }
      std::cerr << "clusters = " << result.n_clusters << "\nari = " << format_score(score_cell(result, ds.labels))
                << '\n';
      return 0;
    }

    if (*score) {
      double ari = 0.0;
      if (!sc_assign.empty()) {
        std::vector<std::string> truth;
        std::vector<int> pred;
        read_assignments(sc_assign, truth, pred);
        if (sc_exclude_noise) {
          std::vector<std::string> t;
          std::vector<int> p;
          for (std::size_t i = 0; i < pred.size(); ++i)
            if (pred[i] != kNoise) {
              t.push_back(truth[i]);
              p.push_back(pred[i]);
            }
          truth.swap(t);
          pred.swap(p);
        }
        ari = adjusted_rand_index(truth, pred);
      } else {
        if (sc_truth.empty() || sc_pred.empty()) throw Error("score: give --assignments or both --truth and --pred");
        auto truth = read_label_file(sc_truth);
        auto pred = read_label_file(sc_pred);
        if (sc_exclude_noise) {
          if (truth.size() != pred.size()) throw Error("score: label files differ in length");
          std::vector<std::string> t, p;
          for (std::size_t i = 0; i < pred.size(); ++i)
            if (pred[i] != "-1") {
              t.push_back(truth[i]);
              p.push_back(pred[i]);
            }
          truth.swap(t);
          pred.swap(p);
        }
        ari = adjusted_rand_index(truth, pred);
      }
      std::cout << format_score(ari) << '\n';
      return 0;
    }

    if (*project) {
      const auto ds = load_relations(pj_input);
      const auto p = project_2d(ds, pj_allow_degenerate);
      if (pj_output.empty()) {
        write_projection_csv(ds, p, std::cout);
      } else {
        auto f = open_out(pj_output);
        write_projection_csv(ds, p, f);
      }
      std::cerr << "explained_variance_ratio = " << format_double(p.explained_variance_ratio[0]) << ", "
                << format_double(p.explained_variance_ratio[1]) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
