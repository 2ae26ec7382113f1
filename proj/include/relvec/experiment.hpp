#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "relvec/agglomerative.hpp"
#include "relvec/ari.hpp"
#include "relvec/config.hpp"
#include "relvec/dbscan.hpp"
#include "relvec/distance.hpp"
#include "relvec/embeddings.hpp"
#include "relvec/error.hpp"
#include "relvec/gmm.hpp"
#include "relvec/kmeans.hpp"
#include "relvec/pair_corpus.hpp"
#include "relvec/parallel.hpp"
#include "relvec/pooling.hpp"
#include "relvec/projection.hpp"
#include "relvec/score_grid.hpp"

#ifndef RELVEC_VERSION
#define RELVEC_VERSION "0.0.0"
#endif

namespace relvec {

inline constexpr const char* kDataDirEnv = "RELVEC_DATA_DIR";
inline constexpr const char* kDefaultEmbeddingsFile = "glove.6B.100d.txt";
inline constexpr const char* kDefaultCorpusFile = "questions-words.txt";

/// Empty paths fall back to `$RELVEC_DATA_DIR/<default_name>`; relative paths that do not
/// exist are retried under the data directory.
inline std::string resolve_data_path(const std::string& path, const std::string& default_name) {
  namespace fs = std::filesystem;
  const char* env = std::getenv(kDataDirEnv);
  const std::string dir = env ? env : "";
  if (path.empty()) return dir.empty() ? std::string() : (fs::path(dir) / default_name).string();
  if (!dir.empty() && fs::path(path).is_relative() && !fs::exists(path)) {
    const auto candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

struct CellRecord {
  Model model = Model::kmeans;
  std::string label;
  PoolingStrategy strategy = PoolingStrategy::subtract;
  double ari = std::numeric_limits<double>::quiet_NaN();
  double millis = 0.0;
  int n_clusters = 0;
  std::size_t noise = 0;
  std::vector<double> restart_ari;
  std::string error;  // set when the cell failed under keep_going
};

struct GridRun {
  ScoreGrid grid;  // every row of every model
  std::map<Model, ScoreGrid> tables;
  ScoreGrid summary;  // best-average row per model
  std::vector<CellRecord> cells;
  std::size_t categories = 0;
};

namespace detail {

inline int effective_k(int configured, std::size_t categories) {
  return configured > 0 ? configured : static_cast<int>(categories);
}

enum class MetricClass { euclidean, manhattan, cosine };

inline MetricClass metric_class(DistanceMetric m) {
  switch (m) {
    case DistanceMetric::euclidean:
    case DistanceMetric::l2: return MetricClass::euclidean;
    case DistanceMetric::manhattan:
    case DistanceMetric::l1: return MetricClass::manhattan;
    case DistanceMetric::cosine: return MetricClass::cosine;
  }
  return MetricClass::euclidean;
}

inline DistanceMetric class_metric(MetricClass c) {
  switch (c) {
    case MetricClass::euclidean: return DistanceMetric::euclidean;
    case MetricClass::manhattan: return DistanceMetric::manhattan;
    case MetricClass::cosine: return DistanceMetric::cosine;
  }
  return DistanceMetric::euclidean;
}

}  // namespace detail

/// Runs every (configuration, strategy) cell over already-resolved pairs.
/// Output is independent of `workers` and `restart_workers`.
inline GridRun run_grid(const ExperimentConfig& cfg, const Resolution& resolution) {
  using detail::MetricClass;
  cfg.validate();
  std::vector<RelationDataset> datasets;
  for (auto s : cfg.strategies) datasets.push_back(pool_dataset(s, resolution.resolved));
  const std::vector<int>& truth = datasets.front().labels;
  const std::size_t n_categories = datasets.front().categories.size();

  GridRun run;
  run.categories = n_categories;

  struct Job {
    Model model;
    GridRow row;
    std::size_t strategy;
    std::function<ClusteringResult(std::size_t)> fit;
  };
  std::vector<Job> jobs;
  std::vector<GridRow> rows;

  // Distance matrices shared by the agglomerative and DBSCAN cells, one per (strategy, metric class).
  std::map<std::pair<std::size_t, MetricClass>, Matrix> distances;
  std::map<std::pair<std::size_t, MetricClass>, std::string> distance_errors;
  auto need = [&](DistanceMetric m) {
    for (std::size_t s = 0; s < datasets.size(); ++s) distances[{s, detail::metric_class(m)}];
  };
  auto dist_for = [&](std::size_t s, DistanceMetric m) -> const Matrix& {
    const std::pair key{s, detail::metric_class(m)};
    if (auto it = distance_errors.find(key); it != distance_errors.end()) throw Error(it->second);
    return distances.at(key);
  };

  for (auto model : cfg.models) {
    std::vector<std::pair<GridRow, std::function<ClusteringResult(std::size_t)>>> specs;
    switch (model) {
      case Model::kmeans: {
        KMeansConfig kc;
        kc.k = detail::effective_k(cfg.kmeans_k, n_categories);
        kc.n_restarts = cfg.kmeans_restarts;
        kc.max_iter = cfg.kmeans_max_iter;
        kc.tol = cfg.kmeans_tol;
        kc.seed = cfg.seed;
        kc.workers = cfg.restart_workers;
        specs.push_back({{"kmeans", "kmeans"}, [&datasets, kc](std::size_t s) { return kmeans_fit(kc, datasets[s].vectors); }});
        break;
      }
      case Model::gmm: {
        GmmConfig gc;
        gc.k = detail::effective_k(cfg.gmm_k, n_categories);
        gc.n_restarts = cfg.gmm_restarts;
        gc.max_iter = cfg.gmm_max_iter;
        gc.tol = cfg.gmm_tol;
        gc.reg_covar = cfg.gmm_reg_covar;
        gc.covariance = cfg.gmm_covariance;
        gc.seed = cfg.seed;
        gc.workers = cfg.restart_workers;
        specs.push_back({{"gmm", "gmm"}, [&datasets, gc](std::size_t s) { return gmm_fit(gc, datasets[s].vectors); }});
        break;
      }
      case Model::agglomerative:
        for (const auto& a : cfg.agglomerative) {
          need(a.metric);
          AgglomerativeConfig ac{detail::effective_k(cfg.agglomerative_k, n_categories), a.linkage, a.metric};
          specs.push_back({{"agglomerative", agglomerative_label(a)},
                           [&dist_for, ac](std::size_t s) { return agglomerative_fit_distances(ac, dist_for(s, ac.metric)); }});
        }
        break;
      case Model::dbscan:
        for (const auto& d : cfg.dbscan) {
          need(d.metric);
          DbscanConfig dc{d.eps, cfg.dbscan_min_points, d.metric};
          specs.push_back({{"dbscan", dbscan_label(d)},
                           [&dist_for, dc](std::size_t s) { return dbscan_fit_distances(dc, dist_for(s, dc.metric)); }});
        }
        break;
    }
    for (auto& [row, fit] : specs) {
      if (std::find(rows.begin(), rows.end(), row) != rows.end())
        throw Error("config: duplicate grid row " + row.model + " " + row.label);
      rows.push_back(row);
      for (std::size_t s = 0; s < datasets.size(); ++s) jobs.push_back({model, row, s, fit});
    }
  }

  {
    std::vector<std::pair<std::size_t, MetricClass>> keys;
    for (const auto& [key, _] : distances) keys.push_back(key);
    std::vector<Matrix> computed(keys.size());
    std::vector<std::string> errors(keys.size());
    parallel_for(keys.size(), cfg.workers, [&](std::size_t i) {
      try {
        computed[i] = pairwise_distance(detail::class_metric(keys[i].second), datasets[keys[i].first].vectors);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
    // Failures surface in the cells that need the matrix, with their coordinates.
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (errors[i].empty())
        distances[keys[i]] = std::move(computed[i]);
      else
        distance_errors[keys[i]] = errors[i];
    }
  }

  run.cells.resize(jobs.size());
  const bool exclude_noise = cfg.dbscan_exclude_noise;
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t j) {
    const auto& job = jobs[j];
    auto& cell = run.cells[j];
    cell.model = job.model;
    cell.label = job.row.label;
    cell.strategy = cfg.strategies[job.strategy];
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto result = job.fit(job.strategy);
      const bool drop_noise = job.model == Model::dbscan && exclude_noise;
      cell.ari = score_cell(result, truth, drop_noise);
      cell.n_clusters = result.n_clusters;
      for (int a : result.assignments) cell.noise += a == kNoise ? 1 : 0;
      for (const auto& labels : result.restart_assignments) cell.restart_ari.push_back(adjusted_rand_index(truth, labels));
    } catch (const std::exception& e) {
      const std::string where = "cell (" + job.row.model + " " + job.row.label + ", " +
                                std::string(strategy_column(cell.strategy)) + "): " + e.what();
      if (!cfg.keep_going) throw Error(where);
      cell.ari = std::numeric_limits<double>::quiet_NaN();
      cell.error = where;
    }
    cell.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  });

  std::map<CellKey, double> values;
  for (const auto& c : run.cells) values[{c.label, c.strategy}] = c.ari;
  run.grid = assemble_grid(rows, cfg.strategies, values);
  for (auto model : cfg.models) {
    std::vector<std::size_t> picked;
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (rows[r].model == model_name(model)) picked.push_back(r);
    run.tables[model] = run.grid.select(picked);
  }
  run.summary = best_average_summary(run.grid);
  return run;
}

struct ExperimentOutcome {
  ExperimentConfig config;  // with data paths resolved
  Resolution resolution;
  std::size_t corpus_pairs = 0;
  std::size_t vocabulary = 0;
  std::size_t duplicate_tokens = 0;
  GridRun run;
  std::vector<std::string> files;  // written, relative to the output directory
};

/// Key-value manifest: the config snapshot (loadable with load_config) followed by a [manifest] section.
inline std::string make_manifest(const ExperimentOutcome& o) {
  std::ostringstream m;
  m << "# relvec run manifest. Everything above [manifest] is the exact configuration of this run.\n";
  m << to_config_text(o.config);
  m << "\n[manifest]\n";
  m << "tool_version = \"" << RELVEC_VERSION << "\"\n";
  m << "seed = " << o.config.seed << '\n';
  m << "vocabulary = " << o.vocabulary << '\n';
  m << "duplicate_tokens = " << o.duplicate_tokens << '\n';
  m << "corpus_pairs = " << o.corpus_pairs << '\n';
  m << "resolved_pairs = " << o.resolution.resolved.size() << '\n';
  m << "dropped_pairs = " << o.resolution.total_dropped() << '\n';
  m << "categories = " << o.resolution.report.size() << '\n';
  {
    // Pairs listed under more than one category keep every label.
    std::map<std::pair<std::string, std::string>, int> seen;
    for (const auto& r : o.resolution.resolved) ++seen[{r.pair.word_a, r.pair.word_b}];
    std::size_t shared = 0;
    for (const auto& [_, count] : seen) shared += count > 1 ? 1 : 0;
    m << "cross_category_pairs = " << shared << '\n';
  }
  m << "k_kmeans = " << detail::effective_k(o.config.kmeans_k, o.resolution.report.size()) << '\n';
  m << "k_gmm = " << detail::effective_k(o.config.gmm_k, o.resolution.report.size()) << '\n';
  m << "k_agglomerative = " << detail::effective_k(o.config.agglomerative_k, o.resolution.report.size()) << '\n';
  for (const auto& c : o.resolution.report)
    m << "drop = \"" << c.category << ',' << c.kept << ',' << c.dropped << "\"\n";
  for (const auto& c : o.run.cells) {
    m << "cell = \"" << model_name(c.model) << " | " << c.label << " | " << strategy_column(c.strategy)
      << " | ari=" << format_score(c.ari) << " | clusters=" << c.n_clusters << " | noise=" << c.noise;
    if (!c.restart_ari.empty()) {
      m << " | restart_ari=";
      for (std::size_t i = 0; i < c.restart_ari.size(); ++i) m << (i ? ";" : "") << format_score(c.restart_ari[i]);
    }
    char ms[32];
    std::snprintf(ms, sizeof ms, "%.1f", c.millis);
    m << " | ms=" << ms;
    if (!c.error.empty()) m << " | error=" << c.error;
    m << "\"\n";
  }
  return m.str();
}

/// Writes every output into a staging directory first and moves it into place only when all writes succeed.
inline std::vector<std::string> write_outputs(const ExperimentOutcome& o,
                                              const std::vector<RelationDataset>& exports = {}) {
  namespace fs = std::filesystem;
  const fs::path out = o.config.output_dir;
  const fs::path staging = out / ".relvec-staging";
  std::vector<std::string> names;
  try {
    fs::create_directories(out);
    fs::remove_all(staging);
    fs::create_directories(staging);
    auto put = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
      std::ofstream f(staging / name, std::ios::binary);
      if (!f) throw Error("cannot write " + (out / name).string());
      body(f);
      f.flush();
      if (!f) throw Error("write failed: " + (out / name).string());
      names.push_back(name);
    };
    for (const auto& [model, table] : o.run.tables) {
      const std::string base = std::string(model_name(model)) + "_scores";
      put(base + ".csv", [&](std::ostream& s) { write_grid_csv(table, s); });
      put(base + ".md", [&](std::ostream& s) { write_grid_markdown(table, s); });
    }
    put("summary_scores.csv", [&](std::ostream& s) { write_grid_csv(o.run.summary, s); });
    put("summary_scores.md", [&](std::ostream& s) { write_grid_markdown(o.run.summary, s); });
    put("drop_report.csv", [&](std::ostream& s) { write_drop_report(o.resolution, s); });
    for (const auto& ds : exports) {
      const std::string tag(strategy_name(ds.strategy));
      put("relations_" + tag + ".csv", [&](std::ostream& s) { write_relation_csv(ds, s); });
      const auto p = project_2d(ds, true);
      put("projection_" + tag + ".csv", [&](std::ostream& s) { write_projection_csv(ds, p, s); });
    }
    const std::string manifest = make_manifest(o);
    put("manifest.txt", [&](std::ostream& s) { s << manifest; });
    for (const auto& n : names) fs::rename(staging / n, out / n);
    fs::remove_all(staging);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
  return names;
}

/// Loads inputs, runs the grid and writes all tables, the drop report and the manifest.
/// Nothing is left in the output directory if any step fails.
inline ExperimentOutcome run_experiment(ExperimentConfig cfg) {
  cfg.embeddings_path = resolve_data_path(cfg.embeddings_path, kDefaultEmbeddingsFile);
  cfg.corpus_path = resolve_data_path(cfg.corpus_path, kDefaultCorpusFile);
  cfg.validate();

  ExperimentOutcome o;
  const auto table = load_embeddings(cfg.embeddings_path, cfg.expected_dim);
  const auto corpus = parse_analogy_file(cfg.corpus_path);
  o.vocabulary = table.size();
  o.duplicate_tokens = table.duplicate_count();
  o.corpus_pairs = corpus.pairs.size();
  o.resolution = resolve_pairs(corpus, table);
  o.run = run_grid(cfg, o.resolution);
  o.config = std::move(cfg);

  std::vector<RelationDataset> exports;
  if (o.config.export_vectors)
    for (auto s : o.config.strategies) exports.push_back(pool_dataset(s, o.resolution.resolved));
  o.files = write_outputs(o, exports);
  return o;
}

}  // namespace relvec
