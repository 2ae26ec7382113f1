#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "relvec/clustering_result.hpp"
#include "relvec/distance.hpp"
#include "relvec/error.hpp"
#include "relvec/matrix.hpp"
#include "relvec/parallel.hpp"

namespace relvec {

struct KMeansConfig {
  int k = 14;
  int n_restarts = 10;
  int max_iter = 300;
  double tol = 1e-6;  // max centroid shift (euclidean) that counts as converged
  std::uint64_t seed = 0;
  int workers = 1;    // restarts run in parallel; output does not depend on this
};

/// One Lloyd run from a fixed set of initial centroids.
struct KMeansRun {
  std::vector<int> labels;
  Matrix centroids;
  std::vector<double> inertia_trace;  // inertia after every assignment step
  int iterations = 0;
  bool converged = false;

  double inertia() const { return inertia_trace.empty() ? 0.0 : inertia_trace.back(); }
};

namespace detail {

/// Nearest-centroid assignment; ties go to the lowest centroid index. Returns inertia.
inline double assign_nearest(const Matrix& x, const Matrix& centroids, std::vector<int>& labels) {
  double inertia = 0.0;
  labels.resize(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
      const double d = squared_euclidean(x.row(i), centroids.row(c));
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    labels[i] = arg;
    inertia += best;
  }
  return inertia;
}

/// Recomputes centroids as member means; empty clusters keep their previous centroid.
/// Returns the largest centroid shift.
inline double update_centroids(const Matrix& x, const std::vector<int>& labels, Matrix& centroids) {
  const std::size_t k = centroids.rows(), d = x.cols();
  Matrix sums(k, d, 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto s = sums.row(static_cast<std::size_t>(labels[i]));
    auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) s[j] += r[j];
    ++counts[static_cast<std::size_t>(labels[i])];
  }
  double shift = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    auto s = sums.row(c);
    for (std::size_t j = 0; j < d; ++j) s[j] /= static_cast<double>(counts[c]);
    shift = std::max(shift, std::sqrt(squared_euclidean(s, centroids.row(c))));
    auto dst = centroids.row(c);
    std::copy(s.begin(), s.end(), dst.begin());
  }
  return shift;
}

/// k distinct row indices drawn uniformly.
inline std::vector<std::size_t> sample_rows(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

inline void check_k(int k, std::size_t rows, const char* who) {
  if (k <= 0) throw Error(std::string(who) + ": k must be positive");
  if (static_cast<std::size_t>(k) > rows)
    throw Error(std::string(who) + ": k=" + std::to_string(k) + " exceeds the number of rows (" +
                std::to_string(rows) + ")");
}

}  // namespace detail

/// Lloyd iterations until the assignment is a fixed point, the centroid shift drops below tol, or max_iter.
inline KMeansRun kmeans_lloyd(const Matrix& x, Matrix centroids, int max_iter, double tol) {
  KMeansRun run;
  run.inertia_trace.push_back(detail::assign_nearest(x, centroids, run.labels));
  std::vector<int> next;
  for (int it = 0; it < max_iter; ++it) {
    const double shift = detail::update_centroids(x, run.labels, centroids);
    run.inertia_trace.push_back(detail::assign_nearest(x, centroids, next));
    ++run.iterations;
    const bool stable = next == run.labels;
    run.labels.swap(next);
    if (stable || shift < tol) {
      run.converged = true;
      break;
    }
  }
  run.centroids = std::move(centroids);
  return run;
}

inline KMeansRun kmeans_single(const Matrix& x, int k, int max_iter, double tol, std::uint64_t seed) {
  detail::check_k(k, x.rows(), "kmeans");
  const auto rows = detail::sample_rows(x.rows(), static_cast<std::size_t>(k), seed);
  return kmeans_lloyd(x, select_rows(x, rows), max_iter, tol);
}

/// Best of `n_restarts` random-initialisation runs by final inertia. Restart r uses seed + r.
inline ClusteringResult kmeans_fit(const KMeansConfig& cfg, const Matrix& x) {
  detail::check_k(cfg.k, x.rows(), "kmeans");
  const int restarts = std::max(1, cfg.n_restarts);
  std::vector<KMeansRun> runs(static_cast<std::size_t>(restarts));
  parallel_for(runs.size(), cfg.workers, [&](std::size_t r) {
    runs[r] = kmeans_single(x, cfg.k, cfg.max_iter, cfg.tol, cfg.seed + r);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].inertia() < runs[best].inertia()) best = r;

  ClusteringResult out;
  out.assignments = runs[best].labels;
  out.n_clusters = relabel_by_first_occurrence(out.assignments);
  auto& d = out.diagnostics;
  d.values["inertia"] = runs[best].inertia();
  d.values["iterations"] = runs[best].iterations;
  d.values["converged"] = runs[best].converged ? 1.0 : 0.0;
  d.values["best_restart"] = static_cast<double>(best);
  d.traces["inertia_trace"] = runs[best].inertia_trace;
  auto& per = d.traces["restart_inertia"];
  for (const auto& r : runs) {
    per.push_back(r.inertia());
    out.restart_assignments.push_back(r.labels);
  }
  return out;
}

}  // namespace relvec
