#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "relvec/clustering_result.hpp"
#include "relvec/distance.hpp"
#include "relvec/embeddings.hpp"
#include "relvec/error.hpp"
#include "relvec/matrix.hpp"

namespace relvec {

enum class Linkage { ward, complete, average, single };

inline std::string_view linkage_name(Linkage l) {
  switch (l) {
    case Linkage::ward: return "ward";
    case Linkage::complete: return "complete";
    case Linkage::average: return "average";
    case Linkage::single: return "single";
  }
  return "?";
}

inline Linkage parse_linkage(std::string_view text) {
  const std::string s = to_lower(text);
  if (s == "ward") return Linkage::ward;
  if (s == "complete" || s == "maximum") return Linkage::complete;
  if (s == "average") return Linkage::average;
  if (s == "single") return Linkage::single;
  throw Error("unknown linkage '" + std::string(text) + "'");
}

struct AgglomerativeConfig {
  int k = 14;
  Linkage linkage = Linkage::ward;
  DistanceMetric metric = DistanceMetric::euclidean;
};

namespace detail {

/// Distance from cluster m to the union of i and j, given d(m,i)=a, d(m,j)=b and d(i,j)=delta.
/// Written so the result never falls below min(a, b, delta) under rounding.
inline double lance_williams(Linkage linkage, double a, double b, double delta, double ni, double nj, double nm) {
  switch (linkage) {
    case Linkage::single: return std::min(a, b);
    case Linkage::complete: return std::max(a, b);
    case Linkage::average:
      return a <= b ? a + (b - a) * (nj / (ni + nj)) : b + (a - b) * (ni / (ni + nj));
    case Linkage::ward: {
      const double d2 = delta * delta;
      const double t = ni + nj + nm;
      return std::sqrt(d2 + ((nm + ni) * (a * a - d2) + (nm + nj) * (b * b - d2)) / t);
    }
  }
  return 0.0;
}

}  // namespace detail

/// Bottom-up merging over a precomputed distance matrix until k clusters remain.
/// Among equal merge distances the lexicographically smallest (i, j) cluster pair merges first;
/// a merged cluster keeps the smaller id, so every cluster id is its lowest row index.
inline ClusteringResult agglomerative_fit_distances(const AgglomerativeConfig& cfg, Matrix dist) {
  const std::size_t n = dist.rows();
  if (cfg.k <= 0) throw Error("agglomerative: k must be positive");
  if (static_cast<std::size_t>(cfg.k) > n)
    throw Error("agglomerative: k=" + std::to_string(cfg.k) + " exceeds the number of rows (" + std::to_string(n) + ")");

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<bool> active(n, true);
  std::vector<double> size(n, 1.0);
  std::vector<std::size_t> owner(n);
  for (std::size_t i = 0; i < n; ++i) owner[i] = i;
  // nn[i]: smallest j > i minimising dist(i, j) over active clusters.
  std::vector<std::size_t> nn(n, n);
  std::vector<double> nn_dist(n, inf);

  auto refresh = [&](std::size_t i) {
    nn[i] = n;
    nn_dist[i] = inf;
    for (std::size_t j = i + 1; j < n; ++j)
      if (active[j] && dist(i, j) < nn_dist[i]) {
        nn_dist[i] = dist(i, j);
        nn[i] = j;
      }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  std::vector<double> merges;
  merges.reserve(n - static_cast<std::size_t>(cfg.k));
  for (std::size_t remaining = n; remaining > static_cast<std::size_t>(cfg.k); --remaining) {
    std::size_t i = n;
    for (std::size_t r = 0; r < n; ++r)
      if (active[r] && nn[r] < n && (i == n || nn_dist[r] < nn_dist[i])) i = r;
    const std::size_t j = nn[i];
    const double delta = nn_dist[i];
    merges.push_back(delta);

    for (std::size_t m = 0; m < n; ++m) {
      if (!active[m] || m == i || m == j) continue;
      const double v = detail::lance_williams(cfg.linkage, dist(m, i), dist(m, j), delta, size[i], size[j], size[m]);
      dist(m, i) = v;
      dist(i, m) = v;
    }
    active[j] = false;
    size[i] += size[j];
    for (std::size_t r = 0; r < n; ++r)
      if (owner[r] == j) owner[r] = i;

    refresh(i);
    for (std::size_t m = 0; m < n; ++m) {
      if (!active[m] || m == i) continue;
      if (nn[m] == i || nn[m] == j) {
        refresh(m);
      } else if (m < i && (dist(m, i) < nn_dist[m] || (dist(m, i) == nn_dist[m] && i < nn[m]))) {
        nn[m] = i;
        nn_dist[m] = dist(m, i);
      }
    }
  }

  ClusteringResult out;
  out.assignments.resize(n);
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t c = owner[r];
    if (label[c] < 0) label[c] = next++;
    out.assignments[r] = label[c];
  }
  out.n_clusters = next;
  out.diagnostics.traces["merge_distances"] = std::move(merges);
  return out;
}

inline ClusteringResult agglomerative_fit(const AgglomerativeConfig& cfg, const Matrix& x) {
  if (cfg.linkage == Linkage::ward && !is_euclidean(cfg.metric))
    throw Error("agglomerative: ward linkage requires the euclidean metric, got " + std::string(metric_name(cfg.metric)));
  return agglomerative_fit_distances(cfg, pairwise_distance(cfg.metric, x));
}

}  // namespace relvec
