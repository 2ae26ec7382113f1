#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "relvec/clustering_result.hpp"
#include "relvec/distance.hpp"
#include "relvec/error.hpp"
#include "relvec/matrix.hpp"

namespace relvec {

struct DbscanConfig {
  double eps = 0.5;
  int min_points = 5;  // neighbourhood size, the point itself included
  DistanceMetric metric = DistanceMetric::euclidean;
};

namespace detail {

inline void check_dbscan(const DbscanConfig& cfg) {
  if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps)) throw Error("dbscan: eps must be a finite positive number");
  if (cfg.min_points <= 0) throw Error("dbscan: min_points must be positive");
}

/// eps-neighbourhoods (ascending row order, self included) and the core flag of every row.
inline std::vector<bool> eps_neighbourhoods(const DbscanConfig& cfg, const Matrix& dist,
                                            std::vector<std::vector<std::size_t>>& neighbours) {
  const std::size_t n = dist.rows();
  neighbours.assign(n, {});
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (dist(i, j) <= cfg.eps) neighbours[i].push_back(j);
    core[i] = neighbours[i].size() >= static_cast<std::size_t>(cfg.min_points);
  }
  return core;
}

}  // namespace detail

inline ClusteringResult dbscan_fit_distances(const DbscanConfig& cfg, const Matrix& dist) {
  detail::check_dbscan(cfg);
  const std::size_t n = dist.rows();
  std::vector<std::vector<std::size_t>> neighbours;
  const std::vector<bool> core = detail::eps_neighbourhoods(cfg, dist, neighbours);

  // Connected components of core points, numbered by their lowest row.
  std::vector<int> label(n, kNoise);
  int clusters = 0;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!core[seed] || label[seed] != kNoise) continue;
    label[seed] = clusters;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      for (std::size_t q : neighbours[p])
        if (core[q] && label[q] == kNoise) {
          label[q] = clusters;
          stack.push_back(q);
        }
    }
    ++clusters;
  }

  // Border points take the cluster of their lowest-index core neighbour.
  std::size_t border = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (std::size_t q : neighbours[i])  // ascending row order
      if (core[q]) {
        label[i] = label[q];
        ++border;
        break;
      }
  }

  ClusteringResult out;
  out.assignments = std::move(label);
  out.n_clusters = clusters;
  std::size_t n_core = 0, noise = 0;
  for (std::size_t i = 0; i < n; ++i) {
    n_core += core[i] ? 1 : 0;
    noise += out.assignments[i] == kNoise ? 1 : 0;
  }
  out.diagnostics.values["core_points"] = static_cast<double>(n_core);
  out.diagnostics.values["border_points"] = static_cast<double>(border);
  out.diagnostics.values["noise_points"] = static_cast<double>(noise);
  return out;
}

inline ClusteringResult dbscan_fit(const DbscanConfig& cfg, const Matrix& x) {
  detail::check_dbscan(cfg);
  return dbscan_fit_distances(cfg, pairwise_distance(cfg.metric, x));
}

/// Core flag per row.
inline std::vector<bool> dbscan_core_mask(const DbscanConfig& cfg, const Matrix& x) {
  detail::check_dbscan(cfg);
  std::vector<std::vector<std::size_t>> neighbours;
  return detail::eps_neighbourhoods(cfg, pairwise_distance(cfg.metric, x), neighbours);
}

}  // namespace relvec
