#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relvec/embeddings.hpp"
#include "relvec/error.hpp"
#include "relvec/matrix.hpp"

namespace relvec {

// euclidean/l2 and manhattan/l1 are aliases; both spellings are kept so report rows can name either.
enum class DistanceMetric { euclidean, l2, manhattan, l1, cosine };

inline std::string_view metric_name(DistanceMetric m) {
  switch (m) {
    case DistanceMetric::euclidean: return "euclidean";
    case DistanceMetric::l2: return "l2";
    case DistanceMetric::manhattan: return "manhattan";
    case DistanceMetric::l1: return "l1";
    case DistanceMetric::cosine: return "cosine";
  }
  return "?";
}

inline DistanceMetric parse_metric(std::string_view text) {
  const std::string s = to_lower(text);
  if (s == "euclidean") return DistanceMetric::euclidean;
  if (s == "l2") return DistanceMetric::l2;
  if (s == "manhattan" || s == "cityblock") return DistanceMetric::manhattan;
  if (s == "l1") return DistanceMetric::l1;
  if (s == "cosine") return DistanceMetric::cosine;
  throw Error("unknown distance metric '" + std::string(text) + "'");
}

inline bool is_euclidean(DistanceMetric m) {
  return m == DistanceMetric::euclidean || m == DistanceMetric::l2;
}

inline double squared_euclidean(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

inline double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double distance(DistanceMetric m, std::span<const double> x, std::span<const double> y) {
  switch (m) {
    case DistanceMetric::euclidean:
    case DistanceMetric::l2:
      return std::sqrt(squared_euclidean(x, y));
    case DistanceMetric::manhattan:
    case DistanceMetric::l1: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += std::fabs(x[i] - y[i]);
      return s;
    }
    case DistanceMetric::cosine: {
      double dot = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
      const double nx = norm2(x), ny = norm2(y);
      if (nx == 0.0 || ny == 0.0) throw Error("cosine distance of a zero-norm vector");
      const double d = 1.0 - dot / (nx * ny);
      return d < 0.0 ? 0.0 : d;
    }
  }
  return 0.0;
}

/// Symmetric n x n distance matrix with an exact zero diagonal.
inline Matrix pairwise_distance(DistanceMetric m, const Matrix& x) {
  const std::size_t n = x.rows();
  if (m == DistanceMetric::cosine) {
    for (std::size_t i = 0; i < n; ++i)
      if (norm2(x.row(i)) == 0.0) throw Error("cosine distance undefined: row " + std::to_string(i) + " has zero norm");
  }
  Matrix d(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = distance(m, x.row(i), x.row(j));
      d(i, j) = v;
      d(j, i) = v;
    }
  return d;
}

}  // namespace relvec
