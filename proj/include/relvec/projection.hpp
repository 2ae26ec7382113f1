#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <vector>

#include "relvec/embeddings.hpp"
#include "relvec/error.hpp"
#include "relvec/linalg.hpp"
#include "relvec/matrix.hpp"
#include "relvec/pooling.hpp"

namespace relvec {

struct Projection {
  Matrix coords;                               // n x 2
  Matrix components;                           // 2 x d, unit rows
  std::array<double, 2> explained_variance{};  // sample variance along each component
  std::array<double, 2> explained_variance_ratio{};
};

/// Projects mean-centred rows onto the top two principal components.
/// Identical rows are always an error; a vanishing second component is an error unless
/// `allow_degenerate`, in which case that column is zero.
inline Projection project_2d(const Matrix& x, bool allow_degenerate = false) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n < 2) throw Error("project_2d: need at least two rows");
  if (d < 2) throw Error("project_2d: need at least two columns");

  std::vector<double> mean(d, 0.0);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      mean[j] += r[j];
      scale = std::max(scale, r[j] * r[j]);
    }
  }
  for (double& m : mean) m /= static_cast<double>(n);

  Matrix centred(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) centred(i, j) = x(i, j) - mean[j];

  Matrix cov(d, d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = centred.row(i);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b <= a; ++b) cov(a, b) += r[a] * r[b];
  }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      cov(a, b) /= static_cast<double>(n - 1);
      cov(b, a) = cov(a, b);
    }

  const auto eig = jacobi_eigen(cov);
  double total = 0.0;
  for (std::size_t a = 0; a < d; ++a) total += cov(a, a);

  if (!(eig.values[0] > 1e-20 * scale)) throw Error("project_2d: data has rank 0 (all rows identical)");
  const bool flat = !(eig.values[1] > 1e-12 * eig.values[0]);
  if (flat && !allow_degenerate) throw Error("project_2d: data has rank 1 (second component has zero variance)");

  Projection p;
  p.components = Matrix(2, d, 0.0);
  for (std::size_t c = 0; c < 2; ++c) {
    if (c == 1 && flat) break;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < d; ++j)
      if (std::fabs(eig.vectors(j, c)) > std::fabs(eig.vectors(arg, c))) arg = j;
    const double sign = eig.vectors(arg, c) < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < d; ++j) p.components(c, j) = sign * eig.vectors(j, c);
    p.explained_variance[c] = eig.values[c];
    p.explained_variance_ratio[c] = eig.values[c] / total;
  }
  p.coords = Matrix(n, 2, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < 2; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += centred(i, j) * p.components(c, j);
      p.coords(i, c) = s;
    }
  return p;
}

inline Projection project_2d(const RelationDataset& ds, bool allow_degenerate = false) {
  return project_2d(ds.vectors, allow_degenerate);
}

inline void write_projection_csv(const RelationDataset& ds, const Projection& p, std::ostream& out) {
  out << "category,word_a,word_b,pc1,pc2\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& s = ds.sources[i];
    out << s.category << ',' << s.word_a << ',' << s.word_b << ',' << format_double(p.coords(i, 0)) << ','
        << format_double(p.coords(i, 1)) << '\n';
  }
}

}  // namespace relvec
