#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "relvec/clustering_result.hpp"
#include "relvec/error.hpp"

namespace relvec {

/// Cross-tabulation of two labelings; rows follow ascending truth label, columns ascending predicted label.
struct ContingencyTable {
  std::size_t n_true = 0;
  std::size_t n_pred = 0;
  std::vector<std::uint64_t> counts;  // n_true x n_pred, row-major
  std::vector<std::uint64_t> row_sums;
  std::vector<std::uint64_t> col_sums;
  std::uint64_t total = 0;

  std::uint64_t at(std::size_t t, std::size_t p) const { return counts[t * n_pred + p]; }
};

template <class A, class B>
ContingencyTable contingency(std::span<const A> truth, std::span<const B> pred) {
  if (truth.size() != pred.size())
    throw Error("contingency: label sequences differ in length (" + std::to_string(truth.size()) + " vs " +
                std::to_string(pred.size()) + ")");
  std::map<A, std::size_t> ti;
  std::map<B, std::size_t> pi;
  for (const auto& t : truth) ti.emplace(t, 0);
  for (const auto& p : pred) pi.emplace(p, 0);
  std::size_t k = 0;
  for (auto& [_, v] : ti) v = k++;
  k = 0;
  for (auto& [_, v] : pi) v = k++;

  ContingencyTable c;
  c.n_true = ti.size();
  c.n_pred = pi.size();
  c.counts.assign(c.n_true * c.n_pred, 0);
  c.row_sums.assign(c.n_true, 0);
  c.col_sums.assign(c.n_pred, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::size_t r = ti[truth[i]], col = pi[pred[i]];
    ++c.counts[r * c.n_pred + col];
    ++c.row_sums[r];
    ++c.col_sums[col];
  }
  c.total = truth.size();
  return c;
}

/// Adjusted Rand Index. Two identical trivial partitions (zero denominator) score 1.
template <class A, class B>
double adjusted_rand_index(std::span<const A> truth, std::span<const B> pred) {
  if (truth.size() != pred.size())
    throw Error("adjusted_rand_index: label sequences differ in length (" + std::to_string(truth.size()) + " vs " +
                std::to_string(pred.size()) + ")");
  if (truth.size() < 2) throw Error("adjusted_rand_index: need at least two points");
  const auto c = contingency(truth, pred);
  // Integer pair counts are exact well past any desk-scale n.
  std::uint64_t index = 0, a = 0, b = 0;
  auto pairs = [](std::uint64_t n) -> std::uint64_t { return n < 2 ? 0 : n * (n - 1) / 2; };
  for (auto v : c.counts) index += pairs(v);
  for (auto v : c.row_sums) a += pairs(v);
  for (auto v : c.col_sums) b += pairs(v);
  const std::uint64_t total_pairs_int = pairs(c.total);
  // The denominator vanishes only for two identical trivial partitions.
  if ((a == 0 && b == 0) || (a == total_pairs_int && b == total_pairs_int)) return 1.0;
  const double total_pairs = static_cast<double>(total_pairs_int);
  const double expected = static_cast<double>(a) * static_cast<double>(b) / total_pairs;
  const double max_index = 0.5 * (static_cast<double>(a) + static_cast<double>(b));
  return (static_cast<double>(index) - expected) / (max_index - expected);
}

template <class A, class B>
double adjusted_rand_index(const std::vector<A>& truth, const std::vector<B>& pred) {
  return adjusted_rand_index(std::span<const A>(truth), std::span<const B>(pred));
}

/// ARI of a clustering against ground truth. Noise passes through as its own label unless excluded.
inline double score_cell(const ClusteringResult& result, std::span<const int> truth, bool exclude_noise = false) {
  if (result.assignments.size() != truth.size())
    throw Error("score_cell: " + std::to_string(result.assignments.size()) + " assignments vs " +
                std::to_string(truth.size()) + " truth labels");
  if (!exclude_noise) return adjusted_rand_index(truth, std::span<const int>(result.assignments));
  std::vector<int> t, p;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (result.assignments[i] != kNoise) {
      t.push_back(truth[i]);
      p.push_back(result.assignments[i]);
    }
  if (t.size() < 2) throw Error("score_cell: fewer than two non-noise points");
  return adjusted_rand_index(t, p);
}

}  // namespace relvec
