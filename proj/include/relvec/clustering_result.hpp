#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "relvec/embeddings.hpp"

namespace relvec {

inline constexpr int kNoise = -1;

struct Diagnostics {
  std::map<std::string, double> values;
  std::map<std::string, std::vector<double>> traces;
};

/// Per-row cluster labels in 0..n_clusters-1, or kNoise.
struct ClusteringResult {
  std::vector<int> assignments;
  int n_clusters = 0;
  Diagnostics diagnostics;
  std::vector<std::vector<int>> restart_assignments;  // stochastic fitters: one labelling per restart
};

/// Renumbers non-noise labels in order of first occurrence; returns the cluster count.
inline int relabel_by_first_occurrence(std::vector<int>& labels) {
  std::unordered_map<int, int> remap;
  for (int& l : labels) {
    if (l == kNoise) continue;
    auto [it, inserted] = remap.emplace(l, static_cast<int>(remap.size()));
    l = it->second;
  }
  return static_cast<int>(remap.size());
}

inline void write_assignments_csv(const ClusteringResult& r, std::span<const std::string> categories,
                                  std::ostream& out) {
  out << "row,category,assigned_label\n";
  for (std::size_t i = 0; i < r.assignments.size(); ++i)
    out << i << ',' << (i < categories.size() ? categories[i] : std::string()) << ',' << r.assignments[i] << '\n';
}

inline void write_diagnostics(const Diagnostics& d, std::ostream& out) {
  for (const auto& [k, v] : d.values) out << k << " = " << format_double(v) << '\n';
  for (const auto& [k, trace] : d.traces) {
    out << k << " =";
    for (std::size_t i = 0; i < trace.size(); ++i) out << (i ? ", " : " ") << format_double(trace[i]);
    out << '\n';
  }
}

}  // namespace relvec
