#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relvec/error.hpp"
#include "relvec/pooling.hpp"

namespace relvec {

/// One clustering configuration; `model` groups rows for the best-average summary.
struct GridRow {
  std::string model;  // e.g. "agglomerative"
  std::string label;  // e.g. "(complete, cosine)"

  friend bool operator==(const GridRow&, const GridRow&) = default;
  friend auto operator<=>(const GridRow&, const GridRow&) = default;
};

using CellKey = std::pair<std::string, PoolingStrategy>;  // (row label, strategy)

/// ARI per (configuration, pooling strategy), plus derived summaries.
struct ScoreGrid {
  std::vector<GridRow> rows;
  std::vector<PoolingStrategy> columns;
  std::vector<double> cells;  // rows x columns, row-major; NaN marks a failed cell

  double at(std::size_t r, std::size_t c) const { return cells[r * columns.size() + c]; }

  /// Columns holding the row maximum (all of them when tied).
  std::vector<std::size_t> row_best(std::size_t r) const {
    std::vector<std::size_t> best;
    double top = -INFINITY;
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (!std::isnan(at(r, c))) top = std::max(top, at(r, c));
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (at(r, c) == top) best.push_back(c);
    return best;
  }

  double row_mean(std::size_t r) const {
    double s = 0.0;
    for (std::size_t c = 0; c < columns.size(); ++c) s += at(r, c);
    return s / static_cast<double>(columns.size());
  }

  /// Per model, the row with the highest mean over strategies (first row on ties), in first-seen model order.
  std::vector<std::size_t> best_average_rows() const {
    std::vector<std::string> models;
    std::map<std::string, std::size_t> best;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double m = row_mean(r);
      auto it = best.find(rows[r].model);
      if (it == best.end()) {
        models.push_back(rows[r].model);
        best.emplace(rows[r].model, r);
      } else if (!std::isnan(m) && (std::isnan(row_mean(it->second)) || m > row_mean(it->second))) {
        it->second = r;
      }
    }
    std::vector<std::size_t> out;
    for (const auto& m : models) out.push_back(best[m]);
    return out;
  }

  /// Sub-grid with the given rows, optionally relabelled.
  ScoreGrid select(std::span<const std::size_t> picked, std::span<const GridRow> relabel = {}) const {
    ScoreGrid g;
    g.columns = columns;
    for (std::size_t i = 0; i < picked.size(); ++i) {
      g.rows.push_back(relabel.empty() ? rows[picked[i]] : relabel[i]);
      for (std::size_t c = 0; c < columns.size(); ++c) g.cells.push_back(at(picked[i], c));
    }
    return g;
  }
};

/// Builds a grid over the declared rows and strategies; a missing cell is an error naming it.
inline ScoreGrid assemble_grid(std::span<const GridRow> rows, std::span<const PoolingStrategy> columns,
                               const std::map<CellKey, double>& cells) {
  if (rows.empty() || columns.empty()) throw Error("assemble_grid: empty grid");
  ScoreGrid g;
  g.rows.assign(rows.begin(), rows.end());
  g.columns.assign(columns.begin(), columns.end());
  for (const auto& row : rows)
    for (auto s : columns) {
      auto it = cells.find({row.label, s});
      if (it == cells.end())
        throw Error("assemble_grid: missing cell (" + row.label + ", " + std::string(strategy_column(s)) + ")");
      g.cells.push_back(it->second);
    }
  return g;
}

/// Summary grid: the best-average row of every model, labelled "model: config" where the model has a grid of configs.
inline ScoreGrid best_average_summary(const ScoreGrid& g) {
  const auto picked = g.best_average_rows();
  std::vector<GridRow> labels;
  for (auto r : picked) {
    const auto& row = g.rows[r];
    std::string label = row.label;
    if (label != row.model) {
      std::string inner = label;
      if (inner.size() >= 2 && inner.front() == '(' && inner.back() == ')') inner = inner.substr(1, inner.size() - 2);
      label = row.model + ": " + inner;
    }
    labels.push_back({row.model, label});
  }
  return g.select(picked, labels);
}

inline std::string format_score(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

/// CSV with 6-decimal cells; the trailing `best` column lists the row-maximum columns separated by ';'.
inline void write_grid_csv(const ScoreGrid& g, std::ostream& out) {
  if (g.rows.empty()) throw Error("write_grid_csv: empty grid");
  out << "config";
  for (auto s : g.columns) out << ',' << strategy_column(s);
  out << ",best\n";
  for (std::size_t r = 0; r < g.rows.size(); ++r) {
    const auto& label = g.rows[r].label;
    if (label.find_first_of(",\"") != std::string::npos)
      out << '"' << label << '"';
    else
      out << label;
    for (std::size_t c = 0; c < g.columns.size(); ++c) out << ',' << format_score(g.at(r, c));
    out << ',';
    const auto best = g.row_best(r);
    for (std::size_t i = 0; i < best.size(); ++i) out << (i ? ";" : "") << strategy_column(g.columns[best[i]]);
    out << '\n';
  }
}

/// Pipe-aligned markdown table; row maxima in bold.
inline void write_grid_markdown(const ScoreGrid& g, std::ostream& out) {
  if (g.rows.empty()) throw Error("write_grid_markdown: empty grid");
  const std::size_t ncol = g.columns.size() + 1;
  std::vector<std::vector<std::string>> text(g.rows.size() + 1, std::vector<std::string>(ncol));
  for (std::size_t c = 0; c < g.columns.size(); ++c) text[0][c + 1] = strategy_column(g.columns[c]);
  for (std::size_t r = 0; r < g.rows.size(); ++r) {
    text[r + 1][0] = g.rows[r].label;
    for (std::size_t c = 0; c < g.columns.size(); ++c) text[r + 1][c + 1] = format_score(g.at(r, c));
    for (auto c : g.row_best(r)) text[r + 1][c + 1] = "**" + text[r + 1][c + 1] + "**";
  }
  std::vector<std::size_t> width(ncol, 3);
  for (const auto& line : text)
    for (std::size_t c = 0; c < ncol; ++c) width[c] = std::max(width[c], line[c].size());
  auto emit = [&](const std::vector<std::string>& line) {
    out << '|';
    for (std::size_t c = 0; c < ncol; ++c) {
      const auto pad = std::string(width[c] - line[c].size(), ' ');
      out << ' ' << (c == 0 ? line[c] + pad : pad + line[c]) << " |";
    }
    out << '\n';
  };
  emit(text[0]);
  out << '|';
  for (std::size_t c = 0; c < ncol; ++c) out << (c == 0 ? ":" : "") << std::string(width[c] + 1, '-') << (c == 0 ? "" : ":") << '|';
  out << '\n';
  for (std::size_t r = 1; r < text.size(); ++r) emit(text[r]);
}

}  // namespace relvec
