#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relvec/embeddings.hpp"
#include "relvec/error.hpp"
#include "relvec/matrix.hpp"
#include "relvec/pair_corpus.hpp"

namespace relvec {

/// Componentwise reduction of an ordered word-vector pair to a relation vector.
enum class PoolingStrategy { subtract, abs_subtract, add, min, max, mean };

/// Report column order: X_subs, X_add, X_abs, X_min, X_max, X_mean.
inline constexpr std::array<PoolingStrategy, 6> kAllStrategies = {
    PoolingStrategy::subtract, PoolingStrategy::add, PoolingStrategy::abs_subtract,
    PoolingStrategy::min,      PoolingStrategy::max, PoolingStrategy::mean};

inline std::string_view strategy_name(PoolingStrategy s) {
  switch (s) {
    case PoolingStrategy::subtract: return "subtract";
    case PoolingStrategy::abs_subtract: return "abs_subtract";
    case PoolingStrategy::add: return "add";
    case PoolingStrategy::min: return "min";
    case PoolingStrategy::max: return "max";
    case PoolingStrategy::mean: return "mean";
  }
  return "?";
}

inline std::string_view strategy_column(PoolingStrategy s) {
  switch (s) {
    case PoolingStrategy::subtract: return "X_subs";
    case PoolingStrategy::abs_subtract: return "X_abs";
    case PoolingStrategy::add: return "X_add";
    case PoolingStrategy::min: return "X_min";
    case PoolingStrategy::max: return "X_max";
    case PoolingStrategy::mean: return "X_mean";
  }
  return "?";
}

/// Accepts the canonical name or the column label (`subtract`, `X_subs`, `subs`, `abs`, ...).
inline PoolingStrategy parse_strategy(std::string_view text) {
  const std::string s = to_lower(text);
  static const std::unordered_map<std::string, PoolingStrategy> names = {
      {"subtract", PoolingStrategy::subtract}, {"subs", PoolingStrategy::subtract},
      {"x_subs", PoolingStrategy::subtract},   {"abs_subtract", PoolingStrategy::abs_subtract},
      {"abs", PoolingStrategy::abs_subtract},  {"x_abs", PoolingStrategy::abs_subtract},
      {"add", PoolingStrategy::add},           {"x_add", PoolingStrategy::add},
      {"min", PoolingStrategy::min},           {"x_min", PoolingStrategy::min},
      {"max", PoolingStrategy::max},           {"x_max", PoolingStrategy::max},
      {"mean", PoolingStrategy::mean},         {"x_mean", PoolingStrategy::mean},
  };
  auto it = names.find(s);
  if (it == names.end()) throw Error("unknown pooling strategy '" + std::string(text) + "'");
  return it->second;
}

inline void pool_into(PoolingStrategy strategy, std::span<const double> v1, std::span<const double> v2,
                      std::span<double> out) {
  if (v1.size() != v2.size())
    throw Error("pool: dimension mismatch (" + std::to_string(v1.size()) + " vs " +
                std::to_string(v2.size()) + ")");
  if (out.size() != v1.size()) throw Error("pool: output has wrong dimension");
  const std::size_t n = v1.size();
  switch (strategy) {
    case PoolingStrategy::subtract:
      for (std::size_t i = 0; i < n; ++i) out[i] = v1[i] - v2[i];
      break;
    case PoolingStrategy::abs_subtract:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(v1[i] - v2[i]);
      break;
    case PoolingStrategy::add:
      for (std::size_t i = 0; i < n; ++i) out[i] = v1[i] + v2[i];
      break;
    case PoolingStrategy::min:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::min(v1[i], v2[i]);
      break;
    case PoolingStrategy::max:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::max(v1[i], v2[i]);
      break;
    case PoolingStrategy::mean:
      for (std::size_t i = 0; i < n; ++i) out[i] = (v1[i] + v2[i]) * 0.5;
      break;
  }
}

inline std::vector<double> pool(PoolingStrategy strategy, std::span<const double> v1,
                                std::span<const double> v2) {
  std::vector<double> out(v1.size());
  pool_into(strategy, v1, v2, out);
  return out;
}

inline std::vector<double> pool(PoolingStrategy strategy, const WordVector& v1, const WordVector& v2) {
  return pool(strategy, v1.components, v2.components);
}

/// Pooled relation vectors, row-aligned with their source pairs and category labels.
struct RelationDataset {
  PoolingStrategy strategy = PoolingStrategy::subtract;
  Matrix vectors;
  std::vector<LabeledPair> sources;
  std::vector<int> labels;              // index into `categories`
  std::vector<std::string> categories;  // label -> name

  std::size_t size() const noexcept { return vectors.rows(); }
};

/// Category index per row, with categories numbered by first appearance.
inline std::vector<int> label_rows(std::span<const LabeledPair> pairs, std::vector<std::string>& categories) {
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < categories.size(); ++i) index.emplace(categories[i], static_cast<int>(i));
  std::vector<int> labels;
  labels.reserve(pairs.size());
  for (const auto& p : pairs) {
    auto [it, inserted] = index.emplace(p.category, static_cast<int>(categories.size()));
    if (inserted) categories.push_back(p.category);
    labels.push_back(it->second);
  }
  return labels;
}

inline RelationDataset pool_dataset(PoolingStrategy strategy, std::span<const ResolvedPair> resolved) {
  if (resolved.empty()) throw Error("pool_dataset: no resolved pairs");
  const std::size_t dim = resolved.front().a.components.size();
  RelationDataset ds;
  ds.strategy = strategy;
  ds.vectors = Matrix(resolved.size(), dim);
  ds.sources.reserve(resolved.size());
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    pool_into(strategy, resolved[i].a.components, resolved[i].b.components, ds.vectors.row(i));
    ds.sources.push_back(resolved[i].pair);
  }
  ds.labels = label_rows(ds.sources, ds.categories);
  return ds;
}

inline void write_relation_csv(const RelationDataset& ds, std::ostream& out) {
  out << "category,word_a,word_b";
  for (std::size_t c = 0; c < ds.vectors.cols(); ++c) out << ",c" << (c + 1);
  out << '\n';
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const auto& s = ds.sources[r];
    out << s.category << ',' << s.word_a << ',' << s.word_b;
    for (double v : ds.vectors.row(r)) out << ',' << format_double(v);
    out << '\n';
  }
}

/// Reads the CSV produced by write_relation_csv. The strategy is not stored in the file.
inline RelationDataset read_relation_csv(std::istream& in, const std::string& source) {
  RelationDataset ds;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (width == 0) {
      if (fields.size() < 4 || fields[0] != "category" || fields[1] != "word_a" || fields[2] != "word_b")
        throw ParseError(source, line_no, "expected header 'category,word_a,word_b,c1..'");
      width = fields.size();
      continue;
    }
    if (fields.size() != width)
      throw ParseError(source, line_no,
                       "expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    values.resize(width - 3);
    for (std::size_t i = 3; i < width; ++i) {
      auto v = parse_double(fields[i]);
      if (!v || !std::isfinite(*v)) throw ParseError(source, line_no, "bad component '" + std::string(fields[i]) + "'");
      values[i - 3] = *v;
    }
    ds.vectors.append_row(values);
    ds.sources.push_back({std::string(fields[1]), std::string(fields[2]), std::string(fields[0])});
  }
  if (ds.sources.empty()) throw Error(source + ": no relation rows");
  ds.labels = label_rows(ds.sources, ds.categories);
  return ds;
}

}  // namespace relvec
