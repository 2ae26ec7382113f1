#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relvec/error.hpp"
#include "relvec/matrix.hpp"

namespace relvec {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>((c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c);
  });
  return out;
}

/// Splits on runs of ASCII spaces/tabs; strips a trailing '\r'.
inline std::vector<std::string_view> split_fields(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct WordVector {
  std::string token;
  std::vector<double> components;
};

/// Immutable token -> vector map with a fixed dimensionality.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  std::size_t dim() const noexcept { return vectors_.cols(); }
  std::size_t size() const noexcept { return tokens_.size(); }
  /// Lines whose (lowercased) token was already present; the first occurrence is kept.
  std::size_t duplicate_count() const noexcept { return duplicates_; }

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::span<const double> vector_at(std::size_t index) const { return vectors_.row(index); }

  bool contains(std::string_view token) const { return index_.contains(to_lower(token)); }

  /// Case-insensitive lookup; absent words yield std::nullopt.
  std::optional<WordVector> lookup(std::string_view token) const {
    auto key = to_lower(token);
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    auto row = vectors_.row(it->second);
    return WordVector{std::move(key), std::vector<double>(row.begin(), row.end())};
  }

  class Builder;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  Matrix vectors_;
  std::size_t duplicates_ = 0;
};

class EmbeddingTable::Builder {
 public:
  /// Returns false (and counts a duplicate) if the token is already present.
  bool add(std::string_view token, std::span<const double> components) {
    auto key = to_lower(token);
    if (table_.index_.contains(key)) {
      ++table_.duplicates_;
      return false;
    }
    if (!table_.tokens_.empty() && components.size() != table_.dim())
      throw Error("embedding '" + key + "' has " + std::to_string(components.size()) +
                  " components, expected " + std::to_string(table_.dim()));
    for (double c : components)
      if (!std::isfinite(c)) throw Error("embedding '" + key + "' has a non-finite component");
    table_.index_.emplace(key, table_.tokens_.size());
    table_.tokens_.push_back(std::move(key));
    table_.vectors_.append_row(components);
    return true;
  }

  EmbeddingTable build() && { return std::move(table_); }

 private:
  EmbeddingTable table_;
};

/// Reads the GloVe text format: `token c1 ... cd` per line, no header.
inline EmbeddingTable read_embeddings(std::istream& in, const std::string& source,
                                      std::optional<std::size_t> expected_dim = std::nullopt) {
  if (expected_dim && *expected_dim == 0) throw Error("expected_dim must be positive");
  EmbeddingTable::Builder builder;
  std::optional<std::size_t> dim = expected_dim;
  std::string line;
  std::vector<double> values;
  std::size_t line_no = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) throw ParseError(source, line_no, "expected a token followed by components");
    const std::size_t n = fields.size() - 1;
    if (!dim) dim = n;
    if (n != *dim)
      throw ParseError(source, line_no,
                       "expected " + std::to_string(*dim) + " components, found " + std::to_string(n));
    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto v = parse_double(fields[i + 1]);
      if (!v) throw ParseError(source, line_no, "unparsable component '" + std::string(fields[i + 1]) + "'");
      if (!std::isfinite(*v)) throw ParseError(source, line_no, "non-finite component");
      values[i] = *v;
    }
    builder.add(fields[0], values);
    any = true;
  }
  if (!any) throw Error(source + ": empty embeddings file");
  return std::move(builder).build();
}

inline EmbeddingTable load_embeddings(const std::string& path,
                                      std::optional<std::size_t> expected_dim = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embeddings file: " + path);
  return read_embeddings(in, path, expected_dim);
}

inline void write_embeddings(const EmbeddingTable& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.tokens()[i];
    for (double c : table.vector_at(i)) out << ' ' << format_double(c);
    out << '\n';
  }
}

}  // namespace relvec
