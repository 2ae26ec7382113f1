#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "relvec/embeddings.hpp"
#include "relvec/error.hpp"

namespace relvec {

struct LabeledPair {
  std::string word_a;
  std::string word_b;
  std::string category;

  friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
  friend auto operator<=>(const LabeledPair&, const LabeledPair&) = default;
};

/// Category-labelled word pairs in file order. Categories are ordered by first appearance.
struct PairCorpus {
  std::vector<LabeledPair> pairs;
  std::vector<std::string> categories;
};

/// Parses the analogy question format (`: category` headers, `a b c d` lines).
/// Both halves of every question become pairs; repeats within a category are dropped.
inline PairCorpus read_analogy_corpus(std::istream& in, const std::string& source) {
  PairCorpus corpus;
  std::set<LabeledPair> seen;
  std::unordered_map<std::string, std::size_t> category_pairs;
  std::vector<std::string> header_order;
  std::string current;
  std::string line;
  std::size_t line_no = 0;

  auto add = [&](std::string_view a, std::string_view b) {
    LabeledPair p{to_lower(a), to_lower(b), current};
    if (p.word_a == p.word_b) throw ParseError(source, line_no, "pair with identical words '" + p.word_a + "'");
    if (seen.insert(p).second) {
      ++category_pairs[current];
      corpus.pairs.push_back(std::move(p));
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields[0].front() == ':') {
      std::string name;
      std::string_view first = fields[0].substr(1);
      if (!first.empty()) name = std::string(first);
      for (std::size_t i = 1; i < fields.size(); ++i) {
        if (!name.empty()) name += ' ';
        name += fields[i];
      }
      if (name.empty()) throw ParseError(source, line_no, "empty category header");
      current = name;
      if (!category_pairs.contains(current)) {
        category_pairs[current] = 0;
        header_order.push_back(current);
      }
      continue;
    }
    if (current.empty()) throw ParseError(source, line_no, "data line before any category header");
    if (fields.size() != 4)
      throw ParseError(source, line_no, "expected 4 words, found " + std::to_string(fields.size()));
    add(fields[0], fields[1]);
    add(fields[2], fields[3]);
  }
  for (const auto& name : header_order)
    if (category_pairs[name] > 0) corpus.categories.push_back(name);
  return corpus;
}

inline PairCorpus parse_analogy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open analogy file: " + path);
  return read_analogy_corpus(in, path);
}

struct ResolvedPair {
  LabeledPair pair;
  WordVector a;
  WordVector b;
};

struct CategoryCount {
  std::string category;
  std::size_t kept = 0;
  std::size_t dropped = 0;
};

struct Resolution {
  std::vector<ResolvedPair> resolved;
  std::vector<CategoryCount> report;  // one entry per corpus category, corpus order

  std::size_t total_dropped() const {
    std::size_t n = 0;
    for (const auto& c : report) n += c.dropped;
    return n;
  }
};

/// Keeps pairs whose two words are both in the table. A category that loses every pair is an error.
inline Resolution resolve_pairs(const PairCorpus& corpus, const EmbeddingTable& table) {
  Resolution out;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& name : corpus.categories) {
    slot[name] = out.report.size();
    out.report.push_back({name, 0, 0});
  }
  for (const auto& p : corpus.pairs) {
    auto it = slot.find(p.category);
    if (it == slot.end()) throw Error("pair category '" + p.category + "' not declared in corpus");
    auto& counts = out.report[it->second];
    auto a = table.lookup(p.word_a);
    auto b = a ? table.lookup(p.word_b) : std::nullopt;
    if (!a || !b) {
      ++counts.dropped;
      continue;
    }
    ++counts.kept;
    out.resolved.push_back({p, std::move(*a), std::move(*b)});
  }
  for (const auto& c : out.report)
    if (c.kept == 0)
      throw Error("category '" + c.category + "' has no pair with both words in the vocabulary (" +
                  std::to_string(c.dropped) + " dropped)");
  return out;
}

inline void write_drop_report(const Resolution& r, std::ostream& out) {
  out << "category,kept,dropped\n";
  for (const auto& c : r.report) out << c.category << ',' << c.kept << ',' << c.dropped << '\n';
}

}  // namespace relvec
