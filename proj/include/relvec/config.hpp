#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "relvec/agglomerative.hpp"
#include "relvec/dbscan.hpp"
#include "relvec/embeddings.hpp"
#include "relvec/error.hpp"
#include "relvec/gmm.hpp"
#include "relvec/kmeans.hpp"
#include "relvec/pooling.hpp"

namespace relvec {

/// Flat `section.key -> values` view of a TOML-style document:
/// `[section]` headers, `key = value` lines, `#` comments, `[a, b]` arrays, optional double quotes.
/// The `[manifest]` section is run metadata and is skipped.
class KeyValueDocument {
 public:
  static KeyValueDocument parse(std::istream& in, const std::string& source) {
    KeyValueDocument doc;
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view v = strip(strip_comment(line));
      if (v.empty()) continue;
      if (v.front() == '[' && v.back() == ']' && v.find('=') == std::string_view::npos) {
        section = std::string(strip(v.substr(1, v.size() - 2)));
        if (section.empty()) throw ParseError(source, line_no, "empty section name");
        continue;
      }
      if (section == "manifest") continue;
      const auto eq = v.find('=');
      if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected 'key = value'");
      const std::string key = std::string(strip(v.substr(0, eq)));
      if (key.empty()) throw ParseError(source, line_no, "empty key");
      const std::string full = section.empty() ? key : section + "." + key;
      std::string_view raw = strip(v.substr(eq + 1));
      std::vector<std::string> values;
      if (!raw.empty() && raw.front() == '[') {
        if (raw.back() != ']') throw ParseError(source, line_no, "unterminated array");
        std::string_view body = raw.substr(1, raw.size() - 2);
        std::size_t start = 0;
        bool quoted = false;
        for (std::size_t i = 0; i <= body.size(); ++i) {
          if (i < body.size() && body[i] == '"') quoted = !quoted;
          if (i == body.size() || (body[i] == ',' && !quoted)) {
            auto item = strip(body.substr(start, i - start));
            if (!item.empty()) values.push_back(unquote(item, source, line_no));
            start = i + 1;
          }
        }
      } else {
        values.push_back(unquote(raw, source, line_no));
      }
      if (doc.entries_.contains(full)) throw ParseError(source, line_no, "duplicate key '" + full + "'");
      doc.entries_[full] = Entry{std::move(values), line_no};
    }
    return doc;
  }

  bool has(const std::string& key) const { return entries_.contains(key); }

  const std::vector<std::string>& list(const std::string& key) const { return entries_.at(key).values; }

  std::string scalar(const std::string& key) const {
    const auto& e = entries_.at(key);
    if (e.values.size() != 1) throw Error("config key '" + key + "' expects a single value");
    return e.values.front();
  }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : entries_) out.push_back(k);
    return out;
  }

 private:
  struct Entry {
    std::vector<std::string> values;
    std::size_t line = 0;
  };

  static std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  }

  static std::string_view strip_comment(std::string_view s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
  }

  static std::string unquote(std::string_view s, const std::string& source, std::size_t line) {
    if (!s.empty() && s.front() == '"') {
      if (s.size() < 2 || s.back() != '"') throw ParseError(source, line, "unterminated string");
      return std::string(s.substr(1, s.size() - 2));
    }
    return std::string(s);
  }

  std::map<std::string, Entry> entries_;
};

struct AgglomerativeSpec {
  Linkage linkage = Linkage::ward;
  DistanceMetric metric = DistanceMetric::euclidean;
};

struct DbscanSpec {
  DistanceMetric metric = DistanceMetric::euclidean;
  double eps = 0.5;
};

inline std::string format_eps(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", eps);
  if (std::strtod(buf, nullptr) == eps) return buf;
  return format_double(eps);
}

inline std::string agglomerative_label(const AgglomerativeSpec& s) {
  return "(" + std::string(linkage_name(s.linkage)) + ", " + std::string(metric_name(s.metric)) + ")";
}

inline std::string dbscan_label(const DbscanSpec& s) {
  return "(" + std::string(metric_name(s.metric)) + ", " + format_eps(s.eps) + ")";
}

/// The sixteen (linkage, metric) rows of the agglomerative table, in report order.
inline std::vector<AgglomerativeSpec> default_agglomerative_grid() {
  std::vector<AgglomerativeSpec> g{{Linkage::ward, DistanceMetric::euclidean}};
  for (auto m : {DistanceMetric::euclidean, DistanceMetric::cosine, DistanceMetric::manhattan, DistanceMetric::l1,
                 DistanceMetric::l2})
    for (auto l : {Linkage::single, Linkage::complete, Linkage::average}) g.push_back({l, m});
  return g;
}

inline std::vector<DbscanSpec> default_dbscan_grid() {
  return {{DistanceMetric::euclidean, 0.50},
          {DistanceMetric::cosine, 0.25},
          {DistanceMetric::cosine, 0.30},
          {DistanceMetric::cosine, 0.50},
          {DistanceMetric::manhattan, 0.50}};
}

enum class Model { kmeans, gmm, agglomerative, dbscan };

inline std::string_view model_name(Model m) {
  switch (m) {
    case Model::kmeans: return "kmeans";
    case Model::gmm: return "gmm";
    case Model::agglomerative: return "agglomerative";
    case Model::dbscan: return "dbscan";
  }
  return "?";
}

inline Model parse_model(std::string_view s) {
  const auto t = to_lower(s);
  if (t == "kmeans" || t == "kmean" || t == "k-means") return Model::kmeans;
  if (t == "gmm") return Model::gmm;
  if (t == "agglomerative") return Model::agglomerative;
  if (t == "dbscan") return Model::dbscan;
  throw Error("unknown model '" + std::string(s) + "'");
}

/// Every setting of a grid run. k = 0 means "number of categories that survive vocabulary resolution".
struct ExperimentConfig {
  std::string embeddings_path;
  std::string corpus_path;
  std::string output_dir = "results";
  std::optional<std::size_t> expected_dim;
  std::uint64_t seed = 0;
  int workers = 1;          // concurrent grid cells
  int restart_workers = 1;  // concurrent restarts inside one k-means / GMM cell
  bool keep_going = false;
  bool export_vectors = false;  // also write pooled vectors and their 2-d projection per strategy
  std::vector<Model> models = {Model::kmeans, Model::gmm, Model::agglomerative, Model::dbscan};
  std::vector<PoolingStrategy> strategies = std::vector<PoolingStrategy>(kAllStrategies.begin(), kAllStrategies.end());

  int kmeans_k = 0;
  int kmeans_restarts = 10;
  int kmeans_max_iter = 300;
  double kmeans_tol = 1e-6;

  int gmm_k = 0;
  int gmm_restarts = 1;
  int gmm_max_iter = 100;
  double gmm_tol = 1e-3;
  double gmm_reg_covar = 1e-6;
  CovarianceType gmm_covariance = CovarianceType::full;

  int agglomerative_k = 0;
  std::vector<AgglomerativeSpec> agglomerative = default_agglomerative_grid();

  int dbscan_min_points = 5;
  bool dbscan_exclude_noise = false;
  std::vector<DbscanSpec> dbscan = default_dbscan_grid();

  void validate() const {
    if (embeddings_path.empty()) throw Error("config: embeddings path is empty");
    if (corpus_path.empty()) throw Error("config: corpus path is empty");
    if (output_dir.empty()) throw Error("config: output directory is empty");
    if (models.empty()) throw Error("config: no models selected");
    if (strategies.empty()) throw Error("config: no pooling strategies selected");
    for (std::size_t i = 0; i < strategies.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (strategies[i] == strategies[j])
          throw Error("config: strategy '" + std::string(strategy_name(strategies[i])) + "' listed twice");
    for (std::size_t i = 0; i < models.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (models[i] == models[j]) throw Error("config: model '" + std::string(model_name(models[i])) + "' listed twice");
    auto has = [&](Model m) { return std::find(models.begin(), models.end(), m) != models.end(); };
    if (has(Model::agglomerative) && agglomerative.empty()) throw Error("config: agglomerative grid is empty");
    if (has(Model::dbscan) && dbscan.empty()) throw Error("config: dbscan grid is empty");
    for (const auto& a : agglomerative)
      if (a.linkage == Linkage::ward && !is_euclidean(a.metric))
        throw Error("config: ward linkage requires the euclidean metric");
    for (const auto& d : dbscan)
      if (!(d.eps > 0.0) || !std::isfinite(d.eps)) throw Error("config: dbscan eps must be positive and finite");
    if (kmeans_k < 0 || gmm_k < 0 || agglomerative_k < 0) throw Error("config: k must be >= 0");
    if (dbscan_min_points <= 0) throw Error("config: dbscan min_points must be positive");
    if (gmm_reg_covar < 0.0) throw Error("config: gmm reg_covar must be >= 0");
  }
};

namespace detail {

inline long long parse_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw Error("config key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
  auto d = parse_double(v);
  if (!d) throw Error("config key '" + key + "': expected a number, got '" + v + "'");
  return *d;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  const auto t = to_lower(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw Error("config key '" + key + "': expected true/false, got '" + v + "'");
}

inline std::pair<std::string, std::string> split_pair(const std::string& key, const std::string& v) {
  const auto colon = v.find(':');
  if (colon == std::string::npos) throw Error("config key '" + key + "': expected 'a:b', got '" + v + "'");
  return {v.substr(0, colon), v.substr(colon + 1)};
}

}  // namespace detail

/// Applies a parsed document on top of `base`. Unknown keys are errors.
inline ExperimentConfig apply_config(const KeyValueDocument& doc, ExperimentConfig base = {}) {
  using namespace detail;
  ExperimentConfig c = std::move(base);
  for (const auto& key : doc.keys()) {
    auto s = [&] { return doc.scalar(key); };
    auto i = [&] { return static_cast<int>(parse_int(key, s())); };
    auto r = [&] { return parse_real(key, s()); };
    auto b = [&] { return parse_bool(key, s()); };
    if (key == "embeddings") c.embeddings_path = s();
    else if (key == "corpus") c.corpus_path = s();
    else if (key == "output") c.output_dir = s();
    else if (key == "dim") {
      const auto d = parse_int(key, s());
      if (d < 0) throw Error("config key 'dim' must be >= 0");
      c.expected_dim = d == 0 ? std::nullopt : std::optional<std::size_t>(static_cast<std::size_t>(d));
    } else if (key == "seed") {
      const auto v = parse_int(key, s());
      if (v < 0) throw Error("config key 'seed' must be >= 0");
      c.seed = static_cast<std::uint64_t>(v);
    } else if (key == "workers") c.workers = i();
    else if (key == "restart_workers") c.restart_workers = i();
    else if (key == "keep_going") c.keep_going = b();
    else if (key == "export_vectors") c.export_vectors = b();
    else if (key == "models") {
      c.models.clear();
      for (const auto& v : doc.list(key)) c.models.push_back(parse_model(v));
    } else if (key == "strategies") {
      c.strategies.clear();
      for (const auto& v : doc.list(key)) c.strategies.push_back(parse_strategy(v));
    } else if (key == "kmeans.k") c.kmeans_k = i();
    else if (key == "kmeans.restarts") c.kmeans_restarts = i();
    else if (key == "kmeans.max_iter") c.kmeans_max_iter = i();
    else if (key == "kmeans.tol") c.kmeans_tol = r();
    else if (key == "gmm.k") c.gmm_k = i();
    else if (key == "gmm.restarts") c.gmm_restarts = i();
    else if (key == "gmm.max_iter") c.gmm_max_iter = i();
    else if (key == "gmm.tol") c.gmm_tol = r();
    else if (key == "gmm.reg_covar") c.gmm_reg_covar = r();
    else if (key == "gmm.covariance") {
      const auto v = to_lower(s());
      if (v == "full") c.gmm_covariance = CovarianceType::full;
      else if (v == "diagonal" || v == "diag") c.gmm_covariance = CovarianceType::diagonal;
      else throw Error("config key 'gmm.covariance': expected full or diagonal, got '" + v + "'");
    } else if (key == "agglomerative.k") c.agglomerative_k = i();
    else if (key == "agglomerative.configs") {
      c.agglomerative.clear();
      for (const auto& v : doc.list(key)) {
        auto [l, m] = split_pair(key, v);
        c.agglomerative.push_back({parse_linkage(l), parse_metric(m)});
      }
    } else if (key == "dbscan.min_points") c.dbscan_min_points = i();
    else if (key == "dbscan.exclude_noise") c.dbscan_exclude_noise = b();
    else if (key == "dbscan.configs") {
      c.dbscan.clear();
      for (const auto& v : doc.list(key)) {
        auto [m, e] = split_pair(key, v);
        c.dbscan.push_back({parse_metric(m), parse_real(key, e)});
      }
    } else {
      throw Error("unknown config key '" + key + "'");
    }
  }
  return c;
}

inline ExperimentConfig parse_config(std::istream& in, const std::string& source, ExperimentConfig base = {}) {
  return apply_config(KeyValueDocument::parse(in, source), std::move(base));
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  return parse_config(in, path, std::move(base));
}

/// Serialises every setting; parse_config(to_config_text(c)) reproduces c.
inline std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream o;
  auto q = [](const std::string& s) { return "\"" + s + "\""; };
  auto b = [](bool v) { return v ? "true" : "false"; };
  o << "embeddings = " << q(c.embeddings_path) << '\n';
  o << "corpus = " << q(c.corpus_path) << '\n';
  o << "output = " << q(c.output_dir) << '\n';
  o << "dim = " << (c.expected_dim ? *c.expected_dim : 0) << '\n';
  o << "seed = " << c.seed << '\n';
  o << "workers = " << c.workers << '\n';
  o << "restart_workers = " << c.restart_workers << '\n';
  o << "keep_going = " << b(c.keep_going) << '\n';
  o << "export_vectors = " << b(c.export_vectors) << '\n';
  o << "models = [";
  for (std::size_t i = 0; i < c.models.size(); ++i) o << (i ? ", " : "") << q(std::string(model_name(c.models[i])));
  o << "]\n";
  o << "strategies = [";
  for (std::size_t i = 0; i < c.strategies.size(); ++i)
    o << (i ? ", " : "") << q(std::string(strategy_name(c.strategies[i])));
  o << "]\n\n[kmeans]\n";
  o << "k = " << c.kmeans_k << "\nrestarts = " << c.kmeans_restarts << "\nmax_iter = " << c.kmeans_max_iter
    << "\ntol = " << format_double(c.kmeans_tol) << "\n\n[gmm]\n";
  o << "k = " << c.gmm_k << "\nrestarts = " << c.gmm_restarts << "\nmax_iter = " << c.gmm_max_iter
    << "\ntol = " << format_double(c.gmm_tol) << "\nreg_covar = " << format_double(c.gmm_reg_covar)
    << "\ncovariance = " << (c.gmm_covariance == CovarianceType::full ? "\"full\"" : "\"diagonal\"")
    << "\n\n[agglomerative]\n";
  o << "k = " << c.agglomerative_k << "\nconfigs = [";
  for (std::size_t i = 0; i < c.agglomerative.size(); ++i)
    o << (i ? ", " : "") << '"' << linkage_name(c.agglomerative[i].linkage) << ':'
      << metric_name(c.agglomerative[i].metric) << '"';
  o << "]\n\n[dbscan]\n";
  o << "min_points = " << c.dbscan_min_points << "\nexclude_noise = " << b(c.dbscan_exclude_noise)
    << "\nconfigs = [";
  for (std::size_t i = 0; i < c.dbscan.size(); ++i)
    o << (i ? ", " : "") << '"' << metric_name(c.dbscan[i].metric) << ':' << format_double(c.dbscan[i].eps) << '"';
  o << "]\n";
  return o.str();
}

}  // namespace relvec
