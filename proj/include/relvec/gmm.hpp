#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "relvec/clustering_result.hpp"
#include "relvec/error.hpp"
#include "relvec/kmeans.hpp"
#include "relvec/linalg.hpp"
#include "relvec/matrix.hpp"
#include "relvec/parallel.hpp"

namespace relvec {

enum class CovarianceType { full, diagonal };

struct GmmConfig {
  int k = 14;
  int max_iter = 100;
  double tol = 1e-3;         // on the change of mean per-sample log-likelihood
  double reg_covar = 1e-6;   // added to every covariance diagonal
  CovarianceType covariance = CovarianceType::full;
  std::uint64_t seed = 0;
  int n_restarts = 1;
  int workers = 1;
};

/// Mixture parameters. For full covariance `factors[c]` holds the lower Cholesky factor;
/// for diagonal covariance it is a 1 x d row of variances.
struct GmmModel {
  CovarianceType covariance = CovarianceType::full;
  std::vector<double> weights;
  Matrix means;
  std::vector<Matrix> covariances;
  std::vector<Matrix> factors;
};

struct GmmRun {
  GmmModel model;
  std::vector<double> log_likelihood_trace;  // mean per-sample log-likelihood, one entry per E-step
  std::vector<int> labels;
  int iterations = 0;
  bool converged = false;

  double log_likelihood() const {
    return log_likelihood_trace.empty() ? -std::numeric_limits<double>::infinity() : log_likelihood_trace.back();
  }
};

namespace detail {

inline constexpr double kTiny = 10.0 * std::numeric_limits<double>::epsilon();

/// M-step from a responsibility matrix (n x k).
inline GmmModel gmm_maximize(const Matrix& x, const Matrix& resp, CovarianceType cov, double reg) {
  const std::size_t n = x.rows(), d = x.cols(), k = resp.cols();
  GmmModel m;
  m.covariance = cov;
  m.weights.assign(k, 0.0);
  m.means = Matrix(k, d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < k; ++c) {
      const double r = resp(i, c);
      if (r == 0.0) continue;
      m.weights[c] += r;
      auto mu = m.means.row(c);
      auto xi = x.row(i);
      for (std::size_t j = 0; j < d; ++j) mu[j] += r * xi[j];
    }
  std::vector<double> nk(k);
  for (std::size_t c = 0; c < k; ++c) {
    nk[c] = m.weights[c] + kTiny;
    for (double& v : m.means.row(c)) v /= nk[c];
    m.weights[c] = nk[c] / static_cast<double>(n);
  }

  std::vector<double> diff(d);
  for (std::size_t c = 0; c < k; ++c) {
    auto mu = m.means.row(c);
    Matrix s = cov == CovarianceType::full ? Matrix(d, d, 0.0) : Matrix(1, d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = resp(i, c);
      if (r == 0.0) continue;
      auto xi = x.row(i);
      for (std::size_t j = 0; j < d; ++j) diff[j] = xi[j] - mu[j];
      if (cov == CovarianceType::full) {
        for (std::size_t a = 0; a < d; ++a) {
          const double ra = r * diff[a];
          auto srow = s.row(a);
          for (std::size_t b = 0; b <= a; ++b) srow[b] += ra * diff[b];
        }
      } else {
        for (std::size_t j = 0; j < d; ++j) s(0, j) += r * diff[j] * diff[j];
      }
    }
    if (cov == CovarianceType::full) {
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b <= a; ++b) s(a, b) /= nk[c];
        s(a, a) += reg;
        for (std::size_t b = 0; b < a; ++b) s(b, a) = s(a, b);
      }
      Matrix l = s;
      if (!cholesky_lower(l))
        throw Error("gmm: covariance of component " + std::to_string(c) +
                    " is singular despite reg_covar; increase reg_covar or use diagonal covariance");
      m.covariances.push_back(std::move(s));
      m.factors.push_back(std::move(l));
    } else {
      for (std::size_t j = 0; j < d; ++j) {
        s(0, j) = s(0, j) / nk[c] + reg;
        if (!(s(0, j) > 0.0))
          throw Error("gmm: variance of component " + std::to_string(c) + " is not positive");
      }
      m.covariances.push_back(s);
      m.factors.push_back(std::move(s));
    }
  }
  return m;
}

/// Per-row log(w_c N(x | mu_c, Sigma_c)).
inline Matrix gmm_weighted_log_prob(const GmmModel& m, const Matrix& x) {
  const std::size_t n = x.rows(), d = x.cols(), k = m.weights.size();
  const double log2pi = std::log(2.0 * std::numbers::pi);
  std::vector<double> log_norm(k);
  for (std::size_t c = 0; c < k; ++c) {
    double half_log_det = 0.0;
    if (m.covariance == CovarianceType::full) {
      for (std::size_t j = 0; j < d; ++j) half_log_det += std::log(m.factors[c](j, j));
    } else {
      for (std::size_t j = 0; j < d; ++j) half_log_det += 0.5 * std::log(m.factors[c](0, j));
    }
    log_norm[c] = std::log(m.weights[c]) - 0.5 * static_cast<double>(d) * log2pi - half_log_det;
  }
  Matrix out(n, k);
  std::vector<double> y(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t c = 0; c < k; ++c) {
      auto mu = m.means.row(c);
      double maha = 0.0;
      if (m.covariance == CovarianceType::full) {
        for (std::size_t j = 0; j < d; ++j) y[j] = xi[j] - mu[j];
        forward_substitute(m.factors[c], y);
        for (double v : y) maha += v * v;
      } else {
        for (std::size_t j = 0; j < d; ++j) {
          const double t = xi[j] - mu[j];
          maha += t * t / m.factors[c](0, j);
        }
      }
      out(i, c) = log_norm[c] - 0.5 * maha;
    }
  }
  return out;
}

}  // namespace detail

/// E-step: responsibilities (rows sum to one) and the mean per-sample log-likelihood.
inline Matrix gmm_responsibilities(const GmmModel& m, const Matrix& x, double* mean_log_likelihood = nullptr) {
  Matrix lp = detail::gmm_weighted_log_prob(m, x);
  const std::size_t n = lp.rows(), k = lp.cols();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = lp.row(i);
    const double top = *std::max_element(row.begin(), row.end());
    double s = 0.0;
    for (double v : row) s += std::exp(v - top);
    const double lse = top + std::log(s);
    total += lse;
    for (std::size_t c = 0; c < k; ++c) row[c] = std::exp(row[c] - lse);
  }
  if (mean_log_likelihood) *mean_log_likelihood = total / static_cast<double>(n);
  return lp;
}

/// EM from hard initial labels (values in 0..k-1).
inline GmmRun gmm_em(const GmmConfig& cfg, const Matrix& x, const std::vector<int>& init_labels) {
  const std::size_t n = x.rows(), k = static_cast<std::size_t>(cfg.k);
  Matrix resp(n, k, 0.0);
  for (std::size_t i = 0; i < n; ++i) resp(i, static_cast<std::size_t>(init_labels[i])) = 1.0;

  GmmRun run;
  run.model = detail::gmm_maximize(x, resp, cfg.covariance, cfg.reg_covar);
  double prev = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_iter; ++it) {
    double ll = 0.0;
    resp = gmm_responsibilities(run.model, x, &ll);
    run.log_likelihood_trace.push_back(ll);
    ++run.iterations;
    if (std::fabs(ll - prev) < cfg.tol) {
      run.converged = true;
      break;
    }
    prev = ll;
    run.model = detail::gmm_maximize(x, resp, cfg.covariance, cfg.reg_covar);
  }
  if (!run.converged) {
    // Score and label the parameters produced by the last M-step.
    double ll = 0.0;
    resp = gmm_responsibilities(run.model, x, &ll);
    run.log_likelihood_trace.push_back(ll);
  }
  run.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = resp.row(i);
    run.labels[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return run;
}

/// k-means-initialised EM; restart r seeds its k-means with seed + r. Best restart by final log-likelihood.
inline ClusteringResult gmm_fit(const GmmConfig& cfg, const Matrix& x) {
  detail::check_k(cfg.k, x.rows(), "gmm");
  const int restarts = std::max(1, cfg.n_restarts);
  std::vector<GmmRun> runs(static_cast<std::size_t>(restarts));
  parallel_for(runs.size(), cfg.workers, [&](std::size_t r) {
    const auto init = kmeans_single(x, cfg.k, 300, 1e-6, cfg.seed + r);
    runs[r] = gmm_em(cfg, x, init.labels);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].log_likelihood() > runs[best].log_likelihood()) best = r;

  ClusteringResult out;
  out.assignments = runs[best].labels;
  out.n_clusters = relabel_by_first_occurrence(out.assignments);
  auto& d = out.diagnostics;
  d.values["log_likelihood"] = runs[best].log_likelihood();
  d.values["iterations"] = runs[best].iterations;
  d.values["converged"] = runs[best].converged ? 1.0 : 0.0;
  d.values["best_restart"] = static_cast<double>(best);
  d.traces["log_likelihood_trace"] = runs[best].log_likelihood_trace;
  auto& per = d.traces["restart_log_likelihood"];
  for (const auto& r : runs) {
    per.push_back(r.log_likelihood());
    out.restart_assignments.push_back(r.labels);
  }
  return out;
}

}  // namespace relvec
