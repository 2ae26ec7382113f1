#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "relvec/distance.hpp"
#include "relvec/linalg.hpp"
#include "relvec/projection.hpp"
#include "test_support.hpp"

using namespace relvec;

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

}  // namespace

TEST(Projection, MatchesEigenPca) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 5; ++t) {
    auto x = relvec::testing::normal_matrix(rng, 80, 6);
    for (std::size_t i = 0; i < 80; ++i) {
      x(i, 0) *= 5.0;
      x(i, 1) *= 2.0;
      x(i, 2) += 0.5 * x(i, 0);
    }
    const auto p = project_2d(x);
    const Eigen::MatrixXd e = to_eigen(x);
    const Eigen::MatrixXd c = e.rowwise() - e.colwise().mean();
    const Eigen::MatrixXd cov = c.transpose() * c / 79.0;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const double total = cov.trace();
    for (int k = 0; k < 2; ++k) {
      const Eigen::VectorXd v = es.eigenvectors().col(5 - k);
      EXPECT_NEAR(p.explained_variance[k], es.eigenvalues()(5 - k), 1e-9);
      EXPECT_NEAR(p.explained_variance_ratio[k], es.eigenvalues()(5 - k) / total, 1e-9);
      Eigen::VectorXd mine(6);
      for (int j = 0; j < 6; ++j) mine(j) = p.components(k, j);
      EXPECT_NEAR(std::abs(mine.dot(v)), 1.0, 1e-9);
      const Eigen::VectorXd proj = c * mine;
      for (int i = 0; i < 80; ++i) EXPECT_NEAR(p.coords(i, k), proj(i), 1e-9);
    }
  }
}

TEST(Projection, PlanarDataIsReproducedExactly) {
  // Points on a plane in 3-d: two components carry all the variance.
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  Matrix x(50, 3);
  for (std::size_t i = 0; i < 50; ++i) {
    const double u = 3 * g(rng), v = g(rng);
    x(i, 0) = u + v;
    x(i, 1) = u - v;
    x(i, 2) = 2 * u;
  }
  const auto p = project_2d(x);
  EXPECT_NEAR(p.explained_variance_ratio[0] + p.explained_variance_ratio[1], 1.0, 1e-10);
  // Pairwise distances survive the projection.
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t j = i + 1; j < 50; ++j) {
      const double d3 = std::sqrt(squared_euclidean(x.row(i), x.row(j)));
      const double d2 = std::hypot(p.coords(i, 0) - p.coords(j, 0), p.coords(i, 1) - p.coords(j, 1));
      ASSERT_NEAR(d3, d2, 1e-9);
    }
}

TEST(Projection, IsotropicBlobRatiosNearEven) {
  std::mt19937_64 rng(7);
  const auto x = relvec::testing::normal_matrix(rng, 5000, 2);
  const auto p = project_2d(x);
  EXPECT_NEAR(p.explained_variance_ratio[0], 0.5, 0.03);
  EXPECT_NEAR(p.explained_variance_ratio[1], 0.5, 0.03);
  EXPECT_GE(p.explained_variance[0], p.explained_variance[1]);
}

TEST(Projection, ComponentsAreOrthonormalWithPositiveLeadingEntry) {
  std::mt19937_64 rng(1);
  const auto x = relvec::testing::normal_matrix(rng, 40, 10);
  const auto p = project_2d(x);
  for (std::size_t a = 0; a < 2; ++a) {
    double best = 0.0;
    for (std::size_t b = 0; b < 2; ++b) {
      double dot = 0;
      for (std::size_t j = 0; j < 10; ++j) dot += p.components(a, j) * p.components(b, j);
      EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-10);
    }
    for (std::size_t j = 0; j < 10; ++j)
      if (std::fabs(p.components(a, j)) > std::fabs(best)) best = p.components(a, j);
    EXPECT_GT(best, 0.0);
  }
}

TEST(Projection, DegenerateInputs) {
  Matrix same(4, 3, 1.5);
  EXPECT_THROW(project_2d(same), Error);
  EXPECT_THROW(project_2d(same, true), Error);

  Matrix line(5, 3);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) line(i, j) = static_cast<double>(i) * (j + 1);
  EXPECT_THROW(project_2d(line), Error);
  const auto p = project_2d(line, true);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(p.coords(i, 1), 0.0);
  EXPECT_NEAR(p.explained_variance_ratio[0], 1.0, 1e-12);

  EXPECT_THROW(project_2d(Matrix(1, 3)), Error);
}

TEST(Linalg, JacobiMatchesEigen) {
  std::mt19937_64 rng(3);
  const auto a = relvec::testing::normal_matrix(rng, 8, 8);
  Matrix s(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) s(i, j) = a(i, j) + a(j, i);
  const auto mine = jacobi_eigen(s);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(s));
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(mine.values[k], es.eigenvalues()(7 - k), 1e-10);
}
