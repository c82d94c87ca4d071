#include <doctest.h>

#include "topoflow/linalg.hpp"

#include <random>
#include <vector>

using namespace topoflow;

namespace {

SparseMatrix from_dense(const Eigen::MatrixXd& dense) {
  SparseMatrix sparse = dense.sparseView();
  sparse.makeCompressed();
  return sparse;
}

}  // namespace

TEST_CASE("identity solve returns the right-hand side") {
  const int n = 17;
  SparseMatrix eye(n, n);
  eye.setIdentity();
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = dist(rng);
  CHECK((solve(eye, b) - b).norm() == 0.0);
}

TEST_CASE("2x2 system") {
  Eigen::MatrixXd dense(2, 2);
  dense << 2, 1, 1, 2;
  Eigen::VectorXd b(2);
  b << 3, 3;
  const Eigen::VectorXd x = solve(from_dense(dense), b);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("rank-deficient matrix reports singularity") {
  Eigen::MatrixXd dense(2, 2);
  dense << 1, 1, 1, 1;
  Eigen::VectorXd b(2);
  b << 1, 2;
  CHECK_THROWS_AS(solve(from_dense(dense), b), SolveError);
}

TEST_CASE("residual bound holds on an indefinite system") {
  // small saddle-point-like matrix: [A B^T; B 0]
  const int n = 30, m = 6;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n + m, n + m);
  for (int i = 0; i < n; ++i) {
    dense(i, i) = 4.0;
    for (int j = 0; j < i; ++j) {
      const double v = 0.2 * dist(rng);
      dense(i, j) = v;
      dense(j, i) = v;
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      dense(n + i, j) = dist(rng);
      dense(j, n + i) = dense(n + i, j);
    }
  }
  Eigen::VectorXd b(n + m);
  for (int i = 0; i < n + m; ++i) b[i] = dist(rng);
  const SparseMatrix A = from_dense(dense);
  const Eigen::VectorXd x = solve(A, b);
  CHECK((A * x - b).norm() <= kSolveResidualTol * std::max(1.0, b.norm()));
}

TEST_CASE("factorization reuse is deterministic") {
  Eigen::MatrixXd dense(3, 3);
  dense << 4, 1, 0, 1, 4, 1, 0, 1, 4;
  const SparseMatrix A = from_dense(dense);
  Eigen::VectorXd b(3);
  b << 1, 2, 3;

  const LuFactorization lu(A);
  const Eigen::VectorXd x1 = lu.solve(b);
  const Eigen::VectorXd x2 = lu.solve(b);
  for (int i = 0; i < 3; ++i) {
    CHECK(x1[i] == x2[i]);  // bitwise
  }
  // a fresh factorization of the same matrix gives bitwise-identical results
  const Eigen::VectorXd x3 = LuFactorization(A).solve(b);
  for (int i = 0; i < 3; ++i) {
    CHECK(x1[i] == x3[i]);
  }
}

TEST_CASE("shape validation") {
  SparseMatrix rect(2, 3);
  CHECK_THROWS_AS(LuFactorization{rect}, SolveError);
  SparseMatrix eye(2, 2);
  eye.setIdentity();
  const LuFactorization lu(eye);
  CHECK_THROWS_AS(lu.solve(Eigen::VectorXd::Ones(3)), SolveError);
}
