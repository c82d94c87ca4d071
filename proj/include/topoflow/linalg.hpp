#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>
#include <stdexcept>

namespace topoflow {

using SparseMatrix = Eigen::SparseMatrix<double>;

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Relative residual bound every solve must satisfy: ||Ax - b|| <= tol * max(1, ||b||).
inline constexpr double kSolveResidualTol = 1e-10;

// Sparse direct LU with column pivoting, suitable for the indefinite
// saddle-point systems. Immutable after construction; solves with distinct
// right-hand sides may run concurrently. Every solve re-checks the residual
// bound and throws SolveError when it is violated.
class LuFactorization {
 public:
  explicit LuFactorization(SparseMatrix matrix);
  ~LuFactorization();
  LuFactorization(LuFactorization&&) noexcept;
  LuFactorization& operator=(LuFactorization&&) noexcept;
  LuFactorization(const LuFactorization&) = delete;
  LuFactorization& operator=(const LuFactorization&) = delete;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::Index rows() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper: factor + solve + residual check.
Eigen::VectorXd solve(const SparseMatrix& matrix, const Eigen::VectorXd& rhs);

}  // namespace topoflow
