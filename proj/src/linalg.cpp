#include "topoflow/linalg.hpp"

#include <umfpack.h>

#include <string>

namespace topoflow {

// Multifrontal LU (UMFPACK) with the symmetric-pattern strategy: AMD on the
// symmetrized pattern and threshold partial pivoting, which handles the
// zero-diagonal saddle blocks without the fill blow-up of plain COLAMD.
struct LuFactorization::Impl {
  SparseMatrix matrix;  // kept alive for residual checks
  void* numeric = nullptr;

  ~Impl() {
    if (numeric != nullptr) umfpack_di_free_numeric(&numeric);
  }
};

LuFactorization::LuFactorization(SparseMatrix matrix)
    : impl_(std::make_unique<Impl>()) {
  if (matrix.rows() != matrix.cols()) {
    throw SolveError("solve: matrix must be square");
  }
  matrix.makeCompressed();
  impl_->matrix = std::move(matrix);
  const SparseMatrix& A = impl_->matrix;

  double control[UMFPACK_CONTROL];
  umfpack_di_defaults(control);
  control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;

  void* symbolic = nullptr;
  int status =
      umfpack_di_symbolic(static_cast<int>(A.rows()), static_cast<int>(A.cols()),
                          A.outerIndexPtr(), A.innerIndexPtr(), A.valuePtr(),
                          &symbolic, control, nullptr);
  if (status != UMFPACK_OK) {
    if (symbolic != nullptr) umfpack_di_free_symbolic(&symbolic);
    throw SolveError("solve: symbolic factorization failed (status " +
                     std::to_string(status) + ")");
  }
  status = umfpack_di_numeric(A.outerIndexPtr(), A.innerIndexPtr(), A.valuePtr(),
                              symbolic, &impl_->numeric, control, nullptr);
  umfpack_di_free_symbolic(&symbolic);
  if (status != UMFPACK_OK) {
    throw SolveError("solve: numeric factorization failed (singular or ill-posed "
                     "matrix, status " +
                     std::to_string(status) + ")");
  }
}

LuFactorization::~LuFactorization() = default;
LuFactorization::LuFactorization(LuFactorization&&) noexcept = default;
LuFactorization& LuFactorization::operator=(LuFactorization&&) noexcept = default;

Eigen::Index LuFactorization::rows() const { return impl_->matrix.rows(); }

Eigen::VectorXd LuFactorization::solve(const Eigen::VectorXd& rhs) const {
  const SparseMatrix& A = impl_->matrix;
  if (rhs.size() != A.rows()) {
    throw SolveError("solve: right-hand side length does not match matrix");
  }
  Eigen::VectorXd x(A.rows());
  const int status =
      umfpack_di_solve(UMFPACK_A, A.outerIndexPtr(), A.innerIndexPtr(), A.valuePtr(),
                       x.data(), rhs.data(), impl_->numeric, nullptr, nullptr);
  if (status != UMFPACK_OK) {
    throw SolveError("solve: back substitution failed (status " +
                     std::to_string(status) + ")");
  }
  const double residual = (A * x - rhs).norm();
  const double bound = kSolveResidualTol * std::max(1.0, rhs.norm());
  if (!(residual <= bound)) {  // negated comparison also catches NaN
    throw SolveError("solve: residual " + std::to_string(residual) +
                     " exceeds tolerance " + std::to_string(bound));
  }
  return x;
}

Eigen::VectorXd solve(const SparseMatrix& matrix, const Eigen::VectorXd& rhs) {
  return LuFactorization(matrix).solve(rhs);
}

}  // namespace topoflow
