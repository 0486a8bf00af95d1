#pragma once

#include <cstddef>

#include "sketchopt/types.hpp"

namespace sketchopt::linalg {

inline constexpr double kRankTolerance = 1e-12;

/// Lower-triangular factor of a symmetric positive definite matrix.
struct CholeskyFactor {
  std::size_t dim = 0;
  DenseMatrix lower;
};

/// Overdetermined least-squares instance min 0.5*||Ax - b||^2 with its exact
/// solution cached. Build through make_problem so the cache is consistent.
struct LsProblem {
  DenseMatrix A;
  Vector b;
  Vector x_star;
  Vector fitted;  // A * x_star
  double opt_residual_sq = 0.0;

  std::size_t n() const { return static_cast<std::size_t>(A.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(A.cols()); }
};

DenseMatrix matmul(const DenseMatrix& M, const DenseMatrix& N);

/// M^T M, computed as a symmetric rank update and returned fully populated.
DenseMatrix gram(const DenseMatrix& M);

/// Householder QR solve. Throws RankDeficient when some |R_jj| falls below
/// kRankTolerance * max |R_jj|.
Vector qr_least_squares(const DenseMatrix& A, const Vector& b);

CholeskyFactor cholesky(const DenseMatrix& M);
Vector cholesky_solve(const CholeskyFactor& F, const Vector& v);

/// Ascending eigenvalues of a symmetric matrix (tridiagonal reduction followed
/// by implicit symmetric QR; no eigenvectors are formed).
Vector sym_eigenvalues(const DenseMatrix& M);

bool is_symmetric(const DenseMatrix& M, double rel_tol = 1e-10);

LsProblem make_problem(DenseMatrix A, Vector b);

/// ||A x - A x*||^2.
double prediction_error_sq(const LsProblem& problem, const Vector& x);

/// f(x) = 0.5 * ||Ax - b||^2.
double objective(const LsProblem& problem, const Vector& x);

/// A^T (A x - b).
Vector gradient(const LsProblem& problem, const Vector& x);

}  // namespace sketchopt::linalg
