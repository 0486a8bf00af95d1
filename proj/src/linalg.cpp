#include "sketchopt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketchopt/errors.hpp"

namespace sketchopt::linalg {

namespace {

std::string shape(const DenseMatrix& M) {
  return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

void require_square(const DenseMatrix& M, const char* what) {
  if (M.rows() != M.cols()) {
    throw DimensionMismatch(std::string(what) + ": expected a square matrix, got " + shape(M));
  }
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& M, const DenseMatrix& N) {
  if (M.cols() != N.rows()) {
    throw DimensionMismatch("matmul: " + shape(M) + " times " + shape(N));
  }
  DenseMatrix out = M * N;
  return out;
}

DenseMatrix gram(const DenseMatrix& M) {
  const Eigen::Index d = M.cols();
  DenseMatrix G = DenseMatrix::Zero(d, d);
  G.selfadjointView<Eigen::Lower>().rankUpdate(M.transpose());
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  return G;
}

bool is_symmetric(const DenseMatrix& M, double rel_tol) {
  if (M.rows() != M.cols()) return false;
  const double scale = M.norm();
  return (M - M.transpose()).norm() <= rel_tol * scale;
}

Vector qr_least_squares(const DenseMatrix& A, const Vector& b) {
  if (A.rows() != b.size()) {
    throw DimensionMismatch("qr_least_squares: A is " + shape(A) + ", b has length " +
                            std::to_string(b.size()));
  }
  if (A.rows() < A.cols()) {
    throw RankDeficient("qr_least_squares: fewer rows than columns (" + shape(A) + ")");
  }
  Eigen::HouseholderQR<DenseMatrix> qr(A);
  const auto& packed = qr.matrixQR();
  const Eigen::Index d = A.cols();
  double max_diag = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) max_diag = std::max(max_diag, std::abs(packed(j, j)));
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(std::abs(packed(j, j)) > kRankTolerance * max_diag)) {
      throw RankDeficient("qr_least_squares: |R_" + std::to_string(j) + std::to_string(j) +
                          "| below rank tolerance");
    }
  }
  return qr.solve(b);
}

CholeskyFactor cholesky(const DenseMatrix& M) {
  require_square(M, "cholesky");
  if (!is_symmetric(M)) throw NotSymmetric("cholesky: input is not symmetric");

  const double max_diag = M.diagonal().maxCoeff();
  if (!(max_diag > 0.0)) throw NotPositiveDefinite("cholesky: non-positive diagonal");

  Eigen::LLT<DenseMatrix, Eigen::Lower> llt(M);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("cholesky: factorization broke down");
  }
  DenseMatrix L = llt.matrixL();
  for (Eigen::Index j = 0; j < L.rows(); ++j) {
    const double pivot = L(j, j) * L(j, j);
    if (!(pivot > kRankTolerance * max_diag)) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) +
                                " below 1e-12 of the largest diagonal entry");
    }
  }
  return CholeskyFactor{static_cast<std::size_t>(M.rows()), std::move(L)};
}

Vector cholesky_solve(const CholeskyFactor& F, const Vector& v) {
  if (static_cast<std::size_t>(v.size()) != F.dim) {
    throw DimensionMismatch("cholesky_solve: factor has dim " + std::to_string(F.dim) +
                            ", vector has length " + std::to_string(v.size()));
  }
  Vector y = F.lower.triangularView<Eigen::Lower>().solve(v);
  F.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(y);
  return y;
}

Vector sym_eigenvalues(const DenseMatrix& M) {
  require_square(M, "sym_eigenvalues");
  if (!is_symmetric(M)) throw NotSymmetric("sym_eigenvalues: input is not symmetric");
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(M, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("sym_eigenvalues: QR iteration did not converge");
  }
  // Eigen already returns them in increasing order.
  return solver.eigenvalues();
}

LsProblem make_problem(DenseMatrix A, Vector b) {
  if (A.rows() != b.size()) {
    throw DimensionMismatch("make_problem: A is " + shape(A) + ", b has length " +
                            std::to_string(b.size()));
  }
  if (!A.allFinite() || !b.allFinite()) {
    throw std::invalid_argument("make_problem: non-finite entries in A or b");
  }
  LsProblem p;
  p.x_star = qr_least_squares(A, b);
  p.fitted = A * p.x_star;
  p.opt_residual_sq = (p.fitted - b).squaredNorm();
  p.A = std::move(A);
  p.b = std::move(b);
  return p;
}

double prediction_error_sq(const LsProblem& problem, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != problem.d()) {
    throw DimensionMismatch("prediction_error_sq: x has length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(problem.d()));
  }
  return (problem.A * x - problem.fitted).squaredNorm();
}

double objective(const LsProblem& problem, const Vector& x) {
  return 0.5 * (problem.A * x - problem.b).squaredNorm();
}

Vector gradient(const LsProblem& problem, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != problem.d()) {
    throw DimensionMismatch("gradient: x has length " + std::to_string(x.size()));
  }
  Vector residual = problem.A * x - problem.b;
  return problem.A.transpose() * residual;
}

}  // namespace sketchopt::linalg
