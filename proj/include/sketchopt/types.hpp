#pragma once

#include <Eigen/Dense>

namespace sketchopt {

/// Row-major 64-bit dense matrix. Every matrix in the library (data, sketches,
/// Gram matrices, factors) uses this layout so that row blocks are contiguous.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace sketchopt
