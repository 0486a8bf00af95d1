#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "sketchopt/errors.hpp"
#include "sketchopt/harness.hpp"

namespace sketchopt::harness {

namespace {

constexpr std::uint64_t kUTag = 11;
constexpr std::uint64_t kVTag = 12;
constexpr std::uint64_t kPlantedTag = 13;
constexpr std::uint64_t kNoiseTag = 14;

}  // namespace

double SyntheticSpec::effective_decay(std::size_t d) const {
  if (!(singular_decay > 0.0 && singular_decay <= 1.0)) {
    throw InvalidParameter("singular decay must lie in (0,1], got " +
                           std::to_string(singular_decay));
  }
  if (max_condition <= 0.0 || d < 2) return singular_decay;
  const double floor_decay = std::pow(max_condition, -1.0 / static_cast<double>(d - 1));
  return std::max(singular_decay, floor_decay);
}

DenseMatrix haar_orthonormal(std::size_t n, std::size_t d, RngStream& rng) {
  if (d == 0 || d > n) throw InvalidParameter("haar_orthonormal: need 1 <= d <= n");
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(d);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd G(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) G(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  const auto& R = qr.matrixQR();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  }
  return DenseMatrix(Q);
}

SyntheticProblem gen_synthetic_full(std::size_t n, std::size_t d, const SyntheticSpec& spec,
                                    RngStream rng) {
  if (d == 0 || n < d) throw InvalidParameter("gen_synthetic: need n >= d >= 1");
  const double decay = spec.effective_decay(d);
  const double noise = spec.noise_scale.value_or(1.0 / std::sqrt(static_cast<double>(n)));
  const double planted = spec.planted_scale.value_or(1.0 / std::sqrt(static_cast<double>(d)));
  const auto cols = static_cast<Eigen::Index>(d);
  const auto rows = static_cast<Eigen::Index>(n);

  SyntheticProblem out;
  RngStream u_rng = rng.substream(kUTag);
  RngStream v_rng = rng.substream(kVTag);
  out.U = haar_orthonormal(n, d, u_rng);
  const DenseMatrix V = haar_orthonormal(d, d, v_rng);

  out.singular_values.resize(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    out.singular_values(j) = std::pow(decay, static_cast<double>(j + 1));
  }
  DenseMatrix A = (out.U * out.singular_values.asDiagonal()) * V.transpose();

  std::normal_distribution<double> normal(0.0, 1.0);
  RngStream p_rng = rng.substream(kPlantedTag);
  out.x_planted.resize(cols);
  for (Eigen::Index j = 0; j < cols; ++j) out.x_planted(j) = planted * normal(p_rng);

  RngStream e_rng = rng.substream(kNoiseTag);
  Vector b = A * out.x_planted;
  if (noise != 0.0) {
    for (Eigen::Index i = 0; i < rows; ++i) b(i) += noise * normal(e_rng);
  }
  out.problem = linalg::make_problem(std::move(A), std::move(b));
  return out;
}

linalg::LsProblem gen_synthetic(std::size_t n, std::size_t d, const SyntheticSpec& spec,
                                RngStream rng) {
  return gen_synthetic_full(n, d, spec, rng).problem;
}

}  // namespace sketchopt::harness
