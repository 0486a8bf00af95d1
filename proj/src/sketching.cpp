#include "sketchopt/sketching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sketchopt/errors.hpp"

namespace sketchopt::sketch {

namespace {

constexpr Eigen::Index kGaussianBlockRows = 256;
constexpr int kHaarAttempts = 3;
constexpr double kOrthonormalTol = 1e-10;

double uniform01(RngStream& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void require_rows(const DenseMatrix& A, const Vector& b, const char* what) {
  if (A.rows() != b.size()) {
    throw DimensionMismatch(std::string(what) + ": A has " + std::to_string(A.rows()) +
                            " rows but b has length " + std::to_string(b.size()));
  }
}

}  // namespace

std::string_view to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::Gaussian: return "gaussian";
    case SketchKind::Srht: return "srht";
    case SketchKind::Haar: return "haar";
    case SketchKind::Identity: return "identity";
  }
  return "unknown";
}

SketchKind parse_sketch_kind(std::string_view name) {
  if (name == "gaussian") return SketchKind::Gaussian;
  if (name == "srht") return SketchKind::Srht;
  if (name == "haar") return SketchKind::Haar;
  if (name == "identity") return SketchKind::Identity;
  throw std::invalid_argument("unknown sketch kind '" + std::string(name) + "'");
}

AspectRatios AspectRatios::from_dims(std::size_t n, std::size_t d, std::size_t m,
                                     bool require_power_of_two) {
  if (n == 0 || d == 0 || m == 0) throw InvalidParameter("aspect ratios: zero dimension");
  if (!(d < m && m < n)) {
    throw InvalidParameter("aspect ratios: need d < m < n, got n=" + std::to_string(n) +
                           " d=" + std::to_string(d) + " m=" + std::to_string(m));
  }
  if (require_power_of_two && !is_power_of_two(n)) {
    throw InvalidParameter("aspect ratios: n=" + std::to_string(n) + " is not a power of two");
  }
  AspectRatios r;
  r.n = n;
  r.d = d;
  r.m = m;
  r.gamma = static_cast<double>(d) / static_cast<double>(n);
  r.xi = static_cast<double>(m) / static_cast<double>(n);
  r.rho = static_cast<double>(d) / static_cast<double>(m);
  return r;
}

Sketched srht_apply(const DenseMatrix& A, const Vector& b, std::size_t m, RngStream rng) {
  require_rows(A, b, "srht_apply");
  const std::size_t n = static_cast<std::size_t>(A.rows());
  const Eigen::Index d = A.cols();
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("srht_apply: n=" + std::to_string(n) +
                                " is not a power of two; pad first");
  }
  if (m == 0 || m >= n) {
    throw InvalidParameter("srht_apply: need 0 < m < n, got m=" + std::to_string(m));
  }

  Sketched out;
  out.result.kind = SketchKind::Srht;
  out.result.seed = rng.base_seed();
  out.result.stream_index = rng.stream_index();

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);

  // Work on [A, b] together so b sees exactly the same transform.
  DenseMatrix W(static_cast<Eigen::Index>(n), d + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double sign = (rng() >> 63) ? -1.0 : 1.0;
    const auto src = static_cast<Eigen::Index>(perm[i]);
    const auto row = static_cast<Eigen::Index>(i);
    W.row(row).head(d) = sign * A.row(src);
    W(row, d) = sign * b(src);
  }

  fwht_rows_in_place(W);

  const double keep = static_cast<double>(m) / static_cast<double>(n);
  std::vector<Eigen::Index> kept;
  kept.reserve(m + m / 4);
  for (std::size_t i = 0; i < n; ++i) {
    if (uniform01(rng) < keep) kept.push_back(static_cast<Eigen::Index>(i));
  }
  if (kept.size() < static_cast<std::size_t>(d)) {
    throw SketchTooThin(kept.size(), static_cast<std::size_t>(d));
  }

  const auto rows = static_cast<Eigen::Index>(kept.size());
  out.result.SA.resize(rows, d);
  out.sketched_b.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    out.result.SA.row(r) = W.row(kept[static_cast<std::size_t>(r)]).head(d);
    out.sketched_b(r) = W(kept[static_cast<std::size_t>(r)], d);
  }
  out.result.m_effective = kept.size();
  return out;
}

Sketched gaussian_sketch(const DenseMatrix& A, const Vector& b, std::size_t m, RngStream rng) {
  require_rows(A, b, "gaussian_sketch");
  const Eigen::Index n = A.rows();
  const Eigen::Index d = A.cols();
  if (m <= static_cast<std::size_t>(d)) {
    throw InvalidParameter("gaussian_sketch: need m > d, got m=" + std::to_string(m) +
                           " d=" + std::to_string(d));
  }
  Sketched out;
  out.result.kind = SketchKind::Gaussian;
  out.result.seed = rng.base_seed();
  out.result.stream_index = rng.stream_index();
  out.result.m_effective = m;

  const auto rows = static_cast<Eigen::Index>(m);
  out.result.SA.resize(rows, d);
  out.sketched_b.resize(rows);

  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
  DenseMatrix block;
  for (Eigen::Index r0 = 0; r0 < rows; r0 += kGaussianBlockRows) {
    const Eigen::Index br = std::min(kGaussianBlockRows, rows - r0);
    block.resize(br, n);
    for (Eigen::Index i = 0; i < br; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) block(i, j) = normal(rng);
    }
    out.result.SA.middleRows(r0, br).noalias() = block * A;
    out.sketched_b.segment(r0, br).noalias() = block * b;
  }
  return out;
}

Sketched haar_sketch(const DenseMatrix& A, const Vector& b, std::size_t m, RngStream rng) {
  require_rows(A, b, "haar_sketch");
  const Eigen::Index n = A.rows();
  const Eigen::Index d = A.cols();
  if (!(m > static_cast<std::size_t>(d) && m < static_cast<std::size_t>(n))) {
    throw InvalidParameter("haar_sketch: need d < m < n, got m=" + std::to_string(m));
  }
  const auto rows = static_cast<Eigen::Index>(m);

  for (int attempt = 0; attempt < kHaarAttempts; ++attempt) {
    RngStream draw = attempt == 0 ? rng : rng.substream(static_cast<std::uint64_t>(attempt));
    std::normal_distribution<double> normal(0.0, 1.0);
    DenseMatrix G(rows, n);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) G(i, j) = normal(draw);
    }
    Eigen::BDCSVD<DenseMatrix> svd(G, Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) continue;
    DenseMatrix S = svd.matrixV().transpose();
    const double defect =
        (S * S.transpose() - DenseMatrix::Identity(rows, rows)).cwiseAbs().maxCoeff();
    if (!(defect <= kOrthonormalTol)) continue;

    Sketched out;
    out.result.kind = SketchKind::Haar;
    out.result.seed = rng.base_seed();
    out.result.stream_index = rng.stream_index();
    out.result.m_effective = m;
    out.result.SA.noalias() = S * A;
    out.sketched_b.noalias() = S * b;
    return out;
  }
  throw DegenerateSvd("haar_sketch: right singular vectors not orthonormal after " +
                      std::to_string(kHaarAttempts) + " draws");
}

Sketched identity_sketch(const DenseMatrix& A, const Vector& b) {
  require_rows(A, b, "identity_sketch");
  Sketched out;
  out.result.kind = SketchKind::Identity;
  out.result.SA = A;
  out.result.m_effective = static_cast<std::size_t>(A.rows());
  out.sketched_b = b;
  return out;
}

Sketched apply_sketch(SketchKind kind, const DenseMatrix& A, const Vector& b, std::size_t m,
                      RngStream rng) {
  switch (kind) {
    case SketchKind::Gaussian: return gaussian_sketch(A, b, m, rng);
    case SketchKind::Haar: return haar_sketch(A, b, m, rng);
    case SketchKind::Identity: return identity_sketch(A, b);
    case SketchKind::Srht:
      if (is_power_of_two(static_cast<std::size_t>(A.rows()))) return srht_apply(A, b, m, rng);
      {
        Padded p = pad_to_power_of_two(A, b);
        return srht_apply(p.A, p.b, m, rng);
      }
  }
  throw std::invalid_argument("apply_sketch: unknown kind");
}

Padded pad_to_power_of_two(const DenseMatrix& A, const Vector& b) {
  require_rows(A, b, "pad_to_power_of_two");
  const std::size_t n = static_cast<std::size_t>(A.rows());
  const std::size_t target = next_power_of_two(n);
  Padded p;
  p.new_n = target;
  p.A = DenseMatrix::Zero(static_cast<Eigen::Index>(target), A.cols());
  p.b = Vector::Zero(static_cast<Eigen::Index>(target));
  p.A.topRows(A.rows()) = A;
  p.b.head(b.size()) = b;
  return p;
}

}  // namespace sketchopt::sketch
