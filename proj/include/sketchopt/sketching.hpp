#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "sketchopt/rng.hpp"
#include "sketchopt/types.hpp"

namespace sketchopt::sketch {

enum class SketchKind {
  Gaussian,
  Srht,
  Haar,
  /// S = I_n. Test hook: H_S becomes the exact Hessian.
  Identity,
};

std::string_view to_string(SketchKind kind);
SketchKind parse_sketch_kind(std::string_view name);

/// Finite-sample dimensions and the ratios gamma = d/n, xi = m/n, rho = d/m.
struct AspectRatios {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t m = 0;
  double gamma = 0.0;
  double xi = 0.0;
  double rho = 0.0;

  /// Validates 0 < gamma < xi < 1 and, when requested, that n is a power of two.
  static AspectRatios from_dims(std::size_t n, std::size_t d, std::size_t m,
                                bool require_power_of_two = false);
};

struct SketchResult {
  SketchKind kind = SketchKind::Gaussian;
  DenseMatrix SA;
  std::size_t m_effective = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;
};

struct Sketched {
  SketchResult result;
  Vector sketched_b;
};

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

/// Orthonormal Walsh-Hadamard transform of a length-2^p vector: log2(n)
/// butterfly passes, each scaled by 1/sqrt(2). H_n is symmetric and
/// orthogonal, so applying it twice is the identity.
void fwht_in_place(std::span<double> v);

/// Applies H_n to every column of an n x k matrix at once. Each butterfly
/// combines two whole rows, which keeps the access pattern contiguous.
void fwht_rows_in_place(DenseMatrix& M);

/// S = B H_n D P applied to [A, b]: uniform row permutation, Rademacher signs,
/// Walsh-Hadamard transform, then each row kept independently with probability
/// m/n. Throws SketchTooThin when fewer than d rows survive.
Sketched srht_apply(const DenseMatrix& A, const Vector& b, std::size_t m, RngStream rng);

/// S with i.i.d. N(0, 1/m) entries, generated and applied in row blocks.
Sketched gaussian_sketch(const DenseMatrix& A, const Vector& b, std::size_t m, RngStream rng);

/// S = transpose of the right singular vectors of an m x n standard Gaussian
/// draw (orthonormal rows, uniformly distributed row space).
Sketched haar_sketch(const DenseMatrix& A, const Vector& b, std::size_t m, RngStream rng);

Sketched identity_sketch(const DenseMatrix& A, const Vector& b);

/// Dispatches on kind. SRHT inputs whose row count is not a power of two are
/// zero-padded first.
Sketched apply_sketch(SketchKind kind, const DenseMatrix& A, const Vector& b, std::size_t m,
                      RngStream rng);

struct Padded {
  DenseMatrix A;
  Vector b;
  std::size_t new_n = 0;
};

/// Appends zero rows (and zero observations) up to the next power of two. The
/// extra residual rows vanish identically, so f and x* are unchanged.
Padded pad_to_power_of_two(const DenseMatrix& A, const Vector& b);

}  // namespace sketchopt::sketch
