#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sketchopt/linalg.hpp"
#include "sketchopt/orthopoly.hpp"
#include "sketchopt/rng.hpp"
#include "sketchopt/sketching.hpp"

namespace sketchopt::solvers {

using sketch::SketchKind;

/// Constant schedule a = 1 + rho, b = -(1 - rho)^2 with rho = d / m.
struct GaussianOpt {
  SketchKind embedding = SketchKind::Gaussian;
};

/// Ratio-recursion schedule built from gamma = d / n and xi = m / n, where n
/// is the padded row count when the embedding is an SRHT. With realized_m the
/// schedule uses the row count the sketch actually kept.
struct SrhtOpt {
  SketchKind embedding = SketchKind::Srht;
  bool realized_m = true;
};

/// Heavy-ball on one fixed sketch. When edge_delta is set, (mu, beta) are
/// replaced by the edge tuning for (1 - delta) lambda_h, (1 + delta) Lambda_h
/// at the sketch's realized row count.
struct HeavyBallFixed {
  double mu = 0.0;
  double beta = 0.0;
  SketchKind embedding = SketchKind::Srht;
  std::optional<double> edge_delta;
};

/// Heavy-ball with a fresh sketch, and so a fresh H_S, at every iteration.
struct HeavyBallRefreshed {
  double mu = 0.0;
  double beta = 0.0;
  SketchKind embedding = SketchKind::Srht;
};

using Method = std::variant<GaussianOpt, SrhtOpt, HeavyBallFixed, HeavyBallRefreshed>;

std::string method_name(const Method& method);
SketchKind method_embedding(const Method& method);

struct X0Policy {
  enum class Kind { Zero, SeededGaussian };
  Kind kind = Kind::Zero;
  double scale = 1.0;

  static X0Policy zero() { return {}; }
  static X0Policy seeded_gaussian(double scale) { return {Kind::SeededGaussian, scale}; }
};

struct SolverConfig {
  Method method = GaussianOpt{};
  std::size_t m = 0;
  std::size_t T = 1;
  /// Schedule perturbation; when unset, 0.01 for SrhtOpt and 0 otherwise.
  std::optional<double> delta;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  X0Policy x0 = X0Policy::zero();

  double effective_delta() const;
};

struct PhaseTimings {
  double sketch_s = 0.0;
  double factor_s = 0.0;
  double iterate_s = 0.0;
};

struct SolverTrace {
  std::vector<double> errors_sq;  // t = 0..T
  std::size_t m_effective = 0;
  PhaseTimings wall_clock;
  Vector x_last;
};

/// Thrown on a non-finite error or errors_sq[t] > 1e12 * errors_sq[0].
class Diverged : public std::runtime_error {
 public:
  Diverged(SolverTrace partial, std::size_t last_finite_t);
  const SolverTrace& partial() const { return partial_; }
  std::size_t last_finite_t() const { return last_finite_t_; }

 private:
  SolverTrace partial_;
  std::size_t last_finite_t_;
};

struct Preconditioner {
  linalg::CholeskyFactor factor;
  SketchKind kind = SketchKind::Gaussian;
  DenseMatrix H;  // (SA)^T (SA)
  std::size_t m_effective = 0;

  Vector apply(const Vector& g) const { return linalg::cholesky_solve(factor, g); }
};

/// Sketches A (zero-padded first for an SRHT with non power-of-two n) and
/// factors H_S = (SA)^T SA.
Preconditioner build_preconditioner(const linalg::LsProblem& problem, SketchKind embedding,
                                    std::size_t m, RngStream rng);

/// Called with (t, x_t) for t = 0..T.
using Observer = std::function<void(std::size_t, const Vector&)>;

/// Runs the generic update driven by `schedule` for T = schedule.horizon()
/// iterations with a fixed preconditioner. m_effective and the sketch/factor
/// timings are left to the caller.
SolverTrace solve_with_schedule(const linalg::LsProblem& problem, const Preconditioner& precond,
                                const orthopoly::CoefficientSchedule& schedule, const Vector& x0,
                                const Observer& observer = {});

SolverTrace solve(const linalg::LsProblem& problem, const SolverConfig& config,
                  const Observer& observer = {});

/// The coefficient schedule `solve` uses for this problem and config once the
/// sketch kept `m_effective` rows, already delta-perturbed. Throws for
/// HeavyBallRefreshed (no fixed H_S).
orthopoly::CoefficientSchedule schedule_for(const linalg::LsProblem& problem,
                                            const SolverConfig& config,
                                            std::size_t m_effective);

Vector initial_point(const linalg::LsProblem& problem, const SolverConfig& config);

struct HeavyBallParams {
  double mu = 0.0;
  double beta = 0.0;
};

/// Classic heavy-ball tuning for a preconditioned spectrum whose C_S
/// eigenvalues lie in [lo, hi].
HeavyBallParams heavy_ball_from_edges(double lo, double hi);

/// Tuning from the SRHT edges lambda_h, Lambda_h.
HeavyBallParams edge_heavy_ball_params(double gamma, double xi);

}  // namespace sketchopt::solvers
