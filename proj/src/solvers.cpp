#include "sketchopt/solvers.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>
#include <type_traits>

#include "sketchopt/errors.hpp"
#include "sketchopt/spectral.hpp"

namespace sketchopt::solvers {

namespace {

constexpr double kDivergenceFactor = 1e12;
constexpr double kDefaultSrhtDelta = 0.01;

constexpr std::uint64_t kSketchTag = 1;
constexpr std::uint64_t kX0Tag = 2;
constexpr std::uint64_t kRefreshTag = 3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t sketch_rows(const linalg::LsProblem& problem, SketchKind kind) {
  const std::size_t n = problem.n();
  return kind == SketchKind::Srht ? sketch::next_power_of_two(n) : n;
}

void check_config(const linalg::LsProblem& problem, const SolverConfig& config) {
  if (config.T < 1) throw InvalidParameter("solver: T must be >= 1");
  const double delta = config.effective_delta();
  if (!(delta >= 0.0 && delta <= 0.1)) {
    throw InvalidParameter("solver: delta must lie in [0, 0.1]");
  }
  const SketchKind kind = method_embedding(config.method);
  if (kind != SketchKind::Identity && config.m <= problem.d()) {
    throw InvalidParameter("solver: sketch size m=" + std::to_string(config.m) +
                           " must exceed d=" + std::to_string(problem.d()));
  }
}

// Records errors_sq[t] and enforces the divergence rule.
void record(SolverTrace& trace, std::size_t t, double err, const Vector& x) {
  const double base = trace.errors_sq.empty() ? err : trace.errors_sq.front();
  if (!std::isfinite(err) || (t > 0 && base > 0.0 && err > kDivergenceFactor * base)) {
    trace.x_last = x;
    const std::size_t last = trace.errors_sq.empty() ? 0 : trace.errors_sq.size() - 1;
    throw Diverged(std::move(trace), last);
  }
  trace.errors_sq.push_back(err);
}

}  // namespace

Diverged::Diverged(SolverTrace partial, std::size_t last_finite_t)
    : std::runtime_error("solver diverged after t=" + std::to_string(last_finite_t)),
      partial_(std::move(partial)),
      last_finite_t_(last_finite_t) {}

std::string method_name(const Method& method) {
  return std::visit(
      [](const auto& m) -> std::string {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, GaussianOpt>) return "gaussian-opt";
        if constexpr (std::is_same_v<M, SrhtOpt>) return "srht-opt";
        if constexpr (std::is_same_v<M, HeavyBallFixed>) return "hb-fixed";
        return "hb-refreshed";
      },
      method);
}

SketchKind method_embedding(const Method& method) {
  return std::visit([](const auto& m) { return m.embedding; }, method);
}

double SolverConfig::effective_delta() const {
  if (delta) return *delta;
  return std::holds_alternative<SrhtOpt>(method) ? kDefaultSrhtDelta : 0.0;
}

Preconditioner build_preconditioner(const linalg::LsProblem& problem, SketchKind embedding,
                                    std::size_t m, RngStream rng) {
  if (embedding != SketchKind::Identity && m <= problem.d()) {
    throw InvalidParameter("build_preconditioner: need m > d");
  }
  sketch::Sketched s = sketch::apply_sketch(embedding, problem.A, problem.b, m, rng);
  Preconditioner p;
  p.kind = embedding;
  p.m_effective = s.result.m_effective;
  p.H = linalg::gram(s.result.SA);
  p.factor = linalg::cholesky(p.H);
  return p;
}

SolverTrace solve_with_schedule(const linalg::LsProblem& problem, const Preconditioner& precond,
                                const orthopoly::CoefficientSchedule& schedule, const Vector& x0,
                                const Observer& observer) {
  if (static_cast<std::size_t>(x0.size()) != problem.d()) {
    throw DimensionMismatch("solve: x0 length does not match d");
  }
  const std::size_t T = schedule.horizon();
  SolverTrace trace;
  trace.m_effective = precond.m_effective;
  trace.errors_sq.reserve(T + 1);
  const auto start = Clock::now();

  Vector x_prev = x0;
  record(trace, 0, linalg::prediction_error_sq(problem, x_prev), x_prev);
  if (observer) observer(0, x_prev);

  Vector x = x_prev + schedule.b(1) * precond.apply(linalg::gradient(problem, x_prev));
  record(trace, 1, linalg::prediction_error_sq(problem, x), x);
  if (observer) observer(1, x);

  for (std::size_t t = 2; t <= T; ++t) {
    const Vector step = precond.apply(linalg::gradient(problem, x));
    Vector next = x + schedule.b(t) * step + (1.0 - schedule.a(t)) * (x_prev - x);
    x_prev = std::move(x);
    x = std::move(next);
    record(trace, t, linalg::prediction_error_sq(problem, x), x);
    if (observer) observer(t, x);
  }
  trace.x_last = std::move(x);
  trace.wall_clock.iterate_s = seconds_since(start);
  return trace;
}

orthopoly::CoefficientSchedule schedule_for(const linalg::LsProblem& problem,
                                            const SolverConfig& config,
                                            std::size_t m_effective) {
  check_config(problem, config);
  const double delta = config.effective_delta();
  const double d = static_cast<double>(problem.d());
  const double m = static_cast<double>(config.m);
  const double kept = static_cast<double>(m_effective);
  return std::visit(
      [&](const auto& method) -> orthopoly::CoefficientSchedule {
        using M = std::decay_t<decltype(method)>;
        if constexpr (std::is_same_v<M, GaussianOpt>) {
          return orthopoly::gaussian_coefficients(d / m, config.T).with_delta(delta);
        } else if constexpr (std::is_same_v<M, SrhtOpt>) {
          const double n = static_cast<double>(sketch_rows(problem, method.embedding));
          const double rows = method.realized_m ? kept : m;
          const auto params = orthopoly::srht_params(d / n, rows / n);
          return orthopoly::srht_coefficients(params, config.T).with_delta(delta);
        } else if constexpr (std::is_same_v<M, HeavyBallFixed>) {
          HeavyBallParams hb{method.mu, method.beta};
          if (method.edge_delta) {
            const double n = static_cast<double>(sketch_rows(problem, method.embedding));
            const auto [lo, hi] = spectral::srht_edges(d / n, kept / n);
            hb = heavy_ball_from_edges((1.0 - *method.edge_delta) * lo,
                                       (1.0 + *method.edge_delta) * hi);
          }
          return orthopoly::heavyball_coefficients(hb.mu, hb.beta, config.T).with_delta(delta);
        } else {
          throw std::invalid_argument("schedule_for: refreshed heavy-ball has no fixed schedule");
        }
      },
      config.method);
}

Vector initial_point(const linalg::LsProblem& problem, const SolverConfig& config) {
  const auto d = static_cast<Eigen::Index>(problem.d());
  if (config.x0.kind == X0Policy::Kind::Zero) return Vector::Zero(d);
  RngStream rng = RngStream(config.seed, config.stream).substream(kX0Tag);
  std::normal_distribution<double> normal(0.0, config.x0.scale);
  Vector x(d);
  for (Eigen::Index i = 0; i < d; ++i) x(i) = normal(rng);
  return x;
}

namespace {

SolverTrace solve_refreshed(const linalg::LsProblem& problem, const SolverConfig& config,
                            const HeavyBallRefreshed& method, const Observer& observer) {
  const double delta = config.effective_delta();
  const auto schedule =
      orthopoly::heavyball_coefficients(method.mu, method.beta, config.T).with_delta(delta);
  const RngStream base = RngStream(config.seed, config.stream).substream(kRefreshTag);

  SolverTrace trace;
  trace.errors_sq.reserve(config.T + 1);
  Vector x_prev = initial_point(problem, config);
  record(trace, 0, linalg::prediction_error_sq(problem, x_prev), x_prev);
  if (observer) observer(0, x_prev);

  Vector x = x_prev;
  for (std::size_t t = 1; t <= config.T; ++t) {
    auto t0 = Clock::now();
    const Preconditioner p =
        build_preconditioner(problem, method.embedding, config.m, base.substream(t));
    trace.wall_clock.sketch_s += seconds_since(t0);
    trace.m_effective = p.m_effective;
    t0 = Clock::now();
    const Vector step = p.apply(linalg::gradient(problem, x));
    Vector next = x + schedule.b(t) * step;
    if (t >= 2) next += (1.0 - schedule.a(t)) * (x_prev - x);
    x_prev = std::move(x);
    x = std::move(next);
    trace.wall_clock.iterate_s += seconds_since(t0);
    record(trace, t, linalg::prediction_error_sq(problem, x), x);
    if (observer) observer(t, x);
  }
  trace.x_last = std::move(x);
  return trace;
}

}  // namespace

SolverTrace solve(const linalg::LsProblem& problem, const SolverConfig& config,
                  const Observer& observer) {
  check_config(problem, config);
  if (const auto* hb = std::get_if<HeavyBallRefreshed>(&config.method)) {
    return solve_refreshed(problem, config, *hb, observer);
  }
  const SketchKind kind = method_embedding(config.method);
  const RngStream rng = RngStream(config.seed, config.stream).substream(kSketchTag);

  auto t0 = Clock::now();
  sketch::Sketched s = sketch::apply_sketch(kind, problem.A, problem.b, config.m, rng);
  const double sketch_s = seconds_since(t0);

  t0 = Clock::now();
  Preconditioner p;
  p.kind = kind;
  p.m_effective = s.result.m_effective;
  p.H = linalg::gram(s.result.SA);
  p.factor = linalg::cholesky(p.H);
  const double factor_s = seconds_since(t0);

  const auto schedule = schedule_for(problem, config, p.m_effective);
  SolverTrace trace = solve_with_schedule(problem, p, schedule, initial_point(problem, config),
                                          observer);
  trace.wall_clock.sketch_s = sketch_s;
  trace.wall_clock.factor_s = factor_s;
  return trace;
}

HeavyBallParams heavy_ball_from_edges(double lo, double hi) {
  if (!(0.0 < lo && lo < hi)) throw InvalidParameter("heavy-ball edges need 0 < lo < hi");
  const double sl = std::sqrt(lo);
  const double sh = std::sqrt(hi);
  const double inv = 1.0 / sh + 1.0 / sl;
  const double r = (sh - sl) / (sh + sl);
  return {4.0 / (inv * inv), r * r};
}

HeavyBallParams edge_heavy_ball_params(double gamma, double xi) {
  const auto [lo, hi] = spectral::srht_edges(gamma, xi);
  return heavy_ball_from_edges(lo, hi);
}

}  // namespace sketchopt::solvers
