#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "sketchopt/errors.hpp"
#include "sketchopt/harness.hpp"
#include "sketchopt/linalg.hpp"
#include "sketchopt/orthopoly.hpp"
#include "sketchopt/solvers.hpp"

using namespace sketchopt;
namespace sv = sketchopt::solvers;
namespace op = sketchopt::orthopoly;
namespace la = sketchopt::linalg;
namespace h = sketchopt::harness;

namespace {

h::SyntheticProblem small_problem(std::size_t n, std::size_t d, std::uint64_t seed) {
  return h::gen_synthetic_full(n, d, h::SyntheticSpec{}, RngStream(seed, 0));
}

// p(C^{-1}) v for symmetric positive definite C.
Vector apply_poly_of_inverse(const DenseMatrix& C, const Vector& v,
                             const std::function<double(double)>& p) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(C)};
  const Eigen::MatrixXd Q = es.eigenvectors();
  Vector w = Q.transpose() * v;
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) *= p(1.0 / es.eigenvalues()(i));
  return Q * w;
}

// Max entrywise gap between U^T A (x_t - x*) and p_t(C_S^{-1}) Delta_0 for t <= 5.
double weld_gap(const sv::Method& method, std::uint64_t seed) {
  const std::size_t n = 256, d = 8, m = 32;
  const auto sp = small_problem(n, d, seed);
  sv::SolverConfig cfg;
  cfg.method = method;
  cfg.m = m;
  cfg.T = 5;
  cfg.delta = 0.0;
  cfg.seed = seed;
  cfg.stream = 3;
  cfg.x0 = sv::X0Policy::seeded_gaussian(1.0);

  std::vector<Vector> iterates;
  const auto trace = sv::solve(sp.problem, cfg, [&](std::size_t, const Vector& x) {
    iterates.push_back(x);
  });

  const auto kind = sv::method_embedding(method);
  const RngStream rng = RngStream(cfg.seed, cfg.stream).substream(1);
  const auto su = sketch::apply_sketch(kind, sp.U, Vector::Zero(n), m, rng);
  CHECK(su.result.m_effective == trace.m_effective);
  const DenseMatrix C = la::gram(su.result.SA);

  std::function<double(std::size_t, double)> poly;
  if (kind == sketch::SketchKind::Gaussian) {
    const double rho = static_cast<double>(d) / m;
    poly = [rho](std::size_t t, double x) {
      return op::mp_poly_eval(t, rho, (1 - rho) * (1 - rho) * x);
    };
  } else {
    const auto params = op::srht_params(static_cast<double>(d) / n,
                                        static_cast<double>(trace.m_effective) / n);
    poly = [params](std::size_t t, double x) { return op::srht_poly_eval(t, params, x); };
  }

  auto delta = [&](const Vector& x) -> Vector {
    return sp.U.transpose() * (sp.problem.A * (x - sp.problem.x_star));
  };
  const Vector d0 = delta(iterates[0]);
  double gap = 0.0;
  for (std::size_t t = 0; t <= 5; ++t) {
    const Vector expected = apply_poly_of_inverse(C, d0, [&](double x) { return poly(t, x); });
    gap = std::max(gap, (delta(iterates[t]) - expected).cwiseAbs().maxCoeff());
  }
  return gap;
}

}  // namespace

TEST_CASE("identity sketch with a unit Newton step lands on x*") {
  const auto sp = small_problem(64, 6, 1);
  const auto pre = sv::build_preconditioner(sp.problem, sketch::SketchKind::Identity, 64,
                                            RngStream(1, 1));
  CHECK((pre.H - la::gram(sp.problem.A)).norm() <= 1e-14 * pre.H.norm());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const op::CoefficientSchedule newton(op::ScheduleKind::GaussianOpt, {nan, nan, 1.0},
                                       {nan, -1.0, -1.0});
  const auto tr = sv::solve_with_schedule(sp.problem, pre, newton, Vector::Zero(6));
  REQUIRE(tr.errors_sq.size() == 3);
  CHECK(tr.errors_sq[0] > 0.0);
  CHECK(tr.errors_sq[1] <= 1e-16 * tr.errors_sq[0]);
}

TEST_CASE("preconditioner setup") {
  const auto sp = small_problem(1024, 64, 2);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto pre =
        sv::build_preconditioner(sp.problem, sketch::SketchKind::Srht, 256, RngStream(s, 0));
    CHECK(pre.factor.dim == 64);
    CHECK(pre.m_effective >= 64);
    CHECK(pre.kind == sketch::SketchKind::Srht);
  }
  CHECK_THROWS_AS(sv::build_preconditioner(sp.problem, sketch::SketchKind::Gaussian, 64,
                                           RngStream(1, 0)),
                  InvalidParameter);
}

TEST_CASE("config validation") {
  const auto sp = small_problem(256, 8, 3);
  sv::SolverConfig cfg;
  cfg.m = 32;
  cfg.T = 0;
  CHECK_THROWS_AS(sv::solve(sp.problem, cfg), InvalidParameter);
  cfg.T = 3;
  cfg.delta = 0.2;
  CHECK_THROWS_AS(sv::solve(sp.problem, cfg), InvalidParameter);
  cfg.delta.reset();
  cfg.m = 8;
  CHECK_THROWS_AS(sv::solve(sp.problem, cfg), InvalidParameter);

  sv::SolverConfig srht;
  srht.method = sv::SrhtOpt{};
  CHECK(srht.effective_delta() == 0.01);
  CHECK(cfg.effective_delta() == 0.0);
  sv::SolverConfig hb;
  hb.method = sv::HeavyBallFixed{0.1, 0.2};
  CHECK(hb.effective_delta() == 0.0);

  CHECK(sv::method_name(sv::GaussianOpt{}) == "gaussian-opt");
  CHECK(sv::method_name(sv::SrhtOpt{}) == "srht-opt");
  CHECK(sv::method_name(sv::HeavyBallFixed{}) == "hb-fixed");
  CHECK(sv::method_name(sv::HeavyBallRefreshed{}) == "hb-refreshed");
}

TEST_CASE("weld: solver errors are the optimal polynomials in C_S^{-1}") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    CHECK(weld_gap(sv::GaussianOpt{}, seed) <= 1e-8);
    CHECK(weld_gap(sv::SrhtOpt{}, seed) <= 1e-8);
  }
}

TEST_CASE("trace shape, determinism, and schedule_for") {
  const auto sp = small_problem(512, 20, 4);
  for (const sv::Method& method :
       {sv::Method{sv::GaussianOpt{}}, sv::Method{sv::SrhtOpt{}},
        sv::Method{sv::HeavyBallFixed{0.0, 0.0, sketch::SketchKind::Srht, 0.01}},
        sv::Method{sv::HeavyBallRefreshed{0.15, 0.3}}}) {
    sv::SolverConfig cfg;
    cfg.method = method;
    cfg.m = 120;
    cfg.T = 12;
    cfg.seed = 9;
    cfg.stream = 2;
    const auto a = sv::solve(sp.problem, cfg);
    const auto b = sv::solve(sp.problem, cfg);
    CHECK(a.errors_sq.size() == 13);
    CHECK(a.errors_sq == b.errors_sq);
    CHECK(a.m_effective > 20);
    for (double e : a.errors_sq) CHECK((std::isfinite(e) && e >= 0.0));
    CHECK(a.errors_sq.back() < a.errors_sq.front());
  }

  sv::SolverConfig cfg;
  cfg.method = sv::SrhtOpt{};
  cfg.m = 120;
  cfg.T = 4;
  const auto sched = sv::schedule_for(sp.problem, cfg, 118);
  const auto ref = op::srht_coefficients(op::srht_params(20.0 / 512, 118.0 / 512), 4);
  CHECK(sched.delta() == 0.01);
  CHECK(sched.raw_b(1) == doctest::Approx(ref.raw_b(1)).epsilon(1e-15));
  cfg.method = sv::SrhtOpt{sketch::SketchKind::Srht, false};
  const auto nominal = sv::schedule_for(sp.problem, cfg, 118);
  CHECK(nominal.raw_b(1) ==
        doctest::Approx(op::srht_coefficients(op::srht_params(20.0 / 512, 120.0 / 512), 4).raw_b(1))
            .epsilon(1e-15));
  cfg.method = sv::HeavyBallRefreshed{0.1, 0.1};
  CHECK_THROWS(sv::schedule_for(sp.problem, cfg, 118));
}

TEST_CASE("seeded initial point is reproducible and zero is the default") {
  const auto sp = small_problem(128, 5, 5);
  sv::SolverConfig cfg;
  cfg.m = 40;
  CHECK(sv::initial_point(sp.problem, cfg).norm() == 0.0);
  cfg.x0 = sv::X0Policy::seeded_gaussian(2.0);
  cfg.seed = 3;
  const Vector x = sv::initial_point(sp.problem, cfg);
  CHECK(x.norm() > 0.0);
  CHECK((x - sv::initial_point(sp.problem, cfg)).norm() == 0.0);
  cfg.stream = 1;
  CHECK((x - sv::initial_point(sp.problem, cfg)).norm() > 0.0);
}

TEST_CASE("divergence is reported with the partial trace") {
  const auto sp = small_problem(256, 8, 6);
  sv::SolverConfig cfg;
  cfg.method = sv::HeavyBallFixed{50.0, 0.9, sketch::SketchKind::Gaussian};
  cfg.m = 64;
  cfg.T = 200;
  try {
    sv::solve(sp.problem, cfg);
    FAIL("expected divergence");
  } catch (const sv::Diverged& e) {
    const auto& part = e.partial().errors_sq;
    CHECK(!part.empty());
    CHECK(e.last_finite_t() + 1 == part.size());
    for (double v : part) CHECK(std::isfinite(v));
    CHECK(part.size() < 201);
  }
}

TEST_CASE("edge heavy-ball parameters") {
  const auto hb = sv::edge_heavy_ball_params(0.2, 0.4);
  CHECK(hb.mu == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(hb.beta == doctest::Approx(0.375).epsilon(1e-13));
  for (double g = 0.05; g < 0.9; g += 0.1)
    for (double x = g + 0.05; x < 0.99; x += 0.1) {
      const auto p = op::srht_params(g, x);
      const auto e = sv::edge_heavy_ball_params(g, x);
      CHECK(std::abs(e.mu - p.c) <= 1e-12);
      CHECK(std::abs(e.beta - p.tau) <= 1e-12);
    }
  CHECK_THROWS_AS(sv::heavy_ball_from_edges(0.5, 0.2), InvalidParameter);
  CHECK_THROWS_AS(sv::heavy_ball_from_edges(0.0, 0.2), InvalidParameter);
}

TEST_CASE("heavy-ball with exact edges matches its schedule") {
  const auto sp = small_problem(512, 16, 7);
  sv::SolverConfig cfg;
  cfg.method = sv::HeavyBallFixed{0.0, 0.0, sketch::SketchKind::Srht, 0.0};
  cfg.m = 160;
  cfg.T = 3;
  cfg.seed = 4;
  const auto tr = sv::solve(sp.problem, cfg);
  const auto sched = sv::schedule_for(sp.problem, cfg, tr.m_effective);
  const auto hb = sv::edge_heavy_ball_params(16.0 / 512, static_cast<double>(tr.m_effective) / 512);
  CHECK(sched.b(2) == doctest::Approx(-hb.mu).epsilon(1e-14));
  CHECK(sched.a(2) == doctest::Approx(1 + hb.beta).epsilon(1e-14));
}
