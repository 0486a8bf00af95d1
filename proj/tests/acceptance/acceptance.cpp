// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any criterion fails. Tolerances are fixed constants below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "sketchopt/harness.hpp"
#include "sketchopt/linalg.hpp"
#include "sketchopt/orthopoly.hpp"
#include "sketchopt/sketching.hpp"
#include "sketchopt/solvers.hpp"
#include "sketchopt/spectral.hpp"

using namespace sketchopt;
namespace h = sketchopt::harness;
namespace op = sketchopt::orthopoly;
namespace sp = sketchopt::spectral;
namespace sv = sketchopt::solvers;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const std::string& label, const std::function<Outcome()>& run) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s: %s (%s) [%.1f s]\n", label.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "sketchopt_acceptance";
  fs::create_directories(dir);
  return dir;
}

// Criterion 1 at one (d, m).
Outcome gaussian_loss(std::size_t d, std::size_t m, const std::string& tag) {
  h::ConvergeConfig cfg;
  cfg.n = 4096;
  cfg.d = d;
  cfg.m_list = {m};
  cfg.methods = {"gaussian-opt"};
  cfg.trials = 20;
  cfg.iters = 15;
  cfg.out_path = (work_dir() / ("gaussian_" + tag + ".csv")).string();
  const auto res = h::run_convergence_experiment(cfg);
  const double rho = static_cast<double>(d) / static_cast<double>(m);
  const auto mean = h::mean_ratio(res.runs[0].traces);
  double worst = 0.0;
  for (std::size_t t = 1; t <= 8; ++t) {
    worst = std::max(worst, std::abs(mean[t] / std::pow(rho, static_cast<double>(t)) - 1.0));
  }
  const double rate = h::fit_rate(mean);
  Outcome o;
  o.pass = worst <= 0.3 && std::abs(rate - rho) <= 0.05;
  o.detail = tag + ": max |ratio/rho^t - 1| over t=1..8 = " + fmt("%.4f", worst) +
             " (tol 0.3), fitted rate " + fmt("%.4f", rate) + " vs rho " + fmt("%.4f", rho) +
             " (tol 0.05)";
  return o;
}

// max over a 200-point interior grid of |Im m_h(x + 1e-6 i) / pi - f_h(x)|.
double inversion_gap(double g, double x) {
  const auto fh = sp::DensitySpec::srht(g, x);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double t = fh.support_lo() + (fh.support_hi() - fh.support_lo()) * (k + 0.5) / 200;
    const double inv = sp::stieltjes_mh(g, x, {t, 1e-6}).imag() / M_PI;
    worst = std::max(worst, std::abs(inv - sp::density_eval(fh, t)));
  }
  return worst;
}

double weld_gap(const sv::Method& method, std::uint64_t seed) {
  const std::size_t n = 256, d = 8, m = 32;
  const auto data = h::gen_synthetic_full(n, d, h::SyntheticSpec{}, RngStream(seed, 0));
  sv::SolverConfig cfg;
  cfg.method = method;
  cfg.m = m;
  cfg.T = 5;
  cfg.delta = 0.0;
  cfg.seed = seed;
  cfg.x0 = sv::X0Policy::seeded_gaussian(1.0);
  std::vector<Vector> xs;
  const auto trace =
      sv::solve(data.problem, cfg, [&](std::size_t, const Vector& x) { xs.push_back(x); });

  const auto kind = sv::method_embedding(method);
  const auto su = sketch::apply_sketch(kind, data.U, Vector::Zero(n), m,
                                       RngStream(cfg.seed, cfg.stream).substream(1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(linalg::gram(su.result.SA)));
  const Eigen::MatrixXd Q = es.eigenvectors();

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
    return data.U.transpose() * (data.problem.A * (x - data.problem.x_star));
  };
  const Vector d0 = Q.transpose() * delta(xs[0]);
  double gap = 0.0;
  for (std::size_t t = 0; t <= 5; ++t) {
    Vector w = d0;
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) *= poly(t, 1.0 / es.eigenvalues()(i));
    gap = std::max(gap, (delta(xs[t]) - Q * w).cwiseAbs().maxCoeff());
  }
  return gap;
}

}  // namespace

int main() {
  std::printf("sketchopt acceptance\n");

  report("criterion 1 (Gaussian optimal loss)", [] {
    Outcome a = gaussian_loss(800, 2000, "d=800 m=2000");
    Outcome b = gaussian_loss(800, 1600, "d=800 m=1600");
    // Either configuration is an accepted form of this criterion.
    return Outcome{a.pass || b.pass, a.detail + "; " + b.detail};
  });

  report("criterion 2 (SRHT optimal rate)", [] {
    h::RatesConfig cfg;
    cfg.n = 8192;
    cfg.d_list = {1640};
    cfg.m_list = {3280};
    cfg.trials = 20;
    cfg.out_path = (work_dir() / "rates.csv").string();
    const auto res = h::run_rates_experiment(cfg);
    const double rate = res.table.number(0, "rate_emp");
    const double gap = std::abs(std::log(rate) - std::log(0.375));
    return Outcome{gap <= 0.08, "fitted rate " + fmt("%.4f", rate) + ", |log rate - log 0.375| = " +
                                    fmt("%.4f", gap) + " (tol 0.08), diverged " +
                                    fmt("%.0f", res.table.number(0, "diverged_trials"))};
  });

  h::ConvergeResult ordering;
  report("criterion 3 (method ordering at gamma=0.2, xi=0.4)", [&] {
    h::ConvergeConfig cfg;
    cfg.n = 8192;
    cfg.d = 1640;
    cfg.m_list = {3280};
    cfg.methods = {"srht-opt", "gaussian-opt"};
    cfg.trials = 20;
    cfg.iters = 15;
    cfg.out_path = (work_dir() / "ordering.csv").string();
    ordering = h::run_convergence_experiment(cfg);
    const auto& srht = ordering.runs[0].traces;
    const auto& gauss = ordering.runs[1].traces;
    int wins = 0;
    for (std::size_t k = 0; k < 20; ++k) {
      if (srht[k].size() > 10 && gauss[k].size() > 10 && srht[k][10] < gauss[k][10]) ++wins;
    }
    const double ref = op::rate_report(0.2, 0.4).rho_h_ref;
    const auto mean = h::mean_ratio(srht);
    bool below = mean.size() == 16;
    double worst = 0.0;
    for (std::size_t t = 5; t < mean.size(); ++t) {
      const double r = mean[t] / std::pow(ref, static_cast<double>(t));
      worst = std::max(worst, r);
      if (!(r < 1.0)) below = false;
    }
    return Outcome{wins >= 18 && below,
                   "srht-opt < gaussian-opt at t=10 in " + fmt("%.0f", wins) +
                       "/20 paired trials (need 18); max over t=5..15 of mean/rho_ref^t = " +
                       fmt("%.4f", worst) + " (need < 1)"};
  });

  report("property (monotone trend, optimal methods)", [&] {
    if (ordering.runs.size() != 2) return Outcome{false, "ordering run unavailable"};
    std::string detail;
    bool pass = true;
    for (const auto& run : ordering.runs) {
      int good = 0;
      for (const auto& tr : run.traces) {
        bool ok = tr.size() == 16;
        for (std::size_t t = 0; ok && t + 2 < tr.size(); ++t) ok = tr[t + 2] < tr[t];
        good += ok;
      }
      pass = pass && good >= 18;
      detail += run.method + " " + fmt("%.0f", good) + "/20 ";
    }
    return Outcome{pass, detail + "(need 18)"};
  });

  report("criterion 4 (density match)", [] {
    h::DensityConfig cfg;
    cfg.out_path = (work_dir() / "density.csv").string();
    const auto res = h::run_density_experiment(cfg);
    bool pass = true;
    std::string detail;
    for (std::size_t r = 0; r < res.summary.rows.size(); ++r) {
      const double ks = res.summary.number(r, "ks_srht");
      const double dlo = std::abs(res.summary.number(r, "min_eig") -
                                  res.summary.number(r, "edge_lo_theory"));
      const double dhi = std::abs(res.summary.number(r, "max_eig") -
                                  res.summary.number(r, "edge_hi_theory"));
      pass = pass && ks <= 0.05 && dlo <= 0.03 && dhi <= 0.03;
      detail += "m=" + fmt("%.0f", res.summary.number(r, "m")) + " ks " + fmt("%.4f", ks) +
                " edge gaps " + fmt("%.4f", dlo) + "/" + fmt("%.4f", dhi) + "; ";
    }
    return Outcome{pass, detail + "tol ks 0.05, edges 0.03"};
  });

  report("criterion 5 (spectral identities)", [] {
    double worst_mp = 0.0;
    for (double rho : {0.3, 0.5, 0.7}) {
      const auto mp = sp::DensitySpec::marchenko_pastur(rho);
      worst_mp = std::max(worst_mp, std::abs(sp::integrate_against(mp, [](double) { return 1.0; }) - 1));
      worst_mp = std::max(worst_mp, std::abs(sp::integrate_against(mp, [](double x) { return x; }) - 1));
      worst_mp = std::max(worst_mp, std::abs(sp::integrate_against(mp, [](double x) { return 1 / x; }) -
                                             1 / (1 - rho)));
    }
    // The inversion criterion is the 200-point x grid at (0.2, 0.4). Across the whole
    // (gamma, xi) grid the fixed offset 1e-6 is reported alongside for reference.
    const double worst_inv = inversion_gap(0.2, 0.4);
    double worst_fh = 0.0, grid_inv = 0.0;
    bool inclusion = true;
    for (double g = 0.05; g < 0.5; g += 0.05) {
      for (double x = g + 0.05; g + x < 0.999; x += 0.05) {
        const auto fh = sp::DensitySpec::srht(g, x);
        worst_fh = std::max(worst_fh, std::abs(sp::integrate_against(fh, [](double) { return 1.0; }) - 1));
        grid_inv = std::max(grid_inv, inversion_gap(g, x));
        const double rho = g / x;
        const auto r = sp::DensitySpec::srht_rescaled(g, x);
        inclusion = inclusion && r.support_lo() >= std::pow(1 - std::sqrt(rho), 2) - 1e-12 &&
                    r.support_hi() <= std::pow(1 + std::sqrt(rho), 2) + 1e-12;
      }
    }
    const bool pass = worst_mp <= 1e-8 && worst_fh <= 1e-8 && worst_inv <= 1e-3 && inclusion;
    return Outcome{pass, "MP moments " + fmt("%.2e", worst_mp) + ", f_h mass " + fmt("%.2e", worst_fh) +
                             " (tol 1e-8), inversion " + fmt("%.2e", worst_inv) +
                             " at (0.2, 0.4) (tol 1e-3; " + fmt("%.2e", grid_inv) +
                             " over the gamma, xi grid), support inclusion " +
                             (inclusion ? "holds" : "violated")};
  });

  report("criterion 6 (polynomial suite)", [] {
    double orth = 0.0, gs = 0.0, loss = 0.0, rorth = 0.0, ucf = 0.0, lim = 0.0;
    for (double rho : {0.3, 0.5, 0.7}) {
      const auto mp = sp::DensitySpec::marchenko_pastur(rho);
      for (std::size_t k = 0; k <= 10; ++k)
        for (std::size_t l = 0; l < k; ++l)
          orth = std::max(orth, std::abs(sp::integrate_against(mp, [&](double x) {
                   return op::mp_poly_eval(k, rho, x) * op::mp_poly_eval(l, rho, x);
                 })));
      for (std::size_t k = 0; k <= 8; ++k)
        for (std::size_t l = 0; l <= 8; ++l)
          orth = std::max(orth, std::abs(sp::integrate_against(mp, [&](double x) {
                                  return x * op::chebyshev_q_eval(k, rho, x) *
                                         op::chebyshev_q_eval(l, rho, x);
                                }) - (k == l ? 1.0 : 0.0)));
      for (std::size_t t = 0; t <= 8; ++t) {
        const double lam = sp::integrate_against(mp, [&](double x) {
          const double p = op::mp_poly_eval(t, rho, x);
          return p * p / x;
        });
        loss = std::max(loss, std::abs((1 - rho) * lam - std::pow(rho, static_cast<double>(t))));
        for (int i = 0; i <= 40; ++i) {
          const double x = mp.support_lo() + (mp.support_hi() - mp.support_lo()) * i / 40.0;
          double rhs = 1.0;
          for (std::size_t j = 1; j <= t; ++j)
            rhs -= std::pow(-std::sqrt(rho), static_cast<double>(j - 1)) * x *
                   op::chebyshev_q_eval(j - 1, rho, x);
          gs = std::max(gs, std::abs(op::mp_poly_eval(t, rho, x) - rhs));
        }
      }
    }
    for (const auto& [g, x] : {std::pair{0.2, 0.4}, std::pair{0.1, 0.5}, std::pair{0.3, 0.7}}) {
      const auto p = op::srht_params(g, x);
      const auto mt = sp::DensitySpec::marchenko_pastur(p.tau);
      for (std::size_t k = 0; k <= 6; ++k)
        for (std::size_t l = 0; l < k; ++l)
          rorth = std::max(rorth, std::abs(sp::integrate_against(mt, [&](double y) {
                    return y / (y - p.c) * op::srht_r_eval(k, p, y) * op::srht_r_eval(l, p, y);
                  })));
      const auto u = op::u_recursion(p, 30);
      for (std::size_t t = 0; t <= 30; ++t)
        ucf = std::max(ucf, std::abs(op::u_closed_form(p, t) - u[t]) / std::abs(u[t]));
      const auto s = op::srht_coefficients(p, 200);
      const auto hb = sv::edge_heavy_ball_params(g, x);
      lim = std::max({lim, std::abs(s.a(200) - (1 + hb.beta)), std::abs(s.b(200) + hb.mu)});
    }
    const bool pass = orth <= 1e-7 && gs <= 1e-9 && loss <= 1e-7 && rorth <= 1e-7 && ucf <= 1e-10 &&
                      lim <= 1e-6;
    return Outcome{pass, "orthogonality " + fmt("%.1e", orth) + ", Gram-Schmidt " + fmt("%.1e", gs) +
                             ", loss identity " + fmt("%.1e", loss) + ", R_k orthogonality " +
                             fmt("%.1e", rorth) + ", u_t closed form " + fmt("%.1e", ucf) +
                             ", coefficient limits " + fmt("%.1e", lim)};
  });

  report("criterion 7 (solver-polynomial weld)", [] {
    double g = 0.0, s = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      g = std::max(g, weld_gap(sv::GaussianOpt{}, seed));
      s = std::max(s, weld_gap(sv::SrhtOpt{}, seed));
    }
    return Outcome{g <= 1e-8 && s <= 1e-8, "max entrywise gap gaussian-opt " + fmt("%.2e", g) +
                                               ", srht-opt " + fmt("%.2e", s) + " (tol 1e-8)"};
  });

  report("criterion 8 (FWHT correctness)", [] {
    double naive = 0.0, invol = 0.0, orth = 0.0, rows = 0.0;
    for (std::size_t n = 1; n <= 64; n *= 2) {
      const DenseMatrix H = oracle::naive_hadamard(n);
      DenseMatrix M = DenseMatrix::Identity(n, n);
      sketch::fwht_rows_in_place(M);
      naive = std::max(naive, (M - H).cwiseAbs().maxCoeff());
      orth = std::max(orth, (M * M.transpose() - DenseMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
      RngStream rng(n, 0);
      std::normal_distribution<double> nd;
      Vector v(n);
      for (std::size_t i = 0; i < n; ++i) v(i) = nd(rng);
      Vector w = v;
      sketch::fwht_in_place(std::span<double>(w.data(), n));
      naive = std::max(naive, (w - H * v).cwiseAbs().maxCoeff());
      sketch::fwht_in_place(std::span<double>(w.data(), n));
      invol = std::max(invol, (w - v).cwiseAbs().maxCoeff());
    }
    // S e_j is read off the sketched observations; a fixed stream reproduces S on every call.
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const std::size_t n = 512;
      DenseMatrix S;
      for (std::size_t j = 0; j < n; ++j) {
        const auto s = sketch::srht_apply(DenseMatrix::Ones(n, 1), Vector::Unit(n, j), 128,
                                          RngStream(seed, 7));
        if (j == 0) S.resize(s.sketched_b.size(), n);
        S.col(j) = s.sketched_b;
      }
      const Eigen::Index k = S.rows();
      rows = std::max(rows, (S * S.transpose() - DenseMatrix::Identity(k, k)).cwiseAbs().maxCoeff());
    }
    const bool pass = naive <= 1e-12 && invol <= 1e-12 && orth <= 1e-12 && rows <= 1e-10;
    return Outcome{pass, "naive Hadamard " + fmt("%.1e", naive) + ", involution " + fmt("%.1e", invol) +
                             ", orthonormality " + fmt("%.1e", orth) + " (tol 1e-12), SRHT rows " +
                             fmt("%.1e", rows) + " (tol 1e-10)"};
  });

  std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
