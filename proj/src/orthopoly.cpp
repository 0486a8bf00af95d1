#include "sketchopt/orthopoly.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sketchopt/errors.hpp"
#include "sketchopt/spectral.hpp"

namespace sketchopt::orthopoly {

namespace {

void require_rho(double rho) {
  if (!(0.0 < rho && rho < 1.0)) {
    throw InvalidParameter("rho must lie in (0,1), got " + std::to_string(rho));
  }
}

// Three-term recursion shared by Pi_t for any ratio r.
double mp_family(std::size_t t, double r, double x) {
  double prev = 1.0;
  if (t == 0) return prev;
  double cur = 1.0 - x;
  for (std::size_t k = 2; k <= t; ++k) {
    const double next = (1.0 + r - x) * cur - r * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace

double mp_poly_eval(std::size_t t, double rho, double x) {
  require_rho(rho);
  return mp_family(t, rho, x);
}

double chebyshev_q_eval(std::size_t k, double rho, double x) {
  require_rho(rho);
  const double y = (x - (1.0 + rho)) / std::sqrt(rho);
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = y;
  for (std::size_t j = 1; j < k; ++j) {
    const double next = y * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double SrhtParams::root_hi() const { return 0.5 * eta + std::sqrt(0.25 * eta * eta - kappa); }
double SrhtParams::root_lo() const { return 0.5 * eta - std::sqrt(0.25 * eta * eta - kappa); }

SrhtParams srht_params(double gamma, double xi) {
  const auto [lo, hi] = spectral::srht_edges(gamma, xi);
  SrhtParams p;
  p.gamma = gamma;
  p.xi = xi;
  p.lambda_h = lo;
  p.Lambda_h = hi;
  const double sl = std::sqrt(lo);
  const double sh = std::sqrt(hi);
  const double ratio = (sh - sl) / (sh + sl);
  p.tau = ratio * ratio;
  const double inv = std::sqrt(1.0 / hi) + std::sqrt(1.0 / lo);
  p.c = 4.0 / (inv * inv);
  const double st = std::sqrt(p.tau);
  p.alpha = (1.0 - st) * (1.0 - st);
  p.beta = (1.0 + st) * (1.0 + st);
  if (!(p.alpha > p.c)) {
    throw InvalidParameter("srht_params: alpha <= c, omega and kappa would be complex");
  }
  const double up = std::sqrt(p.beta - p.c);
  const double dn = std::sqrt(p.alpha - p.c);
  p.omega = 4.0 / ((up + dn) * (up + dn));
  const double k = (up - dn) / (up + dn);
  p.kappa = k * k;
  p.eta = 1.0 + p.kappa + p.omega * p.c;
  return p;
}

CoefficientSchedule::CoefficientSchedule(ScheduleKind kind, std::vector<double> a,
                                         std::vector<double> b)
    : kind_(kind), a_(std::move(a)), b_(std::move(b)) {
  if (b_.size() < 2 || a_.size() != b_.size()) {
    throw std::invalid_argument("CoefficientSchedule: need matching a, b with T >= 1");
  }
}

double CoefficientSchedule::raw_a(std::size_t t) const {
  if (t < 2 || t >= a_.size()) {
    throw std::out_of_range("CoefficientSchedule::a: t=" + std::to_string(t) +
                            " outside [2, " + std::to_string(horizon()) + "]");
  }
  return a_[t];
}

double CoefficientSchedule::raw_b(std::size_t t) const {
  if (t < 1 || t >= b_.size()) {
    throw std::out_of_range("CoefficientSchedule::b: t=" + std::to_string(t) +
                            " outside [1, " + std::to_string(horizon()) + "]");
  }
  return b_[t];
}

double CoefficientSchedule::a(std::size_t t) const { return (1.0 + delta_) * raw_a(t); }
double CoefficientSchedule::b(std::size_t t) const { return (1.0 - delta_) * raw_b(t); }

CoefficientSchedule CoefficientSchedule::with_delta(double delta) const {
  if (!(delta >= 0.0 && delta <= 0.1)) {
    throw InvalidParameter("delta must lie in [0, 0.1], got " + std::to_string(delta));
  }
  CoefficientSchedule copy = *this;
  copy.delta_ = delta;
  return copy;
}

CoefficientSchedule gaussian_coefficients(double rho, std::size_t T) {
  require_rho(rho);
  if (T < 1) throw InvalidParameter("schedule horizon must be >= 1");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> a(T + 1, 1.0 + rho);
  std::vector<double> b(T + 1, -(1.0 - rho) * (1.0 - rho));
  a[0] = a[1] = nan;
  b[0] = nan;
  return {ScheduleKind::GaussianOpt, std::move(a), std::move(b)};
}

CoefficientSchedule srht_coefficients(const SrhtParams& params, std::size_t T) {
  if (T < 1) throw InvalidParameter("schedule horizon must be >= 1");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double wc = params.omega * params.c;
  std::vector<double> a(T + 1, nan);
  std::vector<double> b(T + 1, nan);
  double v = params.eta - params.kappa;
  b[1] = -wc / v;
  for (std::size_t t = 2; t <= T; ++t) {
    v = params.eta - params.kappa / v;
    a[t] = params.eta / v;
    b[t] = -wc / v;
  }
  return {ScheduleKind::SrhtOpt, std::move(a), std::move(b)};
}

CoefficientSchedule heavyball_coefficients(double mu, double beta, std::size_t T) {
  if (T < 1) throw InvalidParameter("schedule horizon must be >= 1");
  if (!(mu > 0.0) || !(beta >= 0.0 && beta < 1.0)) {
    throw InvalidParameter("heavy-ball needs mu > 0 and beta in [0,1)");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> a(T + 1, 1.0 + beta);
  std::vector<double> b(T + 1, -mu);
  a[0] = a[1] = nan;
  b[0] = nan;
  return {ScheduleKind::HeavyBall, std::move(a), std::move(b)};
}

std::vector<double> u_recursion(const SrhtParams& params, std::size_t T) {
  std::vector<double> u(T + 1);
  u[0] = 1.0;
  if (T >= 1) u[1] = params.eta - params.kappa;
  for (std::size_t t = 2; t <= T; ++t) {
    u[t] = params.eta * u[t - 1] - params.kappa * u[t - 2];
  }
  return u;
}

double u_closed_form(const SrhtParams& params, std::size_t t) {
  const double x1 = params.root_hi();
  const double x2 = params.root_lo();
  const double k = params.kappa;
  const double td = static_cast<double>(t);
  return ((x1 - k) * std::pow(x1, td) + (k - x2) * std::pow(x2, td)) / (x1 - x2);
}

double srht_poly_eval(std::size_t t, const SrhtParams& params, double x) {
  const double wc = params.omega * params.c;
  return mp_family(t, params.kappa, wc * x - wc) / mp_family(t, params.kappa, -wc);
}

double srht_r_eval(std::size_t t, const SrhtParams& params, double x) {
  return srht_poly_eval(t, params, x / params.c);
}

double theoretical_loss_gaussian(std::size_t t, double rho) {
  return std::pow(rho, static_cast<double>(t));
}

RateReport rate_report(double gamma, double xi) {
  if (!(0.0 < gamma && gamma < xi && xi < 1.0)) {
    throw InvalidParameter("rate_report needs 0 < gamma < xi < 1");
  }
  RateReport r;
  r.rho = gamma / xi;
  r.rho_h = r.rho * (1.0 - xi) / (1.0 - gamma);
  r.rho_h_ref = r.rho * xi * (1.0 - xi) / (gamma * gamma + xi - 2.0 * xi * gamma);
  return r;
}

}  // namespace sketchopt::orthopoly
