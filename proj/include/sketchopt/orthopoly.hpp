#pragma once

#include <cstddef>
#include <vector>

namespace sketchopt::orthopoly {

/// Pi_t(x) for the Marchenko-Pastur family:
///   Pi_0 = 1, Pi_1 = 1 - x, Pi_t = (1 + rho - x) Pi_{t-1} - rho Pi_{t-2}.
/// Pi_t(0) = 1 and the leading coefficient is (-1)^t.
double mp_poly_eval(std::size_t t, double rho, double x);

/// Shifted Chebyshev polynomials of the second kind, orthonormal for x mu_rho(x).
double chebyshev_q_eval(std::size_t k, double rho, double x);

/// Scaling parameters that map the SRHT limit law onto a Marchenko-Pastur
/// problem with ratio kappa.
struct SrhtParams {
  double gamma = 0.0;
  double xi = 0.0;
  double lambda_h = 0.0;
  double Lambda_h = 0.0;
  double tau = 0.0;
  double c = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double omega = 0.0;
  double kappa = 0.0;
  double eta = 0.0;

  /// Roots x1 > x2 > 0 of x^2 - eta x + kappa.
  double root_hi() const;
  double root_lo() const;
};

SrhtParams srht_params(double gamma, double xi);

enum class ScheduleKind { GaussianOpt, SrhtOpt, HeavyBall };

/// Coefficients (a_t, b_t) of the generic update
///   x_t = x_{t-1} + b_t H_S^{-1} g_{t-1} + (1 - a_t)(x_{t-2} - x_{t-1}),
/// with x_1 = x_0 + b_1 H_S^{-1} g_0. a_t is defined for t >= 2, b_t for t >= 1.
/// Accessors return the delta-perturbed values (1 + delta) a_t and (1 - delta) b_t.
class CoefficientSchedule {
 public:
  CoefficientSchedule(ScheduleKind kind, std::vector<double> a, std::vector<double> b);

  ScheduleKind kind() const { return kind_; }
  std::size_t horizon() const { return b_.size() - 1; }
  double delta() const { return delta_; }

  double a(std::size_t t) const;
  double b(std::size_t t) const;
  double raw_a(std::size_t t) const;
  double raw_b(std::size_t t) const;

  /// Requires delta in [0, 0.1].
  CoefficientSchedule with_delta(double delta) const;

 private:
  ScheduleKind kind_;
  std::vector<double> a_;  // index t, entries 0 and 1 unused
  std::vector<double> b_;  // index t, entry 0 unused
  double delta_ = 0.0;
};

CoefficientSchedule gaussian_coefficients(double rho, std::size_t T);

/// Propagates v_t = u_t / u_{t-1} only, so arbitrarily long horizons stay
/// bounded: v_1 = eta - kappa, v_t = eta - kappa / v_{t-1},
/// a_t = eta / v_t, b_t = -omega c / v_t.
CoefficientSchedule srht_coefficients(const SrhtParams& params, std::size_t T);

/// Heavy-ball x_{t+1} = x_t - mu H^{-1} g_t + beta (x_t - x_{t-1}) written as
/// a constant schedule a = 1 + beta, b = -mu.
CoefficientSchedule heavyball_coefficients(double mu, double beta, std::size_t T);

/// u_0..u_T from u_{t+1} = eta u_t - kappa u_{t-1}, u_0 = 1, u_1 = eta - kappa.
std::vector<double> u_recursion(const SrhtParams& params, std::size_t T);
double u_closed_form(const SrhtParams& params, std::size_t t);

/// Rbar_t(x) = Pi^kappa_t(omega (c x - c)) / Pi^kappa_t(-omega c), the
/// SRHT-optimal error polynomial in the variable x = eigenvalue of C_S^{-1}.
double srht_poly_eval(std::size_t t, const SrhtParams& params, double x);

/// R_t(x) = Rbar_t(x / c).
double srht_r_eval(std::size_t t, const SrhtParams& params, double x);

/// rho^t.
double theoretical_loss_gaussian(std::size_t t, double rho);

struct RateReport {
  double rho = 0.0;
  double rho_h = 0.0;
  double rho_h_ref = 0.0;
};

RateReport rate_report(double gamma, double xi);

}  // namespace sketchopt::orthopoly
