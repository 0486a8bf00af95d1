#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "sketchopt/types.hpp"

namespace sketchopt::spectral {

enum class DensityFamily {
  /// Marchenko-Pastur law mu_rho: limit e.s.d. of C_S for Gaussian sketches.
  MarchenkoPastur,
  /// f_h: limit e.s.d. of C_S for SRHT and Haar sketches.
  Srht,
  /// f_{h,r}(y) = xi f_h(xi y): the same law for (n/m) C_S.
  SrhtRescaled,
};

/// A limiting spectral density together with its support edges.
class DensitySpec {
 public:
  /// Requires rho in (0, 1).
  static DensitySpec marchenko_pastur(double rho);
  /// Require 0 < gamma < xi < 1.
  static DensitySpec srht(double gamma, double xi);
  static DensitySpec srht_rescaled(double gamma, double xi);

  DensityFamily family() const { return family_; }
  double rho() const { return rho_; }
  double gamma() const { return gamma_; }
  double xi() const { return xi_; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

  /// False for the SRHT families once gamma + xi >= 1. The formula's
  /// continuous part then no longer carries unit mass (an atom at 1 appears),
  /// and density/CDF evaluation is refused.
  bool absolutely_continuous() const;

 private:
  DensitySpec() = default;
  DensityFamily family_ = DensityFamily::MarchenkoPastur;
  double rho_ = 0.0;
  double gamma_ = 0.0;
  double xi_ = 0.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// Edge eigenvalues of f_h.
std::pair<double, double> srht_edges(double gamma, double xi);

double density_eval(const DensitySpec& spec, double x);
std::pair<double, double> support_edges(const DensitySpec& spec);

/// Integral of `density(x) * weight(x)` over the support using the fixed
/// edge-aware rule.
template <class W>
double integrate_against(const DensitySpec& spec, W&& weight);

/// Cumulative distribution with the panel integrals precomputed once.
/// The sine-squared substitution interval [0, pi/2] is split into 200 panels
/// of 10 Gauss-Legendre nodes each; a query sums whole panels and integrates
/// the last partial panel on the fly.
class CdfTable {
 public:
  explicit CdfTable(const DensitySpec& spec);
  double operator()(double x) const;
  const DensitySpec& spec() const { return spec_; }

 private:
  double panel_integral(double theta_lo, double theta_hi) const;
  double integrand(double theta) const;

  DensitySpec spec_;
  double panel_width_ = 0.0;
  std::vector<double> prefix_;
};

double cdf_eval(const DensitySpec& spec, double x);

/// Stieltjes transform m_h(z) = integral of f_h(x) / (x - z) dx in closed
/// form. R(z) is taken as -sqrt(z - lambda_h) sqrt(z - Lambda_h) with
/// principal roots: analytic off [lambda_h, Lambda_h], positive on the
/// negative reals, and giving Im m_h > 0 on the upper half-plane.
/// Throws for z on [0, inf).
std::complex<double> stieltjes_mh(double gamma, double xi, std::complex<double> z);

struct EmpiricalSpectrum {
  Vector eigenvalues;  // ascending, already multiplied by rescale
  double rescale = 1.0;
};

EmpiricalSpectrum empirical_spectrum(const DenseMatrix& C, double rescale);

/// sup_x |F_emp(x) - F(x)|, evaluated at both one-sided limits of every jump.
double ks_distance(const EmpiricalSpectrum& es, const CdfTable& cdf);
double ks_distance(const EmpiricalSpectrum& es, const DensitySpec& spec);

}  // namespace sketchopt::spectral

#include "sketchopt/quadrature.hpp"

namespace sketchopt::spectral {

template <class W>
double integrate_against(const DensitySpec& spec, W&& weight) {
  return quadrature::integrate_edges(spec.support_lo(), spec.support_hi(), [&](double x) {
    return density_eval(spec, x) * weight(x);
  });
}

}  // namespace sketchopt::spectral
