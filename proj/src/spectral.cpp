#include "sketchopt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sketchopt/errors.hpp"
#include "sketchopt/linalg.hpp"
#include "sketchopt/quadrature.hpp"

namespace sketchopt::spectral {

namespace {

constexpr std::size_t kCdfPanels = 200;
constexpr std::size_t kCdfPanelNodes = 10;

void require_srht_params(double gamma, double xi) {
  if (!(0.0 < gamma && gamma < xi && xi < 1.0)) {
    throw InvalidParameter("SRHT density needs 0 < gamma < xi < 1, got gamma=" +
                           std::to_string(gamma) + " xi=" + std::to_string(xi));
  }
}

void require_continuous(const DensitySpec& spec) {
  if (!spec.absolutely_continuous()) {
    throw InvalidParameter("SRHT density is only evaluated for gamma + xi < 1");
  }
}

const quadrature::GaussLegendreRule& panel_rule() {
  static const quadrature::GaussLegendreRule rule =
      quadrature::make_gauss_legendre(kCdfPanelNodes);
  return rule;
}

}  // namespace

std::pair<double, double> srht_edges(double gamma, double xi) {
  require_srht_params(gamma, xi);
  const double p = std::sqrt((1.0 - gamma) * xi);
  const double q = std::sqrt((1.0 - xi) * gamma);
  return {(p - q) * (p - q), (p + q) * (p + q)};
}

DensitySpec DensitySpec::marchenko_pastur(double rho) {
  if (!(0.0 < rho && rho < 1.0)) {
    throw InvalidParameter("Marchenko-Pastur needs rho in (0,1), got " + std::to_string(rho));
  }
  DensitySpec s;
  s.family_ = DensityFamily::MarchenkoPastur;
  s.rho_ = rho;
  const double r = std::sqrt(rho);
  s.lo_ = (1.0 - r) * (1.0 - r);
  s.hi_ = (1.0 + r) * (1.0 + r);
  return s;
}

DensitySpec DensitySpec::srht(double gamma, double xi) {
  const auto [lo, hi] = srht_edges(gamma, xi);
  DensitySpec s;
  s.family_ = DensityFamily::Srht;
  s.gamma_ = gamma;
  s.xi_ = xi;
  s.rho_ = gamma / xi;
  s.lo_ = lo;
  s.hi_ = hi;
  return s;
}

DensitySpec DensitySpec::srht_rescaled(double gamma, double xi) {
  require_srht_params(gamma, xi);
  const double rho = gamma / xi;
  const double p = std::sqrt(1.0 - gamma);
  const double q = std::sqrt((1.0 - xi) * rho);
  DensitySpec s;
  s.family_ = DensityFamily::SrhtRescaled;
  s.gamma_ = gamma;
  s.xi_ = xi;
  s.rho_ = rho;
  s.lo_ = (p - q) * (p - q);
  s.hi_ = (p + q) * (p + q);
  return s;
}

bool DensitySpec::absolutely_continuous() const {
  return family_ == DensityFamily::MarchenkoPastur || gamma_ + xi_ < 1.0;
}

double density_eval(const DensitySpec& spec, double x) {
  require_continuous(spec);
  const double lo = spec.support_lo();
  const double hi = spec.support_hi();
  if (!(x > lo && x < hi)) return 0.0;
  const double root = std::sqrt((hi - x) * (x - lo));
  constexpr double pi = std::numbers::pi;
  switch (spec.family()) {
    case DensityFamily::MarchenkoPastur:
      return root / (2.0 * pi * spec.rho() * x);
    case DensityFamily::Srht:
      return root / (2.0 * spec.gamma() * pi * x * (1.0 - x));
    case DensityFamily::SrhtRescaled:
      return root / (2.0 * spec.rho() * pi * x * (1.0 - spec.xi() * x));
  }
  return 0.0;
}

std::pair<double, double> support_edges(const DensitySpec& spec) {
  return {spec.support_lo(), spec.support_hi()};
}

CdfTable::CdfTable(const DensitySpec& spec) : spec_(spec) {
  require_continuous(spec_);
  panel_width_ = (std::numbers::pi / 2.0) / static_cast<double>(kCdfPanels);
  prefix_.assign(kCdfPanels + 1, 0.0);
  for (std::size_t k = 0; k < kCdfPanels; ++k) {
    const double a = panel_width_ * static_cast<double>(k);
    prefix_[k + 1] = prefix_[k] + panel_integral(a, a + panel_width_);
  }
}

double CdfTable::integrand(double theta) const {
  const double lo = spec_.support_lo();
  const double width = spec_.support_hi() - lo;
  const double s = std::sin(theta);
  return density_eval(spec_, lo + width * s * s) * width * std::sin(2.0 * theta);
}

double CdfTable::panel_integral(double theta_lo, double theta_hi) const {
  const auto& rule = panel_rule();
  const double half = 0.5 * (theta_hi - theta_lo);
  const double mid = 0.5 * (theta_hi + theta_lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * integrand(mid + half * rule.nodes[i]);
  }
  return sum * half;
}

double CdfTable::operator()(double x) const {
  const double lo = spec_.support_lo();
  const double hi = spec_.support_hi();
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  const double theta = std::asin(std::sqrt((x - lo) / (hi - lo)));
  const auto k = std::min(kCdfPanels - 1, static_cast<std::size_t>(theta / panel_width_));
  const double start = panel_width_ * static_cast<double>(k);
  const double value = prefix_[k] + panel_integral(start, theta);
  return std::clamp(value, 0.0, 1.0);
}

double cdf_eval(const DensitySpec& spec, double x) { return CdfTable(spec)(x); }

std::complex<double> stieltjes_mh(double gamma, double xi, std::complex<double> z) {
  require_srht_params(gamma, xi);
  if (z.imag() == 0.0 && z.real() >= 0.0) {
    throw InvalidParameter("stieltjes_mh: z must lie off [0, inf)");
  }
  const auto [lo, hi] = srht_edges(gamma, xi);
  std::complex<double> R;
  if (z.imag() == 0.0) {
    R = std::sqrt((lo - z.real()) * (hi - z.real()));
  } else {
    R = -std::sqrt(z - lo) * std::sqrt(z - hi);
  }
  const std::complex<double> one(1.0, 0.0);
  const std::complex<double> zz = z * (one - z);
  return ((2.0 * gamma - 1.0) / (one - z) + (xi - gamma) / zz - R / zz) / (2.0 * gamma);
}

EmpiricalSpectrum empirical_spectrum(const DenseMatrix& C, double rescale) {
  EmpiricalSpectrum es;
  es.eigenvalues = linalg::sym_eigenvalues(C) * rescale;
  es.rescale = rescale;
  return es;
}

double ks_distance(const EmpiricalSpectrum& es, const CdfTable& cdf) {
  const auto count = static_cast<std::size_t>(es.eigenvalues.size());
  if (count == 0) throw std::invalid_argument("ks_distance: empty spectrum");
  const double total = static_cast<double>(count);
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double f = cdf(es.eigenvalues(static_cast<Eigen::Index>(i)));
    const double below = static_cast<double>(i) / total;
    const double above = static_cast<double>(i + 1) / total;
    worst = std::max({worst, std::abs(above - f), std::abs(f - below)});
  }
  return worst;
}

double ks_distance(const EmpiricalSpectrum& es, const DensitySpec& spec) {
  return ks_distance(es, CdfTable(spec));
}

}  // namespace sketchopt::spectral
