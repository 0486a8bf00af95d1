#include <algorithm>
#include <cmath>
#include <string>

#include "sketchopt/errors.hpp"
#include "sketchopt/harness.hpp"

namespace sketchopt::harness {

namespace {

constexpr double kPrecisionFloor = 1e-22;
constexpr std::size_t kMinPoints = 4;

}  // namespace

RateFit fit_rate_window(const std::vector<double>& errors_sq, std::size_t t_min,
                        std::size_t t_max) {
  if (errors_sq.empty()) throw InvalidParameter("fit_rate: empty trace");
  if (t_max < t_min + (kMinPoints - 1)) {
    throw InvalidParameter("fit_rate: window [" + std::to_string(t_min) + ", " +
                           std::to_string(t_max) + "] has fewer than 4 points");
  }
  const double floor = kPrecisionFloor * errors_sq.front();
  std::size_t hi = std::min(t_max, errors_sq.size() - 1);
  for (std::size_t t = t_min; t <= hi; ++t) {
    const double e = errors_sq[t];
    if (!std::isfinite(e) || e <= 0.0 || e <= floor) {
      if (t == 0) {
        hi = 0;
        break;
      }
      hi = t - 1;
      break;
    }
  }
  if (hi < t_min || hi - t_min + 1 < kMinPoints) {
    throw InvalidParameter("fit_rate: fewer than 4 usable points in window starting at t=" +
                           std::to_string(t_min));
  }

  const double count = static_cast<double>(hi - t_min + 1);
  double mean_t = 0.0;
  double mean_y = 0.0;
  for (std::size_t t = t_min; t <= hi; ++t) {
    mean_t += static_cast<double>(t);
    mean_y += std::log(errors_sq[t]);
  }
  mean_t /= count;
  mean_y /= count;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t t = t_min; t <= hi; ++t) {
    const double dt = static_cast<double>(t) - mean_t;
    sxy += dt * (std::log(errors_sq[t]) - mean_y);
    sxx += dt * dt;
  }
  RateFit fit;
  fit.log_slope = sxy / sxx;
  fit.rate = std::exp(fit.log_slope);
  fit.t_min = t_min;
  fit.t_max = hi;
  return fit;
}

double fit_rate(const std::vector<double>& errors_sq, std::size_t t_min, std::size_t t_max) {
  return fit_rate_window(errors_sq, t_min, t_max).rate;
}

double fit_rate(const solvers::SolverTrace& trace, std::size_t t_min, std::size_t t_max) {
  return fit_rate(trace.errors_sq, t_min, t_max);
}

}  // namespace sketchopt::harness
