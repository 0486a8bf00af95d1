#include <cmath>
#include <stdexcept>
#include <string>

#include "sketchopt/sketching.hpp"

namespace sketchopt::sketch {

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fwht_in_place(std::span<double> v) {
  const std::size_t n = v.size();
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("fwht_in_place: length " + std::to_string(n) +
                                " is not a power of two");
  }
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double x = v[j];
        const double y = v[j + h];
        v[j] = (x + y) * s;
        v[j + h] = (x - y) * s;
      }
    }
  }
}

void fwht_rows_in_place(DenseMatrix& M) {
  const std::size_t n = static_cast<std::size_t>(M.rows());
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("fwht_rows_in_place: row count " + std::to_string(n) +
                                " is not a power of two");
  }
  const Eigen::Index cols = M.cols();
  const double s = 1.0 / std::sqrt(2.0);
  double* base = M.data();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        double* top = base + static_cast<Eigen::Index>(j) * cols;
        double* bottom = base + static_cast<Eigen::Index>(j + h) * cols;
        for (Eigen::Index c = 0; c < cols; ++c) {
          const double x = top[c];
          const double y = bottom[c];
          top[c] = (x + y) * s;
          bottom[c] = (x - y) * s;
        }
      }
    }
  }
}

}  // namespace sketchopt::sketch
