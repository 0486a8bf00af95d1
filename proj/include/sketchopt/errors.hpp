#pragma once

#include <stdexcept>
#include <string>

namespace sketchopt {

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidParameter : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class RankDeficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSymmetric : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cholesky hit a pivot below 1e-12 of the largest diagonal entry. For a
/// sketched Gram matrix this means the sketch lost rank.
class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// SRHT row subsampling kept fewer rows than columns of A.
class SketchTooThin : public std::runtime_error {
 public:
  SketchTooThin(std::size_t kept, std::size_t cols)
      : std::runtime_error("SRHT kept " + std::to_string(kept) + " rows, need at least " +
                           std::to_string(cols)),
        kept_rows(kept),
        required(cols) {}
  std::size_t kept_rows;
  std::size_t required;
};

class DegenerateSvd : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sketchopt
