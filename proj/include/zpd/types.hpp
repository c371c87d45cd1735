#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace zpd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Relative comparison tolerance used when a caller does not supply one.
inline constexpr double kDefaultTol = 1e-9;

/// Singular values below this fraction of the largest one are treated as zero
/// in the large tensor-span rank computations.
inline constexpr double kSpanRankThreshold = 1e-7;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or sizes of the arguments do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition of an operation does not hold for its input,
/// e.g. the rank hypothesis or a zero-product requirement.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace zpd
