#pragma once

#include <cstdint>
#include <random>

#include "zpd/types.hpp"

namespace zpd {

/// Derives an independent 64-bit seed for sub-stream `stream` of `seed`.
///
/// Every random draw in the library goes through this splitter, so a sample
/// with index k depends only on (seed, k) and never on how many samples were
/// requested or on the order they were produced in.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  double normal();
  double uniform();
  /// Uniform integer in the closed range [lo, hi].
  int uniform_int(int lo, int hi);
  /// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
  Complex complex_normal();

  Vector gaussian_vector(Eigen::Index n);
  Vector unit_vector(Eigen::Index n);
  Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols);
  /// Haar-distributed unitary via QR of a Gaussian matrix with phase fix.
  Matrix unitary(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace zpd
