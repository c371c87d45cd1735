#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "zpd/random.hpp"
#include "zpd/types.hpp"

namespace zpd {

/**
 * Block sizes (n_1, ..., n_k) of a direct sum M_{n_1}(C) + ... + M_{n_k}(C).
 *
 * Vectorization order, used by every tensor and linear-map matrix in the
 * library: blocks in shape order, each block row-major. Block i therefore
 * occupies coordinates [offset(i), offset(i) + n_i^2).
 */
class Shape {
 public:
  Shape() = default;
  explicit Shape(std::vector<int> block_dims);
  Shape(std::initializer_list<int> block_dims);

  const std::vector<int>& block_dims() const { return dims_; }
  int num_blocks() const { return static_cast<int>(dims_.size()); }
  int block_dim(int i) const { return dims_.at(static_cast<std::size_t>(i)); }
  int max_block_dim() const;
  /// dim(A) = sum of n_i^2.
  int dim() const { return dim_; }
  /// First vectorization coordinate of block i.
  int offset(int i) const { return offsets_.at(static_cast<std::size_t>(i)); }
  /// Maps a vectorization coordinate to (block, row, col).
  struct Coordinate {
    int block;
    int row;
    int col;
  };
  Coordinate coordinate(int index) const;

  friend bool operator==(const Shape&, const Shape&) = default;

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int dim_ = 0;
};

/// An element of a direct sum of square complex matrix blocks.
class Element {
 public:
  Element() = default;
  Element(Shape shape, std::vector<Matrix> blocks);

  static Element zero(const Shape& shape);
  static Element identity(const Shape& shape);
  /// Identity on block i, zero elsewhere.
  static Element block_identity(const Shape& shape, int i);
  /// Matrix unit e_{row,col} (0-based) placed in block i.
  static Element matrix_unit(const Shape& shape, int block, int row, int col);
  /// The matrix m in block i, zero elsewhere.
  static Element embed(const Shape& shape, int block, const Matrix& m);
  static Element from_vector(const Shape& shape, const Vector& v);
  /// The element whose vectorization is the standard basis vector `index`.
  static Element basis(const Shape& shape, int index);

  const Shape& shape() const { return shape_; }
  const Matrix& block(int i) const { return blocks_.at(static_cast<std::size_t>(i)); }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  Vector vectorize() const;
  /// Frobenius norm.
  double norm() const;
  bool is_zero(double abs_tol = 0.0) const { return norm() <= abs_tol; }
  /// Indices of blocks whose Frobenius norm exceeds abs_tol.
  std::vector<int> support(double abs_tol = 0.0) const;

  Element adjoint() const;

  Element& operator+=(const Element& other);
  Element& operator-=(const Element& other);
  Element& operator*=(Complex s);

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator-(Element a) { return a *= Complex(-1.0); }
  friend Element operator*(Complex s, Element a) { return a *= s; }
  friend Element operator*(double s, Element a) { return a *= Complex(s); }
  friend Element operator*(const Element& a, const Element& b);

 private:
  Shape shape_;
  std::vector<Matrix> blocks_;
};

/// Blockwise product. Throws ShapeError if shapes differ.
Element multiply(const Element& a, const Element& b);
Element adjoint(const Element& a);
/// a on block i, zero elsewhere.
Element project_block(const Element& a, int i);
/// a with block i (and j, when given) set to zero: the truncations c_{!=i}
/// and c_{!=i,j}.
Element drop_blocks(const Element& a, std::initializer_list<int> blocks);

struct RankProfile {
  std::vector<int> ranks;
  double threshold_used = 0.0;
};

/// Numerical rank of each block. A singular value counts when it exceeds
/// tol * sigma_max(c) * max_i(n_i), sigma_max taken over all blocks.
RankProfile rank_profile(const Element& c, double tol = kDefaultTol);

struct RankHypothesis {
  bool holds = false;
  RankProfile profile;
};

/// rank(c_i) <= n_i - 2 in every block. c = 0 always satisfies it.
RankHypothesis satisfies_rank_hypothesis(const Element& c, double tol = kDefaultTol);

enum class Distribution { kGaussian, kInvertibleGaussian };

/// Deterministic given the seed. The invertible variant redraws a block until
/// its smallest singular value exceeds 1e-6 of its largest, at most 100 times.
Element random_element(const Shape& shape, std::uint64_t seed,
                       Distribution distribution = Distribution::kGaussian);
Element random_element(const Shape& shape, Rng& rng,
                       Distribution distribution = Distribution::kGaussian);

/// Inverse of an element invertible in every block.
Element inverse(const Element& a);

/// Largest per-block 2-norm condition number; infinity if some block is singular.
double condition_number(const Element& a);

}  // namespace zpd
