#include "zpd/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace zpd {

namespace {

void require_same_shape(const Element& a, const Element& b, const char* what) {
  if (!(a.shape() == b.shape())) {
    throw ShapeError(std::string(what) + ": shape mismatch");
  }
}

Eigen::VectorXd singular_values(const Matrix& m) {
  if (m.size() == 0) return {};
  return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

}  // namespace

Shape::Shape(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
  if (dims_.empty()) throw ShapeError("shape must have at least one block");
  offsets_.reserve(dims_.size());
  for (int n : dims_) {
    if (n < 1) throw ShapeError("block dimensions must be positive");
    offsets_.push_back(dim_);
    dim_ += n * n;
  }
}

Shape::Shape(std::initializer_list<int> block_dims) : Shape(std::vector<int>(block_dims)) {}

int Shape::max_block_dim() const { return *std::max_element(dims_.begin(), dims_.end()); }

Shape::Coordinate Shape::coordinate(int index) const {
  if (index < 0 || index >= dim_) throw ShapeError("vectorization index out of range");
  int block = num_blocks() - 1;
  while (offsets_[static_cast<std::size_t>(block)] > index) --block;
  const int local = index - offsets_[static_cast<std::size_t>(block)];
  const int n = dims_[static_cast<std::size_t>(block)];
  return {block, local / n, local % n};
}

Element::Element(Shape shape, std::vector<Matrix> blocks)
    : shape_(std::move(shape)), blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != shape_.num_blocks()) {
    throw ShapeError("number of blocks does not match shape");
  }
  for (int i = 0; i < shape_.num_blocks(); ++i) {
    const auto& m = blocks_[static_cast<std::size_t>(i)];
    if (m.rows() != shape_.block_dim(i) || m.cols() != shape_.block_dim(i)) {
      std::ostringstream msg;
      msg << "block " << i << " has size " << m.rows() << "x" << m.cols() << ", expected "
          << shape_.block_dim(i);
      throw ShapeError(msg.str());
    }
  }
}

Element Element::zero(const Shape& shape) {
  std::vector<Matrix> blocks;
  for (int n : shape.block_dims()) blocks.push_back(Matrix::Zero(n, n));
  return {shape, std::move(blocks)};
}

Element Element::identity(const Shape& shape) {
  std::vector<Matrix> blocks;
  for (int n : shape.block_dims()) blocks.push_back(Matrix::Identity(n, n));
  return {shape, std::move(blocks)};
}

Element Element::block_identity(const Shape& shape, int i) {
  const int n = shape.block_dim(i);
  return embed(shape, i, Matrix::Identity(n, n));
}

Element Element::matrix_unit(const Shape& shape, int block, int row, int col) {
  const int n = shape.block_dim(block);
  if (row < 0 || row >= n || col < 0 || col >= n) throw ShapeError("matrix unit out of range");
  Matrix m = Matrix::Zero(n, n);
  m(row, col) = 1.0;
  return embed(shape, block, m);
}

Element Element::embed(const Shape& shape, int block, const Matrix& m) {
  if (block < 0 || block >= shape.num_blocks()) throw ShapeError("block index out of range");
  Element e = zero(shape);
  if (m.rows() != shape.block_dim(block) || m.cols() != shape.block_dim(block)) {
    throw ShapeError("embedded matrix does not match block size");
  }
  e.blocks_[static_cast<std::size_t>(block)] = m;
  return e;
}

Element Element::from_vector(const Shape& shape, const Vector& v) {
  if (v.size() != shape.dim()) throw ShapeError("vector length does not match dim(A)");
  std::vector<Matrix> blocks;
  for (int i = 0; i < shape.num_blocks(); ++i) {
    const int n = shape.block_dim(i);
    Matrix m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = v(shape.offset(i) + r * n + c);
    blocks.push_back(std::move(m));
  }
  return {shape, std::move(blocks)};
}

Element Element::basis(const Shape& shape, int index) {
  const auto coord = shape.coordinate(index);
  return matrix_unit(shape, coord.block, coord.row, coord.col);
}

Vector Element::vectorize() const {
  Vector v(shape_.dim());
  for (int i = 0; i < shape_.num_blocks(); ++i) {
    const auto& m = blocks_[static_cast<std::size_t>(i)];
    const int n = shape_.block_dim(i);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) v(shape_.offset(i) + r * n + c) = m(r, c);
  }
  return v;
}

double Element::norm() const {
  double sq = 0.0;
  for (const auto& m : blocks_) sq += m.squaredNorm();
  return std::sqrt(sq);
}

std::vector<int> Element::support(double abs_tol) const {
  std::vector<int> out;
  for (int i = 0; i < shape_.num_blocks(); ++i) {
    if (blocks_[static_cast<std::size_t>(i)].norm() > abs_tol) out.push_back(i);
  }
  return out;
}

Element Element::adjoint() const {
  std::vector<Matrix> blocks;
  blocks.reserve(blocks_.size());
  for (const auto& m : blocks_) blocks.push_back(m.adjoint());
  return {shape_, std::move(blocks)};
}

Element& Element::operator+=(const Element& other) {
  require_same_shape(*this, other, "add");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += other.blocks_[i];
  return *this;
}

Element& Element::operator-=(const Element& other) {
  require_same_shape(*this, other, "subtract");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= other.blocks_[i];
  return *this;
}

Element& Element::operator*=(Complex s) {
  for (auto& m : blocks_) m *= s;
  return *this;
}

Element operator*(const Element& a, const Element& b) { return multiply(a, b); }

Element multiply(const Element& a, const Element& b) {
  require_same_shape(a, b, "multiply");
  std::vector<Matrix> blocks;
  blocks.reserve(a.blocks().size());
  for (std::size_t i = 0; i < a.blocks().size(); ++i) {
    blocks.push_back(a.blocks()[i] * b.blocks()[i]);
  }
  return {a.shape(), std::move(blocks)};
}

Element adjoint(const Element& a) { return a.adjoint(); }

Element project_block(const Element& a, int i) {
  if (i < 0 || i >= a.shape().num_blocks()) throw ShapeError("block index out of range");
  return Element::embed(a.shape(), i, a.block(i));
}

Element drop_blocks(const Element& a, std::initializer_list<int> blocks) {
  std::vector<Matrix> out = a.blocks();
  for (int i : blocks) {
    if (i < 0 || i >= a.shape().num_blocks()) throw ShapeError("block index out of range");
    out[static_cast<std::size_t>(i)].setZero();
  }
  return {a.shape(), std::move(out)};
}

RankProfile rank_profile(const Element& c, double tol) {
  const Shape& shape = c.shape();
  std::vector<Eigen::VectorXd> svals;
  double sigma_max = 0.0;
  for (const auto& m : c.blocks()) {
    svals.push_back(singular_values(m));
    if (svals.back().size() > 0) sigma_max = std::max(sigma_max, svals.back().maxCoeff());
  }
  RankProfile profile;
  profile.threshold_used = tol * sigma_max * shape.max_block_dim();
  for (const auto& s : svals) {
    int r = 0;
    if (sigma_max > 0.0) {
      for (Eigen::Index j = 0; j < s.size(); ++j) r += s(j) > profile.threshold_used ? 1 : 0;
    }
    profile.ranks.push_back(r);
  }
  return profile;
}

RankHypothesis satisfies_rank_hypothesis(const Element& c, double tol) {
  RankHypothesis result;
  result.profile = rank_profile(c, tol);
  const bool all_zero = std::all_of(result.profile.ranks.begin(), result.profile.ranks.end(),
                                    [](int r) { return r == 0; });
  result.holds = true;
  if (!all_zero) {
    for (int i = 0; i < c.shape().num_blocks(); ++i) {
      if (result.profile.ranks[static_cast<std::size_t>(i)] > c.shape().block_dim(i) - 2) {
        result.holds = false;
      }
    }
  }
  return result;
}

Element random_element(const Shape& shape, std::uint64_t seed, Distribution distribution) {
  Rng rng(seed);
  return random_element(shape, rng, distribution);
}

Element random_element(const Shape& shape, Rng& rng, Distribution distribution) {
  std::vector<Matrix> blocks;
  for (int n : shape.block_dims()) {
    Matrix m = rng.gaussian_matrix(n, n);
    if (distribution == Distribution::kInvertibleGaussian) {
      int attempts = 1;
      for (;;) {
        const Eigen::VectorXd s = singular_values(m);
        if (s(s.size() - 1) > 1e-6 * s(0)) break;
        if (attempts >= 100) throw Error("degenerate RNG stream");
        m = rng.gaussian_matrix(n, n);
        ++attempts;
      }
    }
    blocks.push_back(std::move(m));
  }
  return {shape, std::move(blocks)};
}

Element inverse(const Element& a) {
  std::vector<Matrix> blocks;
  for (const auto& m : a.blocks()) {
    Eigen::FullPivLU<Matrix> lu(m);
    if (!lu.isInvertible()) throw PreconditionError("element is not invertible");
    blocks.push_back(lu.inverse());
  }
  return {a.shape(), std::move(blocks)};
}

double condition_number(const Element& a) {
  double worst = 1.0;
  for (const auto& m : a.blocks()) {
    const Eigen::VectorXd s = singular_values(m);
    const double smin = s(s.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, s(0) / smin);
  }
  return worst;
}

}  // namespace zpd
