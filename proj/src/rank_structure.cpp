#include "zpd/rank_structure.hpp"

#include <algorithm>
#include <cmath>

namespace zpd {

namespace {

struct BlockSvd {
  Matrix u;
  Eigen::VectorXd s;
  Matrix v;
};

BlockSvd full_svd(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

// Removes from r its components along every vector of `basis` (assumed
// orthonormal), twice.
void project_off(Vector& r, const std::vector<Vector>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) r -= q * q.dot(r);
  }
}

}  // namespace

Matrix rank_one_matrix(const Vector& e, const Vector& f) { return e * f.adjoint(); }

Element rank_one_to_element(const Shape& shape, const RankOne& u) {
  if (u.block < 0 || u.block >= shape.num_blocks()) throw ShapeError("rank-one block out of range");
  const int n = shape.block_dim(u.block);
  if (u.e.size() != n || u.f.size() != n) throw ShapeError("rank-one vectors do not match block size");
  return Element::embed(shape, u.block, rank_one_matrix(u.e, u.f));
}

bool is_minimal_partial_isometry(const Element& a, double tol) {
  const double norm = a.norm();
  if (norm == 0.0) return false;
  if (a.support(tol * norm).size() != 1) return false;
  const RankProfile profile = rank_profile(a, tol);
  int total = 0;
  for (int r : profile.ranks) total += r;
  if (total != 1) return false;
  const Element cubed = a * a.adjoint() * a;
  return (cubed - a).norm() <= tol * std::max(1.0, norm);
}

Element MinPiDecomposition::reconstruct() const {
  Element out = Element::zero(shape);
  for (const auto& t : terms) out += t.lambda * rank_one_to_element(shape, t.u);
  return out;
}

std::vector<MinPiTerm> MinPiDecomposition::block_terms(int block) const {
  std::vector<MinPiTerm> out;
  for (const auto& t : terms) {
    if (t.u.block == block) out.push_back(t);
  }
  return out;
}

MinPiDecomposition minpi_decompose(const Element& a, double tol) {
  const RankProfile profile = rank_profile(a, tol);
  MinPiDecomposition out{a.shape(), {}};
  for (int i = 0; i < a.shape().num_blocks(); ++i) {
    const int r = profile.ranks[static_cast<std::size_t>(i)];
    if (r == 0) continue;
    const BlockSvd svd = full_svd(a.block(i));
    for (int j = 0; j < r; ++j) {
      out.terms.push_back({svd.s(j), RankOne{i, svd.u.col(j), svd.v.col(j)}});
    }
  }
  return out;
}

bool are_orthogonal(const Element& a, const Element& b, double tol) {
  const double scale = tol * a.norm() * b.norm();
  const Element bs = b.adjoint();
  return (a * bs).norm() <= scale && (bs * a).norm() <= scale;
}

bool rank_one_product_zero(const RankOne& u, const RankOne& v, double tol) {
  if (u.block != v.block) return true;
  if (u.f.size() != v.e.size()) throw ShapeError("rank-one vectors of different lengths");
  return std::abs(u.f.dot(v.e)) <= tol;
}

ZeroProductDecomposition zp_decompose_pair(const Element& x, const Element& y, double tol) {
  if ((x * y).norm() > tol * x.norm() * y.norm()) {
    throw PreconditionError("not a zero-product pair");
  }
  ZeroProductDecomposition out{minpi_decompose(x, tol), minpi_decompose(y, tol), 0.0};
  for (const auto& tx : out.x.terms) {
    for (const auto& ty : out.y.terms) {
      if (tx.u.block != ty.u.block) continue;
      out.max_cross_product = std::max(out.max_cross_product, std::abs(tx.u.f.dot(ty.u.e)));
    }
  }
  if (out.max_cross_product > 10.0 * tol) throw Error("cross-product residual too large");
  return out;
}

Element odd_cube_root(const Element& a, double tol) {
  const RankProfile profile = rank_profile(a, tol);
  std::vector<Matrix> blocks;
  for (int i = 0; i < a.shape().num_blocks(); ++i) {
    const BlockSvd svd = full_svd(a.block(i));
    Eigen::VectorXd root = svd.s.unaryExpr([](double x) { return std::cbrt(x); });
    const int r = profile.ranks[static_cast<std::size_t>(i)];
    root.tail(root.size() - r).setZero();
    blocks.push_back(svd.u * root.cast<Complex>().asDiagonal() * svd.v.adjoint());
  }
  return {a.shape(), std::move(blocks)};
}

SupportProjections support_projections(const Element& a, double tol) {
  const RankProfile profile = rank_profile(a, tol);
  std::vector<Matrix> left;
  std::vector<Matrix> right;
  for (int i = 0; i < a.shape().num_blocks(); ++i) {
    const int r = profile.ranks[static_cast<std::size_t>(i)];
    const BlockSvd svd = full_svd(a.block(i));
    const Matrix ur = svd.u.leftCols(r);
    const Matrix vr = svd.v.leftCols(r);
    left.push_back(ur * ur.adjoint());
    right.push_back(vr * vr.adjoint());
  }
  return {Element(a.shape(), std::move(left)), Element(a.shape(), std::move(right))};
}

PeirceComponents peirce_decompose(const Element& a, const Element& e, double tol) {
  if (!(a.shape() == e.shape())) throw ShapeError("peirce: shape mismatch");
  if ((e * e.adjoint() * e - e).norm() > tol * std::max(1.0, e.norm())) {
    throw PreconditionError("not a partial isometry");
  }
  const Element one = Element::identity(a.shape());
  const Element final_proj = e * e.adjoint();
  const Element initial_proj = e.adjoint() * e;
  PeirceComponents out;
  out.a2 = final_proj * a * initial_proj;
  out.a0 = (one - final_proj) * a * (one - initial_proj);
  out.a1 = a - out.a2 - out.a0;
  return out;
}

std::vector<Vector> orthonormal_complement(std::span<const Vector> vectors, int n, double drop_tol) {
  std::vector<Vector> span_basis;
  for (const auto& v : vectors) {
    if (v.size() != n) throw ShapeError("orthonormal_complement: vector length mismatch");
    Vector r = v;
    project_off(r, span_basis);
    const double norm = r.norm();
    if (norm > drop_tol * std::max(1.0, v.norm())) span_basis.push_back(r / norm);
  }
  const std::size_t wanted = static_cast<std::size_t>(n) - span_basis.size();
  std::vector<Vector> accepted;
  std::vector<Vector> all = span_basis;
  for (int k = 0; k < n && accepted.size() < wanted; ++k) {
    Vector r = Vector::Unit(n, k);
    project_off(r, all);
    const double norm = r.norm();
    if (norm < drop_tol) continue;
    r /= norm;
    accepted.push_back(r);
    all.push_back(r);
  }
  return accepted;
}

}  // namespace zpd
