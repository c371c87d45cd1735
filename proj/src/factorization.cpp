#include "zpd/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace zpd {

namespace {

struct BlockSvd {
  Matrix u;
  Eigen::VectorXd s;
  Matrix v;
  int rank = 0;
};

// SVD of one block with the same rank threshold as rank_profile applied to a
// single-block element.
BlockSvd block_svd(const Matrix& m, double tol) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  BlockSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV(), 0};
  if (out.s.size() > 0 && out.s(0) > 0.0) {
    const double threshold = tol * out.s(0) * static_cast<double>(m.rows());
    for (Eigen::Index j = 0; j < out.s.size(); ++j) out.rank += out.s(j) > threshold ? 1 : 0;
  }
  return out;
}

std::string ranks_to_string(const RankProfile& p) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < p.ranks.size(); ++i) out << (i ? "," : "") << p.ranks[i];
  out << ")";
  return out.str();
}

void require_rank_hypothesis(const Element& c, double tol) {
  const RankHypothesis rh = satisfies_rank_hypothesis(c, tol);
  if (!rh.holds) {
    std::ostringstream msg;
    msg << "rank hypothesis violated: rank profile " << ranks_to_string(rh.profile)
        << " for block sizes (";
    const auto& dims = c.shape().block_dims();
    for (std::size_t i = 0; i < dims.size(); ++i) msg << (i ? "," : "") << dims[i];
    msg << ")";
    throw PreconditionError(msg.str());
  }
}

// a = sum sqrt(alpha) e (x) h, b = sum sqrt(alpha) h (x) f with every h
// orthogonal to `forbidden`.
std::pair<Matrix, Matrix> factor_avoiding(const Matrix& c, const std::vector<Vector>& forbidden,
                                          double tol) {
  const auto n = c.rows();
  const BlockSvd svd = block_svd(c, tol);
  Matrix a = Matrix::Zero(n, n);
  Matrix b = Matrix::Zero(n, n);
  if (svd.rank == 0) return {a, b};
  const std::vector<Vector> h = orthonormal_complement(forbidden, static_cast<int>(n));
  if (static_cast<int>(h.size()) < svd.rank) {
    std::ostringstream msg;
    msg << "rank hypothesis violated: rank " << svd.rank << " exceeds the " << h.size()
        << "-dimensional room left by the zero-product pair";
    throw PreconditionError(msg.str());
  }
  for (int k = 0; k < svd.rank; ++k) {
    const double root = std::sqrt(svd.s(k));
    a += root * rank_one_matrix(svd.u.col(k), h[static_cast<std::size_t>(k)]);
    b += root * rank_one_matrix(h[static_cast<std::size_t>(k)], svd.v.col(k));
  }
  return {a, b};
}

// Right singular vectors of x span ker(x)^perp; left singular vectors of y
// span range(y).
std::vector<Vector> forbidden_directions(const Matrix& x, const Matrix& y, double tol) {
  std::vector<Vector> out;
  const BlockSvd sx = block_svd(x, tol);
  for (int k = 0; k < sx.rank; ++k) out.push_back(sx.v.col(k));
  const BlockSvd sy = block_svd(y, tol);
  for (int k = 0; k < sy.rank; ++k) out.push_back(sy.u.col(k));
  return out;
}

struct BlockPart {
  Matrix x;
  Matrix y;
  Matrix a;
  Matrix b;
};

struct BlockGeneralized {
  SplitSide side = SplitSide::kNone;
  std::vector<BlockPart> parts;
};

// Leading `keep` singular terms of m, and the remainder m - leading.
std::pair<Matrix, Matrix> split_by_singular_terms(const Matrix& m, int keep, double tol) {
  const BlockSvd svd = block_svd(m, tol);
  Matrix lead = Matrix::Zero(m.rows(), m.cols());
  for (int k = 0; k < keep; ++k) {
    lead += svd.s(k) * rank_one_matrix(svd.u.col(k), svd.v.col(k));
  }
  return {lead, m - lead};
}

// Generalized factorization of the block c through (x, y) inside M_n.
BlockGeneralized block_generalized(const Matrix& c, const Matrix& x, const Matrix& y, double tol) {
  const int n = static_cast<int>(c.rows());
  const int rank_c = block_svd(c, tol).rank;
  const int rank_x = block_svd(x, tol).rank;
  const int rank_y = block_svd(y, tol).rank;
  BlockGeneralized out;
  if (rank_c == 0) {
    out.parts.push_back({x, y, Matrix::Zero(n, n), Matrix::Zero(n, n)});
    return out;
  }
  if (rank_c <= n - rank_x - rank_y) {
    auto [a, b] = factor_avoiding(c, forbidden_directions(x, y, tol), tol);
    out.parts.push_back({x, y, std::move(a), std::move(b)});
    return out;
  }
  const int half_x = rank_x - rank_x / 2;
  if (rank_x >= 2 && rank_c <= n - half_x - rank_y) {
    out.side = SplitSide::kLeft;
    const auto [x1, x2] = split_by_singular_terms(x, rank_x / 2, tol);
    for (const Matrix& xp : {x1, x2}) {
      auto [a, b] = factor_avoiding(c, forbidden_directions(xp, y, tol), tol);
      out.parts.push_back({xp, y, std::move(a), std::move(b)});
    }
    return out;
  }
  const int half_y = rank_y - rank_y / 2;
  if (rank_y >= 2 && rank_c <= n - rank_x - half_y) {
    out.side = SplitSide::kRight;
    const auto [y1, y2] = split_by_singular_terms(y, rank_y / 2, tol);
    for (const Matrix& yp : {y1, y2}) {
      auto [a, b] = factor_avoiding(c, forbidden_directions(x, yp, tol), tol);
      out.parts.push_back({x, yp, std::move(a), std::move(b)});
    }
    return out;
  }
  std::ostringstream msg;
  msg << "no generalized factorization available in block: rank(c)=" << rank_c
      << ", rank(x)=" << rank_x << ", rank(y)=" << rank_y << ", n=" << n;
  throw PreconditionError(msg.str());
}

// Rank-one projection onto the first unit vector orthogonal to `avoid`.
Matrix annihilating_projection(const std::vector<Vector>& avoid, int n) {
  const std::vector<Vector> h = orthonormal_complement(avoid, n);
  if (h.empty()) throw PreconditionError("no nonzero annihilator in block");
  return rank_one_matrix(h.front(), h.front());
}

int single_block(const Element& e, double tol, const char* name) {
  const std::vector<int> support = e.support(tol * e.norm());
  if (support.size() > 1) {
    throw PreconditionError(std::string(name) + " must be supported on a single block");
  }
  return support.empty() ? -1 : support.front();
}

}  // namespace

double Witness::max_residual() const {
  return std::max({residual_ay, residual_xb, residual_abc});
}

Witness make_witness(const Element& x, const Element& y, const Element& c, Element a, Element b) {
  Witness w{std::move(a), std::move(b), 0.0, 0.0, 0.0};
  w.residual_ay = (w.a * y).norm();
  w.residual_xb = (x * w.b).norm();
  w.residual_abc = (w.a * w.b - c).norm();
  return w;
}

bool verify_witness(const Element& x, const Element& y, const Element& c, const Witness& w,
                    double tol) {
  if (!(x.shape() == c.shape() && y.shape() == c.shape() && w.a.shape() == c.shape() &&
        w.b.shape() == c.shape())) {
    throw ShapeError("verify_witness: shape mismatch");
  }
  const Witness fresh = make_witness(x, y, c, w.a, w.b);
  return fresh.residual_ay <= tol && fresh.residual_xb <= tol && fresh.residual_abc <= tol;
}

std::pair<Matrix, Matrix> factorize_block_matrices(const Matrix& c, const Matrix& x,
                                                   const Matrix& y, double tol) {
  if (c.rows() != c.cols() || x.rows() != c.rows() || x.cols() != c.cols() ||
      y.rows() != c.rows() || y.cols() != c.cols()) {
    throw ShapeError("factorize_block_matrices: size mismatch");
  }
  if ((x * y).norm() > tol * std::max(1.0, x.norm() * y.norm())) {
    throw PreconditionError("xy != 0");
  }
  return factor_avoiding(c, forbidden_directions(x, y, tol), tol);
}

Witness factorize_through_block(const Matrix& c_block, const RankOne& u, const RankOne& v,
                                double tol) {
  const auto n = c_block.rows();
  if (c_block.cols() != n || u.e.size() != n || u.f.size() != n || v.e.size() != n ||
      v.f.size() != n) {
    throw ShapeError("factorize_through_block: size mismatch");
  }
  if (u.block != v.block || !rank_one_product_zero(u, v, tol)) {
    throw PreconditionError("uv != 0");
  }
  const int rank_c = block_svd(c_block, tol).rank;
  if (rank_c > n - 2) {
    std::ostringstream msg;
    msg << "rank hypothesis violated: rank " << rank_c << " > " << n << " - 2";
    throw PreconditionError(msg.str());
  }
  auto [a, b] = factor_avoiding(c_block, {u.f, v.e}, tol);
  const Shape shape{static_cast<int>(n)};
  const RankOne u0{0, u.e, u.f};
  const RankOne v0{0, v.e, v.f};
  return make_witness(rank_one_to_element(shape, u0), rank_one_to_element(shape, v0),
                      Element::embed(shape, 0, c_block), Element::embed(shape, 0, a),
                      Element::embed(shape, 0, b));
}

const char* to_string(DispatchCase c) {
  switch (c) {
    case DispatchCase::kSameBlock: return "same-block";
    case DispatchCase::kBothZero: return "both-zero";
    case DispatchCase::kOneNonzero: return "one-nonzero";
    case DispatchCase::kBothNonzero: return "both-nonzero";
  }
  return "unknown";
}

Factorization factorize_through(const Element& c, const RankOne& u, const RankOne& v, double tol) {
  const Shape& shape = c.shape();
  require_rank_hypothesis(c, tol);
  if (!rank_one_product_zero(u, v, tol)) throw PreconditionError("uv != 0");
  const Element u_el = rank_one_to_element(shape, u);
  const Element v_el = rank_one_to_element(shape, v);
  const RankProfile profile = rank_profile(c, tol);
  auto nonzero = [&](int i) { return profile.ranks[static_cast<std::size_t>(i)] > 0; };

  // Blocks away from u and v carry (1, c).
  std::vector<Matrix> a_blocks;
  std::vector<Matrix> b_blocks;
  for (int i = 0; i < shape.num_blocks(); ++i) {
    a_blocks.push_back(Matrix::Identity(shape.block_dim(i), shape.block_dim(i)));
    b_blocks.push_back(c.block(i));
  }
  auto set_block = [&](int i, const Witness& w) {
    a_blocks[static_cast<std::size_t>(i)] = w.a.block(0);
    b_blocks[static_cast<std::size_t>(i)] = w.b.block(0);
  };
  auto clear_block = [&](int i) {
    a_blocks[static_cast<std::size_t>(i)].setZero();
    b_blocks[static_cast<std::size_t>(i)].setZero();
  };

  const int mu = u.block;
  const int nu = v.block;
  Factorization out;
  if (mu == nu) {
    out.dispatch = DispatchCase::kSameBlock;
    if (nonzero(mu)) {
      set_block(mu, factorize_through_block(c.block(mu), u, v, tol));
    } else {
      clear_block(mu);
    }
  } else {
    const int n_mu = shape.block_dim(mu);
    const int n_nu = shape.block_dim(nu);
    if (nonzero(mu)) {
      // Auxiliary v' = e' (x) e' with f_u orthogonal to e', so u v' = 0.
      const Vector e_aux = orthonormal_complement(std::vector<Vector>{u.f}, n_mu).front();
      set_block(mu, factorize_through_block(c.block(mu), u, RankOne{mu, e_aux, e_aux}, tol));
    } else {
      clear_block(mu);
    }
    if (nonzero(nu)) {
      // Auxiliary u' = f' (x) f' with f' orthogonal to e_v, so u' v = 0.
      const Vector f_aux = orthonormal_complement(std::vector<Vector>{v.e}, n_nu).front();
      set_block(nu, factorize_through_block(c.block(nu), RankOne{nu, f_aux, f_aux}, v, tol));
    } else {
      clear_block(nu);
    }
    const int count = (nonzero(mu) ? 1 : 0) + (nonzero(nu) ? 1 : 0);
    out.dispatch = count == 0   ? DispatchCase::kBothZero
                   : count == 1 ? DispatchCase::kOneNonzero
                                : DispatchCase::kBothNonzero;
  }
  out.witness = make_witness(u_el, v_el, c, Element(shape, std::move(a_blocks)),
                             Element(shape, std::move(b_blocks)));
  return out;
}

const char* to_string(SplitSide s) {
  switch (s) {
    case SplitSide::kNone: return "none";
    case SplitSide::kLeft: return "left";
    case SplitSide::kRight: return "right";
    case SplitSide::kBoth: return "both";
  }
  return "unknown";
}

double GeneralizedWitness::max_residual() const {
  double worst = 0.0;
  for (const auto& p : parts) worst = std::max(worst, p.witness.max_residual());
  return worst;
}

GeneralizedWitness generalized_factorize(const Element& c, const Element& x, const Element& y,
                                         double tol) {
  const Shape& shape = c.shape();
  if (!(x.shape() == shape && y.shape() == shape)) {
    throw ShapeError("generalized_factorize: shape mismatch");
  }
  if ((x * y).norm() > tol * x.norm() * y.norm()) {
    throw PreconditionError("not a zero-product pair");
  }
  require_rank_hypothesis(c, tol);
  int bx = single_block(x, tol, "x");
  int by = single_block(y, tol, "y");
  const bool x_zero = bx < 0;
  if (bx < 0 && by < 0) bx = by = 0;
  if (bx < 0) bx = by;
  if (by < 0) by = bx;

  const RankProfile profile = rank_profile(c, tol);
  auto nonzero = [&](int i) { return profile.ranks[static_cast<std::size_t>(i)] > 0; };

  GeneralizedWitness out;
  if (bx == by) {
    const int i = bx;
    const Element pad_a = Element::identity(shape) - Element::block_identity(shape, i);
    const Element pad_b = drop_blocks(c, {i});
    const BlockGeneralized local = block_generalized(c.block(i), x.block(i), y.block(i), tol);
    out.split_side = local.side;
    for (const auto& p : local.parts) {
      const Element xp = Element::embed(shape, i, p.x);
      const Element yp = Element::embed(shape, i, p.y);
      out.parts.push_back({xp, yp,
                           make_witness(xp, yp, c, Element::embed(shape, i, p.a) + pad_a,
                                        Element::embed(shape, i, p.b) + pad_b)});
    }
  } else {
    const int i = bx;
    const int j = by;
    const Matrix& xi = x.block(i);
    const Matrix& yj = y.block(j);
    const int ni = shape.block_dim(i);
    const int nj = shape.block_dim(j);

    // (x part, a_i, b_i) candidates from block i.
    std::vector<BlockPart> x_side;
    if (nonzero(i)) {
      const Matrix z = annihilating_projection(forbidden_directions(xi, Matrix::Zero(ni, ni), tol), ni);
      const BlockGeneralized local = block_generalized(c.block(i), xi, z, tol);
      if (local.side == SplitSide::kLeft) {
        x_side = local.parts;
      } else {
        x_side.push_back(local.parts.front());
        x_side.back().x = xi;
      }
    } else {
      x_side.push_back({xi, Matrix::Zero(ni, ni), Matrix::Zero(ni, ni), Matrix::Zero(ni, ni)});
    }
    // (y part, a_j, b_j) candidates from block j.
    std::vector<BlockPart> y_side;
    if (nonzero(j)) {
      const Matrix w = annihilating_projection(forbidden_directions(Matrix::Zero(nj, nj), yj, tol), nj);
      const BlockGeneralized local = block_generalized(c.block(j), w, yj, tol);
      if (local.side == SplitSide::kRight) {
        y_side = local.parts;
      } else {
        y_side.push_back(local.parts.front());
        y_side.back().y = yj;
      }
    } else {
      y_side.push_back({Matrix::Zero(nj, nj), yj, Matrix::Zero(nj, nj), Matrix::Zero(nj, nj)});
    }

    const Element pad_a =
        Element::identity(shape) - Element::block_identity(shape, i) - Element::block_identity(shape, j);
    const Element pad_b = drop_blocks(c, {i, j});
    for (const auto& px : x_side) {
      for (const auto& py : y_side) {
        const Element xp = Element::embed(shape, i, px.x);
        const Element yp = Element::embed(shape, j, py.y);
        Element a = Element::embed(shape, i, px.a) + Element::embed(shape, j, py.a) + pad_a;
        Element b = Element::embed(shape, i, px.b) + Element::embed(shape, j, py.b) + pad_b;
        out.parts.push_back({xp, yp, make_witness(xp, yp, c, std::move(a), std::move(b))});
      }
    }
    const bool split_x = x_side.size() > 1;
    const bool split_y = y_side.size() > 1;
    out.split_side = split_x && split_y ? SplitSide::kBoth
                     : split_x          ? SplitSide::kLeft
                     : split_y          ? SplitSide::kRight
                                        : SplitSide::kNone;
  }

  if (x_zero && out.split_side == SplitSide::kNone) {
    // x = 0 splits trivially as 0 + 0.
    out.split_side = SplitSide::kLeft;
    out.parts.push_back(out.parts.front());
  }
  return out;
}

bool verify_generalized(const Element& x, const Element& y, const Element& c,
                        const GeneralizedWitness& w, double tol) {
  if (w.parts.empty()) return false;
  for (const auto& p : w.parts) {
    if (!verify_witness(p.x_part, p.y_part, c, p.witness, tol)) return false;
  }
  const std::size_t n = w.parts.size();
  auto close = [&](const Element& a, const Element& b) {
    return (a - b).norm() <= tol * std::max(1.0, b.norm());
  };
  switch (w.split_side) {
    case SplitSide::kNone:
      return n == 1 && close(w.parts[0].x_part, x) && close(w.parts[0].y_part, y);
    case SplitSide::kLeft:
      return n == 2 && close(w.parts[0].x_part + w.parts[1].x_part, x) &&
             close(w.parts[0].y_part, y) && close(w.parts[1].y_part, y);
    case SplitSide::kRight:
      return n == 2 && close(w.parts[0].y_part + w.parts[1].y_part, y) &&
             close(w.parts[0].x_part, x) && close(w.parts[1].x_part, x);
    case SplitSide::kBoth:
      return n == 4 && close(w.parts[0].x_part + w.parts[2].x_part, x) &&
             close(w.parts[0].y_part + w.parts[1].y_part, y) &&
             close(w.parts[0].x_part, w.parts[1].x_part) &&
             close(w.parts[2].x_part, w.parts[3].x_part) &&
             close(w.parts[0].y_part, w.parts[2].y_part) &&
             close(w.parts[1].y_part, w.parts[3].y_part);
  }
  return false;
}

std::pair<RankOne, RankOne> random_zero_product_rank_ones(const Shape& shape, Rng& rng,
                                                          bool same_block) {
  std::vector<int> splittable;
  for (int i = 0; i < shape.num_blocks(); ++i) {
    if (shape.block_dim(i) >= 2) splittable.push_back(i);
  }
  const bool can_cross = shape.num_blocks() >= 2;
  if (splittable.empty() && !can_cross) {
    throw PreconditionError("shape admits no nonzero zero-product rank-one pair");
  }
  if ((same_block && !splittable.empty()) || !can_cross) {
    const int mu = splittable[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(splittable.size()) - 1))];
    const int n = shape.block_dim(mu);
    RankOne u{mu, rng.unit_vector(n), {}};
    RankOne v{mu, rng.unit_vector(n), rng.unit_vector(n)};
    Vector f = rng.gaussian_vector(n);
    f -= v.e * v.e.dot(f);
    u.f = f / f.norm();
    return {u, v};
  }
  const int mu = rng.uniform_int(0, shape.num_blocks() - 1);
  int nu = rng.uniform_int(0, shape.num_blocks() - 2);
  if (nu >= mu) ++nu;
  const int nm = shape.block_dim(mu);
  const int nn = shape.block_dim(nu);
  return {RankOne{mu, rng.unit_vector(nm), rng.unit_vector(nm)},
          RankOne{nu, rng.unit_vector(nn), rng.unit_vector(nn)}};
}

std::vector<ElementPair> zero_fiber_generators(const Shape& shape, int count, std::uint64_t seed) {
  if (count < 1) throw PreconditionError("zero_fiber_generators: count must be >= 1");
  std::vector<ElementPair> pool;
  const int k = shape.num_blocks();
  for (int p = 0; p < k; ++p) {
    const int np = shape.block_dim(p);
    for (int q = 0; q < k; ++q) {
      const int nq = shape.block_dim(q);
      for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j)
          for (int r = 0; r < nq; ++r)
            for (int s = 0; s < nq; ++s) {
              if (p == q && j == r) continue;
              pool.emplace_back(Element::matrix_unit(shape, p, i, j),
                                Element::matrix_unit(shape, q, r, s));
            }
    }
  }
  bool any_same_block = false;
  for (int n : shape.block_dims()) any_same_block = any_same_block || n >= 2;
  if (!any_same_block && k < 2) return pool;
  for (int t = 0; t < count; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    const auto [u, v] = random_zero_product_rank_ones(shape, rng, true);
    pool.emplace_back(rank_one_to_element(shape, u), rank_one_to_element(shape, v));
  }
  return pool;
}

}  // namespace zpd
