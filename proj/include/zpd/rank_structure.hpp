#pragma once

#include <span>
#include <utility>
#include <vector>

#include "zpd/algebra.hpp"

namespace zpd {

/// The rank-one operator e (x) f, h -> <h, f> e, living in one block.
/// Canonical normalization: |e| = |f| = 1.
struct RankOne {
  int block = 0;
  Vector e;
  Vector f;
};

/// Matrix of e (x) f: entry (p, q) is e_p * conj(f_q).
Matrix rank_one_matrix(const Vector& e, const Vector& f);
Element rank_one_to_element(const Shape& shape, const RankOne& u);

/// True iff a lives on exactly one block, has numerical rank one there and
/// a a* a = a within tol (relative to |a|).
bool is_minimal_partial_isometry(const Element& a, double tol = kDefaultTol);

struct MinPiTerm {
  double lambda = 0.0;
  RankOne u;
};

/// a = sum lambda_i u_i with lambda_i > 0 and u_i mutually orthogonal minimal
/// partial isometries; terms grouped by block, lambdas non-increasing inside
/// each block.
struct MinPiDecomposition {
  Shape shape;
  std::vector<MinPiTerm> terms;

  Element reconstruct() const;
  /// Terms belonging to one block, in order.
  std::vector<MinPiTerm> block_terms(int block) const;
};

/// Blockwise SVD; singular values at or below the rank_profile threshold are
/// dropped. The left vectors span the range of each block, the right vectors
/// span the orthogonal complement of its kernel.
MinPiDecomposition minpi_decompose(const Element& a, double tol = kDefaultTol);

/// a b* = b* a = 0, both measured relative to |a| |b|.
bool are_orthogonal(const Element& a, const Element& b, double tol = kDefaultTol);

/// u v = 0 iff f_u is orthogonal to e_v; operators in different blocks
/// always annihilate each other.
bool rank_one_product_zero(const RankOne& u, const RankOne& v, double tol = kDefaultTol);

struct ZeroProductDecomposition {
  MinPiDecomposition x;
  MinPiDecomposition y;
  /// Largest |u_i v_j| over all pairs of terms.
  double max_cross_product = 0.0;
};

/// Decomposes a zero-product pair into rank-one terms whose pairwise products
/// all vanish. Throws PreconditionError when |x y| > tol |x| |y| and Error when
/// some cross product exceeds 10 tol.
ZeroProductDecomposition zp_decompose_pair(const Element& x, const Element& y,
                                           double tol = kDefaultTol);

/// The unique b with b b* b = a, via SVD with sigma -> sigma^(1/3).
/// Singular values below the rank threshold are treated as zero.
Element odd_cube_root(const Element& a, double tol = kDefaultTol);

struct SupportProjections {
  Element left;
  Element right;
};

/// Smallest projections with s_l a = a = a s_r.
SupportProjections support_projections(const Element& a, double tol = kDefaultTol);

struct PeirceComponents {
  Element a2;
  Element a1;
  Element a0;
};

/// Peirce components of a relative to the partial isometry e:
/// a2 = ee* a e*e, a0 = (1 - ee*) a (1 - e*e), a1 = a - a2 - a0.
/// Throws PreconditionError unless e e* e = e within tol.
PeirceComponents peirce_decompose(const Element& a, const Element& e, double tol = kDefaultTol);

/**
 * Orthonormal basis of the orthogonal complement of span(vectors) in C^n.
 *
 * The standard basis is projected off the span (and off the vectors accepted
 * so far) with two passes of modified Gram-Schmidt; candidates whose residual
 * norm drops below drop_tol are discarded. The result is deterministic: ties
 * are broken by standard-basis order.
 */
std::vector<Vector> orthonormal_complement(std::span<const Vector> vectors, int n,
                                           double drop_tol = 1e-6);

}  // namespace zpd
