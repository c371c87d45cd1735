#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "zpd/algebra.hpp"
#include "zpd/rank_structure.hpp"

namespace zpd {

/// Elements a, b with a y = 0, x b = 0 and a b = c for the (x, y, c) they
/// certify, together with the three residual norms.
struct Witness {
  Element a;
  Element b;
  double residual_ay = 0.0;
  double residual_xb = 0.0;
  double residual_abc = 0.0;

  double max_residual() const;
};

/// Builds a witness and fills in its residuals against (x, y, c).
Witness make_witness(const Element& x, const Element& y, const Element& c, Element a, Element b);

/// Recomputes all three residuals and compares each to tol (absolute).
bool verify_witness(const Element& x, const Element& y, const Element& c, const Witness& w,
                    double tol);

/**
 * Plain factorization of a single matrix block c through (x, y), x y = 0.
 *
 * With c = sum alpha_n e_n (x) f_n and {h_n} an orthonormal set in
 * ker(x) intersected with range(y)^perp, returns
 *   a = sum sqrt(alpha_n) e_n (x) h_n,   b = sum sqrt(alpha_n) h_n (x) f_n.
 * Then a y = 0, x b = 0 and a b = c. Throws PreconditionError if that
 * subspace is too small for rank(c).
 */
std::pair<Matrix, Matrix> factorize_block_matrices(const Matrix& c, const Matrix& x,
                                                   const Matrix& y, double tol = kDefaultTol);

/// Single-block witness for minimal partial isometries u, v with u v = 0.
/// Requires rank(c_block) <= n - 2.
Witness factorize_through_block(const Matrix& c_block, const RankOne& u, const RankOne& v,
                                double tol = kDefaultTol);

/// How factorize_through combined block witnesses.
enum class DispatchCase {
  kSameBlock,        // u, v in one block
  kBothZero,         // different blocks, c vanishes on both
  kOneNonzero,       // different blocks, c nonzero on exactly one of them
  kBothNonzero,      // different blocks, c nonzero on both
};

const char* to_string(DispatchCase c);

struct Factorization {
  Witness witness;
  DispatchCase dispatch = DispatchCase::kSameBlock;
};

/**
 * Witness that c factorizes through (u, v) for minimal partial isometries
 * u v = 0 of a direct sum. Blocks that hold neither u nor v carry the
 * padding pair (1, c). An auxiliary rank-one in the block of u (or v) is used
 * when c is nonzero there but the other operator lives elsewhere.
 *
 * Throws PreconditionError when c violates the rank hypothesis or u v != 0.
 */
Factorization factorize_through(const Element& c, const RankOne& u, const RankOne& v,
                                double tol = kDefaultTol);

enum class SplitSide { kNone, kLeft, kRight, kBoth };

const char* to_string(SplitSide s);

struct WitnessPart {
  Element x_part;
  Element y_part;
  Witness witness;
};

/// One, two or four parts. For kLeft the x parts sum to x and each y part
/// equals y; kRight is symmetric; kBoth lists (x', y'), (x', y''), (x'', y'),
/// (x'', y'').
struct GeneralizedWitness {
  SplitSide split_side = SplitSide::kNone;
  std::vector<WitnessPart> parts;

  double max_residual() const;
};

/**
 * Generalized factorization of c through (x, y), x y = 0, each of x and y
 * supported on a single block.
 *
 * Inside a block, c_i is factored plainly when ker(x) minus range(y) leaves
 * room for rank(c_i); otherwise x (or y) is split in two along its singular
 * vectors. Same-block inputs are lifted with the padding (1_{!=i}, c_{!=i}).
 * Cross-block inputs use the auxiliary annihilators z in Ann_r(x) and
 * w in Ann_l(y), each the rank-one projection onto the first vector of the
 * relevant orthonormal complement, and the padding (1_{!=i,j}, c_{!=i,j}).
 */
GeneralizedWitness generalized_factorize(const Element& c, const Element& x, const Element& y,
                                         double tol = kDefaultTol);

/// Verifies every part of a generalized witness and that the splitting
/// elements sum back to x and y.
bool verify_generalized(const Element& x, const Element& y, const Element& c,
                        const GeneralizedWitness& w, double tol);

using ElementPair = std::pair<Element, Element>;

/**
 * Deterministic pool of zero-product pairs whose tensors span the kernel of
 * multiplication.
 *
 * Contains every matrix-unit pair (e_ij, e_kl) with j != k inside a block,
 * every cross-block matrix-unit pair, and `count` random rank-one pairs
 * u v = 0 drawn from `seed` (same-block whenever the chosen block has n >= 2).
 */
std::vector<ElementPair> zero_fiber_generators(const Shape& shape, int count, std::uint64_t seed);

/// Random unit rank-one pair u v = 0. Same block when `same_block` and the
/// block has n >= 2; otherwise u and v sit in two different blocks if the
/// shape has more than one.
std::pair<RankOne, RankOne> random_zero_product_rank_ones(const Shape& shape, Rng& rng,
                                                          bool same_block);

}  // namespace zpd
