#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zpd/algebra.hpp"
#include "zpd/factorization.hpp"

namespace zpd {

/**
 * A bilinear map V : A x A -> C^m stored as m coefficient matrices over the
 * vectorization basis: V(a, b)_k = vec(a)^T C_k vec(b). No conjugation is
 * involved, so V is complex bilinear.
 *
 * The linearization on A (x) A is the m x dim(A)^2 matrix whose column
 * p * dim(A) + q is (C_k(p, q))_k; the tensor a (x) b vectorizes to the
 * Kronecker product vec(a) (x) vec(b).
 */
class BilinearMap {
 public:
  using Function = std::function<Vector(const Element&, const Element&)>;

  BilinearMap(Shape shape, int codomain_dim);
  BilinearMap(Shape shape, std::vector<Matrix> coeffs);
  /// Tabulates f on all pairs of basis elements.
  static BilinearMap from_function(const Shape& shape, int codomain_dim, const Function& f);

  const Shape& shape() const { return shape_; }
  int codomain_dim() const { return static_cast<int>(coeffs_.size()); }
  const std::vector<Matrix>& coeffs() const { return coeffs_; }

  Vector evaluate(const Element& a, const Element& b) const;
  /// Frobenius norm of the coefficient tensor.
  double norm() const;
  Matrix linearization() const;

 private:
  Shape shape_;
  std::vector<Matrix> coeffs_;
};

Vector evaluate(const BilinearMap& v, const Element& a, const Element& b);

/// The linearized multiplication A (x) A -> A as a dim(A) x dim(A)^2 matrix.
Matrix multiplication_matrix(const Shape& shape);

/// vec(a) (x) vec(b).
Vector tensor_vector(const Element& a, const Element& b);

/// V(a, b) = psi(a b) for a linear psi given as an m x dim(A) matrix.
BilinearMap product_map(const Shape& shape, const Matrix& psi);

/// V(a, b) = trace(a b), summed over blocks.
BilinearMap trace_product_map(const Shape& shape);

struct FiberSample {
  std::vector<ElementPair> pairs;
  Element target;
  double max_residual = 0.0;
};

/**
 * Seeded sample of the fiber {(a, b) : a b = c}.
 *
 * Pair 0 is (1, c). The remaining pairs come in groups of four that share a
 * random draw; group j depends only on (seed, j), so a longer sample always
 * extends a shorter one. Even groups use invertible g, g' and emit
 * (g, g^-1 c), (c g, g^-1), (g', g'^-1 c), (c g', g'^-1). When c satisfies the
 * rank hypothesis, odd groups draw a random zero-product rank-one pair (u, v),
 * take its factorization witness (a, b) and emit
 * (a, b), (a + s u, b), (a, b + t v), (a + s u, b + t v).
 *
 * For c = 0 pair 0 is (0, 0) and the rest are randomly scaled members of
 * zero_fiber_generators.
 */
FiberSample sample_fiber(const Element& c, int count, std::uint64_t seed, double tol = kDefaultTol);

struct PropertyCheck {
  bool holds = false;
  double max_deviation = 0.0;
  /// Index of the worst pair in the sample, or of the worst generator.
  int worst_index = -1;
};

/// V is constant on the sampled fiber: max |V(a, b) - V(a0, b0)| <=
/// tol (1 + |V|), (a0, b0) the first pair. Throws PreconditionError on an
/// empty sample.
PropertyCheck has_product_property_at(const BilinearMap& v, const Element& c,
                                      const FiberSample& fiber, double tol = 1e-8);

struct ZeroProductCheck {
  bool holds = false;
  double max_value = 0.0;
  std::optional<ElementPair> worst;
};

/// max |V(x, y)| over zero_fiber_generators(shape, 2 dim(A), seed) <= tol |V|.
ZeroProductCheck vanishes_on_zero_products(const BilinearMap& v, double tol = 1e-9,
                                           std::uint64_t seed = 0);

struct MultiplicationFactor {
  /// m x dim(A) matrix of the linear map psi with V ~ psi o multiplication.
  Matrix psi;
  /// Max |V(x, y) - psi(x y)| over seeded random pairs and zero-product
  /// generators.
  double residual = 0.0;
};

/// Least-squares solve of V = psi o mu over the tensor basis.
MultiplicationFactor factor_through_multiplication(const BilinearMap& v, std::uint64_t seed = 0);

enum class Verdict { kDeterminedConsistent, kNotDetermined, kInconclusive };

const char* to_string(Verdict v);

/// A bilinear map that is constant on the fiber of c but does not vanish on a
/// zero-product pair: proof that A is not determined by products at c.
struct Certificate {
  std::string name;
  int block = 0;
  BilinearMap map;
  ElementPair zero_product_witness;
  /// |V| on the witness pair.
  double witness_value = 0.0;
  /// Max deviation of V over the validating fiber sample.
  double fiber_deviation = 0.0;
  bool validated = false;
};

struct DeterminednessReport {
  int measured_rank = 0;
  int expected_rank = 0;
  Verdict verdict = Verdict::kInconclusive;
  int samples_used = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::optional<Certificate> certificate;
};

/// Numerical rank (threshold kSpanRankThreshold * sigma_max) of the span of
/// the fiber differences a (x) b - a0 (x) b0, rows normalized to unit length.
int fiber_difference_rank(const FiberSample& fiber);

/// Rank of the span of the tensors x (x) y over a list of pairs.
int tensor_span_rank(const std::vector<ElementPair>& pairs);

/**
 * Compares span{a (x) b - a' (x) b' : ab = a'b' = c} with ker(multiplication),
 * whose dimension is dim(A)^2 - dim(A).
 *
 * Equal ranks: determined-consistent. Otherwise a counterexample map is
 * searched for in any block where rank(c_i) >= n_i - 1 and validated on the
 * same sample; a validated certificate gives not-determined, anything else is
 * inconclusive. Requires sample_count >= 4 dim(A)^2.
 */
DeterminednessReport determinedness_rank(const Element& c, int sample_count, std::uint64_t seed,
                                         double tol = kDefaultTol);

/// Searches the blocks of c for a rank-(n-1) or rank-n block and returns the
/// matching counterexample, validated on `fiber`.
std::optional<Certificate> find_certificate(const Element& c, const FiberSample& fiber,
                                            double tol = kDefaultTol);

struct Counterexample {
  Element c;
  BilinearMap map;
  ElementPair zero_product_witness;
};

/// c = I_{n-1} + 0, V(a, b) = a_nn b_nn, witness padded from
/// a = [[1,1],[2,2]], b = [[-1,-2],[1,2]]. Requires n >= 2.
Counterexample costara_counterexample(int n);

/// c = I_n, V(a, b) = (b a)^T with codomain M_n, witness (e12, e11).
/// Requires n >= 2.
Counterexample transpose_counterexample(int n);

struct BalancedCheck {
  /// False when V does not vanish on zero products; nothing else is checked.
  bool precondition_met = false;
  bool holds = false;
  double max_deviation = 0.0;
};

/// max |V(a x, b) - V(a, x b)| over seeded unit-norm triples <= tol (1 + |V|).
BalancedCheck balanced_identity_check(const BilinearMap& v, int trials, std::uint64_t seed,
                                      double tol = 1e-9);

}  // namespace zpd
