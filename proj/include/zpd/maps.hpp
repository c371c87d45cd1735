#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "zpd/algebra.hpp"
#include "zpd/factorization.hpp"
#include "zpd/bilinear.hpp"

namespace zpd {

/// Linear map A -> B as a dim(B) x dim(A) matrix over the vectorization bases.
struct LinearMap {
  Shape domain;
  Shape codomain;
  Matrix matrix;

  LinearMap() = default;
  LinearMap(Shape domain, Shape codomain, Matrix matrix);

  static LinearMap from_function(const Shape& domain, const Shape& codomain,
                                 const std::function<Element(const Element&)>& f);
  static LinearMap identity(const Shape& shape);

  Element apply(const Element& a) const;
  /// (*this) o inner.
  LinearMap compose(const LinearMap& inner) const;
  double norm() const { return matrix.norm(); }

  friend LinearMap operator+(const LinearMap& f, const LinearMap& g);
  friend LinearMap operator-(const LinearMap& f, const LinearMap& g);
  friend LinearMap operator*(Complex s, const LinearMap& f);
};

/// a -> g a g^-1.
LinearMap inner_automorphism(const Element& g);
/// Output block i is input block perm[i]; the two blocks must have equal size.
LinearMap block_permutation(const Shape& shape, const std::vector<int>& perm);
/// a -> h a.
LinearMap left_multiplication(const Element& h);
/// a -> a h.
LinearMap right_multiplication(const Element& h);
/// a -> m a - a m.
LinearMap inner_derivation(const Element& m);
/// Blockwise transpose.
LinearMap transpose_map(const Shape& shape);

/// Inner automorphism by a random invertible g, composed with a random
/// permutation of equal-size blocks when `permute` is set.
LinearMap random_automorphism(const Shape& shape, Rng& rng, bool permute);
/// Random invertible central element: one nonzero scalar per block.
Element random_central(const Shape& shape, Rng& rng);

struct PairZeroProductCheck {
  bool holds = false;
  double max_value = 0.0;
  std::optional<ElementPair> worst;
};

/// max |phi(x) psi(y)| over zero_fiber_generators(domain, trials, seed)
/// <= tol max(1, |phi| |psi|).
PairZeroProductCheck pair_preserves_zero_products(const LinearMap& phi, const LinearMap& psi,
                                                  int trials, std::uint64_t seed, double tol);

struct PairIdentityCheck {
  bool precondition_met = false;
  bool holds = false;
  /// max |phi(1) psi(ab) - phi(a) psi(b)|.
  double left_residual = 0.0;
  /// max |phi(ab) psi(1) - phi(a) psi(b)|.
  double right_residual = 0.0;
};

/// Checks both pair identities on seeded unit-norm pairs. Skipped when the
/// pair does not preserve zero products.
PairIdentityCheck pair_identity_check(const LinearMap& phi, const LinearMap& psi, int trials,
                                      std::uint64_t seed, double tol);

struct HomExtractionReport {
  LinearMap rho;
  Element phi1;
  Element psi1;
  double rho_mismatch = 0.0;
  double mult_residual = 0.0;
  double unital_residual = 0.0;
  /// max(|phi - phi(1) rho|, |psi - rho psi(1)|) as matrices.
  double reconstruction_residual = 0.0;
  bool passed = false;
};

/**
 * rho_1 = phi(1)^-1 phi and rho_2 = psi psi(1)^-1; rho is rho_1.
 * Residuals are relative: the mismatch and reconstruction to
 * max(1, |rho|), the multiplicativity over seeded unit-norm pairs to
 * max(1, |rho|^2). Throws PreconditionError("phi(1) not invertible") or
 * ("psi(1) not invertible") when the condition number reaches 1e8.
 */
HomExtractionReport extract_homomorphism(const LinearMap& phi, const LinearMap& psi, double tol,
                                         int trials = 20, std::uint64_t seed = 0);

struct WeightedHomReport {
  Element h;
  LinearMap rho;
  double centrality_residual = 0.0;
  double mult_residual = 0.0;
  double unital_residual = 0.0;
  bool passed = false;
};

/// phi = h rho with h = phi(1) central and rho a bijective homomorphism.
/// Throws PreconditionError("not bijective"), ("does not preserve zero
/// products") or ("weight not central").
WeightedHomReport weighted_hom_decompose(const LinearMap& phi, double tol, std::uint64_t seed = 0);

struct DerivationAtCCheck {
  bool holds = false;
  double max_deviation = 0.0;
  int worst_index = -1;
};

/// max over the fiber of |delta(c) - delta(a) b - a delta(b)|, each pair
/// scaled by (1 + |delta|) max(1, |a| |b|).
DerivationAtCCheck derivation_at_c_check(const LinearMap& delta, const Element& c,
                                         const FiberSample& fiber, double tol);

struct DerivationReport {
  Element xi;
  LinearMap d;
  double leibniz_residual = 0.0;
  double centrality_residual = 0.0;
  double xi_c_residual = 0.0;
  bool passed = false;
};

/// delta = d + xi (-) with xi = delta(1). Checks derivability on a seeded
/// fiber of c first and throws PreconditionError("not derivable at c ...")
/// with the worst pair otherwise.
DerivationReport derivation_decompose(const LinearMap& delta, const Element& c, double tol,
                                      std::uint64_t seed = 0);

/// Largest principal-angle gap between the numerical null spaces of f and g
/// (spectral norm of the difference of the kernel projections).
double kernel_gap(const LinearMap& f, const LinearMap& g, double tol = 1e-9);

/// max |f(a*) - f(a)*| over the basis of the domain.
double symmetry_residual(const LinearMap& f);

}  // namespace zpd
