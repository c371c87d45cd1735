#include "zpd/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace zpd {

namespace {

constexpr double kMaxCondition = 1e8;

double matrix_condition(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<Matrix> svd(m);
  const Eigen::VectorXd s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

Element unit_random(const Shape& shape, Rng& rng) {
  Element e = random_element(shape, rng);
  return (1.0 / e.norm()) * std::move(e);
}

double max_commutator_with_basis(const Element& h) {
  double worst = 0.0;
  for (int p = 0; p < h.shape().dim(); ++p) {
    const Element e = Element::basis(h.shape(), p);
    worst = std::max(worst, (h * e - e * h).norm());
  }
  return worst;
}

double multiplicativity_residual(const LinearMap& rho, int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    const Element a = unit_random(rho.domain, rng);
    const Element b = unit_random(rho.domain, rng);
    worst = std::max(worst, (rho.apply(a * b) - rho.apply(a) * rho.apply(b)).norm());
  }
  return worst;
}

Matrix kernel_projection(const Matrix& m, double tol) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  const double threshold = s.size() > 0 ? tol * std::max(1.0, s(0)) : 0.0;
  int rank = 0;
  for (Eigen::Index j = 0; j < s.size(); ++j) rank += s(j) > threshold ? 1 : 0;
  const Matrix null = svd.matrixV().rightCols(m.cols() - rank);
  return null * null.adjoint();
}

}  // namespace

LinearMap::LinearMap(Shape domain_shape, Shape codomain_shape, Matrix m)
    : domain(std::move(domain_shape)), codomain(std::move(codomain_shape)), matrix(std::move(m)) {
  if (matrix.rows() != codomain.dim() || matrix.cols() != domain.dim()) {
    throw ShapeError("linear map matrix must be dim(B) x dim(A)");
  }
}

LinearMap LinearMap::from_function(const Shape& domain, const Shape& codomain,
                                   const std::function<Element(const Element&)>& f) {
  Matrix m(codomain.dim(), domain.dim());
  for (int p = 0; p < domain.dim(); ++p) {
    const Element image = f(Element::basis(domain, p));
    if (!(image.shape() == codomain)) throw ShapeError("map image has the wrong shape");
    m.col(p) = image.vectorize();
  }
  return {domain, codomain, std::move(m)};
}

LinearMap LinearMap::identity(const Shape& shape) {
  return {shape, shape, Matrix::Identity(shape.dim(), shape.dim())};
}

Element LinearMap::apply(const Element& a) const {
  if (!(a.shape() == domain)) throw ShapeError("apply: element not in the domain");
  return Element::from_vector(codomain, matrix * a.vectorize());
}

LinearMap LinearMap::compose(const LinearMap& inner) const {
  if (!(inner.codomain == domain)) throw ShapeError("compose: shapes do not chain");
  return {inner.domain, codomain, matrix * inner.matrix};
}

LinearMap operator+(const LinearMap& f, const LinearMap& g) {
  if (!(f.domain == g.domain && f.codomain == g.codomain)) throw ShapeError("sum: shape mismatch");
  return {f.domain, f.codomain, f.matrix + g.matrix};
}

LinearMap operator-(const LinearMap& f, const LinearMap& g) {
  if (!(f.domain == g.domain && f.codomain == g.codomain)) throw ShapeError("difference: shape mismatch");
  return {f.domain, f.codomain, f.matrix - g.matrix};
}

LinearMap operator*(Complex s, const LinearMap& f) { return {f.domain, f.codomain, s * f.matrix}; }

LinearMap inner_automorphism(const Element& g) {
  const Element g_inv = inverse(g);
  return LinearMap::from_function(g.shape(), g.shape(),
                                  [&](const Element& a) { return g * a * g_inv; });
}

LinearMap block_permutation(const Shape& shape, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != shape.num_blocks()) {
    throw ShapeError("permutation length must equal the number of blocks");
  }
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < shape.num_blocks(); ++i) {
    if (sorted[static_cast<std::size_t>(i)] != i) throw ShapeError("not a permutation");
    if (shape.block_dim(i) != shape.block_dim(perm[static_cast<std::size_t>(i)])) {
      throw ShapeError("permuted blocks must have equal size");
    }
  }
  return LinearMap::from_function(shape, shape, [&](const Element& a) {
    std::vector<Matrix> blocks;
    for (int src : perm) blocks.push_back(a.block(src));
    return Element(shape, std::move(blocks));
  });
}

LinearMap left_multiplication(const Element& h) {
  return LinearMap::from_function(h.shape(), h.shape(), [&](const Element& a) { return h * a; });
}

LinearMap right_multiplication(const Element& h) {
  return LinearMap::from_function(h.shape(), h.shape(), [&](const Element& a) { return a * h; });
}

LinearMap inner_derivation(const Element& m) {
  return LinearMap::from_function(m.shape(), m.shape(),
                                  [&](const Element& a) { return m * a - a * m; });
}

LinearMap transpose_map(const Shape& shape) {
  return LinearMap::from_function(shape, shape, [&](const Element& a) {
    std::vector<Matrix> blocks;
    for (const auto& b : a.blocks()) blocks.push_back(b.transpose());
    return Element(shape, std::move(blocks));
  });
}

LinearMap random_automorphism(const Shape& shape, Rng& rng, bool permute) {
  const Element g = random_element(shape, rng, Distribution::kInvertibleGaussian);
  LinearMap rho = inner_automorphism(g);
  if (!permute) return rho;
  std::vector<int> perm(static_cast<std::size_t>(shape.num_blocks()));
  std::iota(perm.begin(), perm.end(), 0);
  // Fisher-Yates restricted to blocks of equal size.
  for (int i = shape.num_blocks() - 1; i > 0; --i) {
    const int j = rng.uniform_int(0, i);
    if (shape.block_dim(perm[static_cast<std::size_t>(i)]) ==
        shape.block_dim(perm[static_cast<std::size_t>(j)])) {
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
  }
  return block_permutation(shape, perm).compose(rho);
}

Element random_central(const Shape& shape, Rng& rng) {
  std::vector<Matrix> blocks;
  for (int n : shape.block_dims()) {
    Complex s = rng.complex_normal();
    s = (0.5 + std::abs(s)) * (s / std::abs(s));
    blocks.push_back(s * Matrix::Identity(n, n));
  }
  return {shape, std::move(blocks)};
}

PairZeroProductCheck pair_preserves_zero_products(const LinearMap& phi, const LinearMap& psi,
                                                  int trials, std::uint64_t seed, double tol) {
  if (!(phi.domain == psi.domain && phi.codomain == psi.codomain)) {
    throw ShapeError("phi and psi must share domain and codomain");
  }
  PairZeroProductCheck out;
  for (const auto& pair : zero_fiber_generators(phi.domain, trials, seed)) {
    const double val = (phi.apply(pair.first) * psi.apply(pair.second)).norm();
    if (!out.worst || val > out.max_value) {
      out.max_value = val;
      out.worst = pair;
    }
  }
  out.holds = out.max_value <= tol * std::max(1.0, phi.norm() * psi.norm());
  return out;
}

PairIdentityCheck pair_identity_check(const LinearMap& phi, const LinearMap& psi, int trials,
                                      std::uint64_t seed, double tol) {
  PairIdentityCheck out;
  out.precondition_met = pair_preserves_zero_products(phi, psi, trials, seed, tol).holds;
  if (!out.precondition_met) return out;
  const Element one = Element::identity(phi.domain);
  const Element phi1 = phi.apply(one);
  const Element psi1 = psi.apply(one);
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    const Element a = unit_random(phi.domain, rng);
    const Element b = unit_random(phi.domain, rng);
    const Element mid = phi.apply(a) * psi.apply(b);
    out.left_residual = std::max(out.left_residual, (phi1 * psi.apply(a * b) - mid).norm());
    out.right_residual = std::max(out.right_residual, (phi.apply(a * b) * psi1 - mid).norm());
  }
  const double scale = tol * std::max(1.0, phi.norm() * psi.norm());
  out.holds = out.left_residual <= scale && out.right_residual <= scale;
  return out;
}

HomExtractionReport extract_homomorphism(const LinearMap& phi, const LinearMap& psi, double tol,
                                         int trials, std::uint64_t seed) {
  if (!(phi.domain == psi.domain && phi.codomain == psi.codomain)) {
    throw ShapeError("phi and psi must share domain and codomain");
  }
  HomExtractionReport out;
  const Element one = Element::identity(phi.domain);
  out.phi1 = phi.apply(one);
  out.psi1 = psi.apply(one);
  if (!(condition_number(out.phi1) < kMaxCondition)) throw PreconditionError("phi(1) not invertible");
  if (!(condition_number(out.psi1) < kMaxCondition)) throw PreconditionError("psi(1) not invertible");

  out.rho = left_multiplication(inverse(out.phi1)).compose(phi);
  const LinearMap rho2 = right_multiplication(inverse(out.psi1)).compose(psi);
  const double scale = std::max(1.0, out.rho.norm());
  out.rho_mismatch = (out.rho.matrix - rho2.matrix).norm();
  out.mult_residual = multiplicativity_residual(out.rho, trials, seed);
  out.unital_residual = (out.rho.apply(one) - Element::identity(phi.codomain)).norm();
  const double rec_phi = (left_multiplication(out.phi1).compose(out.rho).matrix - phi.matrix).norm();
  const double rec_psi = (right_multiplication(out.psi1).compose(out.rho).matrix - psi.matrix).norm();
  out.reconstruction_residual = std::max(rec_phi, rec_psi);
  out.passed = out.rho_mismatch <= tol * scale && out.mult_residual <= tol * scale * scale &&
               out.unital_residual <= tol * scale &&
               out.reconstruction_residual <= tol * std::max(1.0, std::max(phi.norm(), psi.norm()));
  return out;
}

WeightedHomReport weighted_hom_decompose(const LinearMap& phi, double tol, std::uint64_t seed) {
  if (!(matrix_condition(phi.matrix) < kMaxCondition)) throw PreconditionError("not bijective");
  if (!pair_preserves_zero_products(phi, phi, 2 * phi.domain.dim(), seed, tol).holds) {
    throw PreconditionError("does not preserve zero products");
  }
  WeightedHomReport out;
  out.h = phi.apply(Element::identity(phi.domain));
  // Commuting with every matrix unit of B is the same as commuting with the
  // image of phi, since phi is onto.
  out.centrality_residual = max_commutator_with_basis(out.h);
  if (out.centrality_residual > tol * std::max(1.0, out.h.norm())) {
    throw PreconditionError("weight not central");
  }
  out.rho = left_multiplication(inverse(out.h)).compose(phi);
  const double scale = std::max(1.0, out.rho.norm());
  out.mult_residual = multiplicativity_residual(out.rho, 20, seed);
  out.unital_residual =
      (out.rho.apply(Element::identity(phi.domain)) - Element::identity(phi.codomain)).norm();
  out.passed = out.mult_residual <= tol * scale * scale && out.unital_residual <= tol * scale;
  return out;
}

DerivationAtCCheck derivation_at_c_check(const LinearMap& delta, const Element& c,
                                         const FiberSample& fiber, double tol) {
  if (fiber.pairs.empty()) throw PreconditionError("empty fiber");
  if (!(fiber.target.shape() == c.shape()) || (fiber.target - c).norm() > 0.0) {
    throw PreconditionError("fiber does not target c");
  }
  DerivationAtCCheck out;
  const Element dc = delta.apply(c);
  const double base = 1.0 + delta.norm();
  for (std::size_t k = 0; k < fiber.pairs.size(); ++k) {
    const auto& [a, b] = fiber.pairs[k];
    const double dev = (dc - delta.apply(a) * b - a * delta.apply(b)).norm() /
                       (base * std::max(1.0, a.norm() * b.norm()));
    if (dev > out.max_deviation || out.worst_index < 0) {
      out.max_deviation = dev;
      out.worst_index = static_cast<int>(k);
    }
  }
  out.holds = out.max_deviation <= tol;
  return out;
}

DerivationReport derivation_decompose(const LinearMap& delta, const Element& c, double tol,
                                      std::uint64_t seed) {
  if (!(delta.domain == delta.codomain && delta.domain == c.shape())) {
    throw ShapeError("derivation must map A to A");
  }
  const int samples = std::max(64, 2 * c.shape().dim());
  const FiberSample fiber = sample_fiber(c, samples, seed, tol);
  const DerivationAtCCheck check = derivation_at_c_check(delta, c, fiber, tol);
  if (!check.holds) {
    throw PreconditionError("not derivable at c (worst pair " + std::to_string(check.worst_index) +
                            ", deviation " + std::to_string(check.max_deviation) + ")");
  }
  DerivationReport out;
  out.xi = delta.apply(Element::identity(c.shape()));
  out.d = delta - left_multiplication(out.xi);
  for (int t = 0; t < 20; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    const Element a = unit_random(c.shape(), rng);
    const Element b = unit_random(c.shape(), rng);
    const Element lhs = out.d.apply(a * b);
    out.leibniz_residual =
        std::max(out.leibniz_residual, (lhs - out.d.apply(a) * b - a * out.d.apply(b)).norm());
  }
  out.centrality_residual = max_commutator_with_basis(out.xi);
  out.xi_c_residual = (out.xi * c).norm();
  const double scale = std::max(1.0, delta.norm());
  out.passed = out.leibniz_residual <= tol * scale && out.centrality_residual <= tol * scale &&
               out.xi_c_residual <= tol * scale * std::max(1.0, c.norm());
  return out;
}

double kernel_gap(const LinearMap& f, const LinearMap& g, double tol) {
  if (!(f.domain == g.domain)) throw ShapeError("kernel_gap: domains differ");
  const Matrix diff = kernel_projection(f.matrix, tol) - kernel_projection(g.matrix, tol);
  if (diff.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(diff);
  return svd.singularValues()(0);
}

double symmetry_residual(const LinearMap& f) {
  double worst = 0.0;
  for (int p = 0; p < f.domain.dim(); ++p) {
    const Element e = Element::basis(f.domain, p);
    worst = std::max(worst, (f.apply(e.adjoint()) - f.apply(e).adjoint()).norm());
  }
  return worst;
}

}  // namespace zpd
