#include "zpd/bilinear.hpp"

#include <algorithm>
#include <cmath>

namespace zpd {

namespace {

int numerical_rank(const Matrix& rows) {
  if (rows.rows() == 0 || rows.cols() == 0) return 0;
  Matrix square;
  if (rows.rows() > rows.cols()) {
    // Reduce to the triangular factor; it has the same singular values.
    Eigen::HouseholderQR<Matrix> qr(rows);
    square = qr.matrixQR().topRows(rows.cols()).triangularView<Eigen::Upper>();
  } else {
    square = rows;
  }
  Eigen::BDCSVD<Matrix> svd(square);
  const Eigen::VectorXd s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index j = 0; j < s.size(); ++j) r += s(j) > kSpanRankThreshold * s(0) ? 1 : 0;
  return r;
}

// Stacks normalized row vectors, skipping (numerically) zero ones.
Matrix stack_rows(const std::vector<Vector>& rows, Eigen::Index width) {
  std::vector<const Vector*> kept;
  for (const auto& r : rows) {
    if (r.norm() > 1e-12) kept.push_back(&r);
  }
  Matrix m(static_cast<Eigen::Index>(kept.size()), width);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = kept[i]->transpose() / kept[i]->norm();
  }
  return m;
}

Vector vectorize_matrix(const Matrix& m) {
  Vector v(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) v(r * m.cols() + c) = m(r, c);
  return v;
}

Element unit_norm(Element e) {
  const double n = e.norm();
  return n > 0.0 ? (1.0 / n) * std::move(e) : e;
}

// Pads the 2x2 pair of the rank-(n-1) counterexample into the lower-right
// corner of an n x n block.
Matrix padded_corner(const Matrix& m2, int n) {
  Matrix out = Matrix::Zero(n, n);
  out.bottomRightCorner(2, 2) = m2;
  return out;
}

Matrix costara_left() {
  Matrix a(2, 2);
  a << 1.0, 1.0, 2.0, 2.0;
  return a;
}

Matrix costara_right() {
  Matrix b(2, 2);
  b << -1.0, -2.0, 1.0, 2.0;
  return b;
}

Certificate validate(Certificate cert, const Element& c, const FiberSample& fiber) {
  const auto& [wa, wb] = cert.zero_product_witness;
  const double product = (wa * wb).norm();
  cert.witness_value = cert.map.evaluate(wa, wb).norm();
  if (!fiber.pairs.empty()) {
    const PropertyCheck check = has_product_property_at(cert.map, c, fiber, 1e-8);
    cert.fiber_deviation = check.max_deviation;
    cert.validated = check.holds && product <= 1e-9 * std::max(1.0, wa.norm() * wb.norm()) &&
                     cert.witness_value >= 0.5;
  }
  return cert;
}

// a = W G with range(W) containing range(c) and rank n - 1 per block, and
// b = a^+ c + (1 - a^+ a) z for random z.
std::pair<Element, std::vector<Matrix>> singular_factor(const Element& c, const RankProfile& profile,
                                                        Rng& rng) {
  std::vector<Matrix> a_blocks;
  std::vector<Matrix> b_bases;
  for (int i = 0; i < c.shape().num_blocks(); ++i) {
    const int n = c.shape().block_dim(i);
    const int r = profile.ranks[static_cast<std::size_t>(i)];
    const int k = n - 1;
    Matrix w(n, n);
    Eigen::JacobiSVD<Matrix> svd(c.block(i), Eigen::ComputeFullU);
    w.leftCols(r) = svd.matrixU().leftCols(r);
    w.rightCols(n - r) = rng.gaussian_matrix(n, n - r);
    Eigen::HouseholderQR<Matrix> qr(w);
    const Matrix q = Matrix(qr.householderQ()).leftCols(k);
    const Matrix g = rng.gaussian_matrix(k, n);
    const Matrix g_pinv = g.adjoint() * (g * g.adjoint()).inverse();
    a_blocks.push_back(q * g);
    b_bases.push_back(g_pinv * q.adjoint() * c.block(i));
    b_bases.push_back(Matrix::Identity(n, n) - g_pinv * g);
  }
  return {Element(c.shape(), std::move(a_blocks)), std::move(b_bases)};
}

}  // namespace

BilinearMap::BilinearMap(Shape shape, int codomain_dim) : shape_(std::move(shape)) {
  if (codomain_dim < 1) throw ShapeError("codomain dimension must be >= 1");
  coeffs_.assign(static_cast<std::size_t>(codomain_dim), Matrix::Zero(shape_.dim(), shape_.dim()));
}

BilinearMap::BilinearMap(Shape shape, std::vector<Matrix> coeffs)
    : shape_(std::move(shape)), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw ShapeError("codomain dimension must be >= 1");
  for (const auto& c : coeffs_) {
    if (c.rows() != shape_.dim() || c.cols() != shape_.dim()) {
      throw ShapeError("coefficient matrix does not match dim(A)");
    }
  }
}

BilinearMap BilinearMap::from_function(const Shape& shape, int codomain_dim, const Function& f) {
  BilinearMap out(shape, codomain_dim);
  const int d = shape.dim();
  std::vector<Element> basis;
  basis.reserve(static_cast<std::size_t>(d));
  for (int p = 0; p < d; ++p) basis.push_back(Element::basis(shape, p));
  for (int p = 0; p < d; ++p) {
    for (int q = 0; q < d; ++q) {
      const Vector val = f(basis[static_cast<std::size_t>(p)], basis[static_cast<std::size_t>(q)]);
      if (val.size() != codomain_dim) throw ShapeError("bilinear function returned wrong length");
      for (int k = 0; k < codomain_dim; ++k) out.coeffs_[static_cast<std::size_t>(k)](p, q) = val(k);
    }
  }
  return out;
}

Vector BilinearMap::evaluate(const Element& a, const Element& b) const {
  if (!(a.shape() == shape_ && b.shape() == shape_)) throw ShapeError("evaluate: shape mismatch");
  const Vector va = a.vectorize();
  const Vector vb = b.vectorize();
  Vector out(codomain_dim());
  for (int k = 0; k < codomain_dim(); ++k) {
    out(k) = (va.transpose() * coeffs_[static_cast<std::size_t>(k)] * vb).value();
  }
  return out;
}

double BilinearMap::norm() const {
  double sq = 0.0;
  for (const auto& c : coeffs_) sq += c.squaredNorm();
  return std::sqrt(sq);
}

Matrix BilinearMap::linearization() const {
  const int d = shape_.dim();
  Matrix out(codomain_dim(), d * d);
  for (int k = 0; k < codomain_dim(); ++k)
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q) out(k, p * d + q) = coeffs_[static_cast<std::size_t>(k)](p, q);
  return out;
}

Vector evaluate(const BilinearMap& v, const Element& a, const Element& b) { return v.evaluate(a, b); }

Matrix multiplication_matrix(const Shape& shape) {
  const int d = shape.dim();
  Matrix mu = Matrix::Zero(d, d * d);
  for (int p = 0; p < d; ++p) {
    const auto cp = shape.coordinate(p);
    for (int q = 0; q < d; ++q) {
      const auto cq = shape.coordinate(q);
      if (cp.block != cq.block || cp.col != cq.row) continue;
      const int n = shape.block_dim(cp.block);
      mu(shape.offset(cp.block) + cp.row * n + cq.col, p * d + q) = 1.0;
    }
  }
  return mu;
}

Vector tensor_vector(const Element& a, const Element& b) {
  const Vector va = a.vectorize();
  const Vector vb = b.vectorize();
  const Eigen::Index d = va.size();
  Vector out(d * d);
  for (Eigen::Index p = 0; p < d; ++p) out.segment(p * d, d) = va(p) * vb;
  return out;
}

BilinearMap product_map(const Shape& shape, const Matrix& psi) {
  if (psi.cols() != shape.dim()) throw ShapeError("psi must have dim(A) columns");
  return BilinearMap::from_function(shape, static_cast<int>(psi.rows()),
                                    [&](const Element& a, const Element& b) -> Vector {
                                      return psi * (a * b).vectorize();
                                    });
}

BilinearMap trace_product_map(const Shape& shape) {
  return BilinearMap::from_function(shape, 1, [](const Element& a, const Element& b) {
    const Element p = a * b;
    Complex t = 0.0;
    for (const auto& m : p.blocks()) t += m.trace();
    Vector out(1);
    out(0) = t;
    return out;
  });
}

FiberSample sample_fiber(const Element& c, int count, std::uint64_t seed, double tol) {
  if (count < 2) throw PreconditionError("sample_fiber: count must be >= 2");
  const Shape& shape = c.shape();
  FiberSample out;
  out.target = c;
  out.pairs.reserve(static_cast<std::size_t>(count));

  if (c.is_zero()) {
    out.pairs.emplace_back(Element::zero(shape), Element::zero(shape));
    const auto pool = zero_fiber_generators(shape, std::max(count, 2 * shape.dim()), seed);
    for (int k = 1; k < count; ++k) {
      Rng rng(seed, static_cast<std::uint64_t>(k));
      const Complex s = rng.complex_normal();
      if (pool.empty()) {
        out.pairs.emplace_back(s * Element::identity(shape), Element::zero(shape));
      } else {
        const auto& [x, y] = pool[static_cast<std::size_t>(k - 1) % pool.size()];
        out.pairs.emplace_back(s * x, y);
      }
    }
    return out;
  }

  const RankHypothesis rh = satisfies_rank_hypothesis(c, tol);
  const bool rank_hypothesis = rh.holds;
  out.pairs.emplace_back(Element::identity(shape), c);
  std::vector<ElementPair> group;
  for (int k = 1; k < count; ++k) {
    const int j = (k - 1) / 4;
    const int r = (k - 1) % 4;
    if (r == 0) {
      group.clear();
      Rng rng(seed, static_cast<std::uint64_t>(j));
      if (rank_hypothesis && j % 3 == 2) {
        for (int rep = 0; rep < 2; ++rep) {
          const auto [a, bases] = singular_factor(c, rh.profile, rng);
          for (int m = 0; m < 2; ++m) {
            std::vector<Matrix> b;
            for (std::size_t i = 0; i < bases.size(); i += 2) {
              const auto n = bases[i].rows();
              b.push_back(bases[i] + bases[i + 1] * rng.gaussian_matrix(n, n));
            }
            group.emplace_back(a, Element(shape, std::move(b)));
          }
        }
      } else if (rank_hypothesis && j % 3 == 1) {
        const auto [u, v] = random_zero_product_rank_ones(shape, rng, rng.uniform() < 0.5);
        const Factorization f = factorize_through(c, u, v, tol);
        const Element u_el = rank_one_to_element(shape, u);
        const Element v_el = rank_one_to_element(shape, v);
        const Complex s = rng.complex_normal();
        const Complex t = rng.complex_normal();
        const Element& a = f.witness.a;
        const Element& b = f.witness.b;
        group.emplace_back(a, b);
        group.emplace_back(a + s * u_el, b);
        group.emplace_back(a, b + t * v_el);
        group.emplace_back(a + s * u_el, b + t * v_el);
      } else {
        for (int rep = 0; rep < 2; ++rep) {
          const Element g = random_element(shape, rng, Distribution::kInvertibleGaussian);
          const Element g_inv = inverse(g);
          group.emplace_back(g, g_inv * c);
          group.emplace_back(c * g, g_inv);
        }
      }
    }
    out.pairs.push_back(group[static_cast<std::size_t>(r)]);
  }

  for (const auto& [a, b] : out.pairs) {
    out.max_residual = std::max(out.max_residual, (a * b - c).norm());
  }
  if (out.max_residual > 1e-9 * (1.0 + c.norm())) {
    throw Error("fiber sample residual too large");
  }
  return out;
}

PropertyCheck has_product_property_at(const BilinearMap& v, const Element& c,
                                      const FiberSample& fiber, double tol) {
  if (fiber.pairs.empty()) throw PreconditionError("empty fiber");
  if (!(fiber.target.shape() == c.shape()) || (fiber.target - c).norm() > 0.0) {
    throw PreconditionError("fiber does not target c");
  }
  PropertyCheck out;
  const Vector base = v.evaluate(fiber.pairs.front().first, fiber.pairs.front().second);
  for (std::size_t k = 1; k < fiber.pairs.size(); ++k) {
    const double dev = (v.evaluate(fiber.pairs[k].first, fiber.pairs[k].second) - base).norm();
    if (dev > out.max_deviation) {
      out.max_deviation = dev;
      out.worst_index = static_cast<int>(k);
    }
  }
  out.holds = out.max_deviation <= tol * (1.0 + v.norm());
  return out;
}

ZeroProductCheck vanishes_on_zero_products(const BilinearMap& v, double tol, std::uint64_t seed) {
  const auto pool = zero_fiber_generators(v.shape(), 2 * v.shape().dim(), seed);
  ZeroProductCheck out;
  for (const auto& pair : pool) {
    const double val = v.evaluate(pair.first, pair.second).norm();
    if (!out.worst || val > out.max_value) {
      out.max_value = val;
      out.worst = pair;
    }
  }
  out.holds = out.max_value <= tol * v.norm();
  return out;
}

MultiplicationFactor factor_through_multiplication(const BilinearMap& v, std::uint64_t seed) {
  const Shape& shape = v.shape();
  const Matrix mu = multiplication_matrix(shape);
  const Matrix lin = v.linearization();
  // psi = V mu^* (mu mu^*)^-1; mu is onto, so mu mu^* is positive definite.
  const Matrix gram = mu * mu.adjoint();
  const Matrix rhs = mu * lin.adjoint();
  MultiplicationFactor out;
  out.psi = gram.ldlt().solve(rhs).adjoint();

  std::vector<ElementPair> probes = zero_fiber_generators(shape, shape.dim(), seed);
  for (int t = 0; t < 16; ++t) {
    Rng rng(seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(t));
    Element x = random_element(shape, rng);
    Element y = random_element(shape, rng);
    probes.emplace_back(unit_norm(std::move(x)), unit_norm(std::move(y)));
  }
  for (const auto& [x, y] : probes) {
    const Vector diff = v.evaluate(x, y) - out.psi * (x * y).vectorize();
    out.residual = std::max(out.residual, diff.norm());
  }
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kDeterminedConsistent: return "determined-consistent";
    case Verdict::kNotDetermined: return "not-determined";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

int fiber_difference_rank(const FiberSample& fiber) {
  if (fiber.pairs.empty()) return 0;
  const Vector base = tensor_vector(fiber.pairs.front().first, fiber.pairs.front().second);
  std::vector<Vector> rows;
  rows.reserve(fiber.pairs.size());
  for (std::size_t k = 1; k < fiber.pairs.size(); ++k) {
    rows.push_back(tensor_vector(fiber.pairs[k].first, fiber.pairs[k].second) - base);
  }
  return numerical_rank(stack_rows(rows, base.size()));
}

int tensor_span_rank(const std::vector<ElementPair>& pairs) {
  if (pairs.empty()) return 0;
  std::vector<Vector> rows;
  rows.reserve(pairs.size());
  for (const auto& [x, y] : pairs) rows.push_back(tensor_vector(x, y));
  return numerical_rank(stack_rows(rows, rows.front().size()));
}

std::optional<Certificate> find_certificate(const Element& c, const FiberSample& fiber, double tol) {
  const Shape& shape = c.shape();
  const RankProfile profile = rank_profile(c, tol);
  std::optional<Certificate> first;
  for (int i = 0; i < shape.num_blocks(); ++i) {
    const int n = shape.block_dim(i);
    const int rank = profile.ranks[static_cast<std::size_t>(i)];
    if (n < 2 || rank < n - 1) continue;
    const Matrix& ci = c.block(i);
    Certificate cert{"", i, BilinearMap(shape, 1), {}, 0.0, 0.0, false};

    if (rank == n - 1) {
      Matrix corner = Matrix::Identity(n, n);
      corner(n - 1, n - 1) = 0.0;
      // c_i = P (I_{n-1} + 0) Q with P, Q invertible; the map is transported
      // along P and Q so that it stays constant on the fiber of c_i.
      Matrix p_mat = Matrix::Identity(n, n);
      Matrix q_mat = Matrix::Identity(n, n);
      if ((ci - corner).norm() <= tol * n) {
        cert.name = "costara";
      } else {
        cert.name = "costara-transported";
        Eigen::JacobiSVD<Matrix> svd(ci, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::VectorXd s = svd.singularValues();
        s(n - 1) = 1.0;
        p_mat = svd.matrixU() * s.cast<Complex>().asDiagonal();
        q_mat = svd.matrixV().adjoint();
      }
      const Matrix p_inv = p_mat.inverse();
      const Matrix q_inv = q_mat.inverse();
      cert.map = BilinearMap::from_function(shape, 1, [&](const Element& a, const Element& b) {
        Vector out(1);
        out(0) = (p_inv * a.block(i))(n - 1, n - 1) * (b.block(i) * q_inv)(n - 1, n - 1);
        return out;
      });
      cert.zero_product_witness = {
          Element::embed(shape, i, p_mat * padded_corner(costara_left(), n)),
          Element::embed(shape, i, padded_corner(costara_right(), n) * q_mat)};
    } else {
      // rank n: a b = c_i forces b c_i^{-1} a = 1.
      Matrix c_inv = Matrix::Identity(n, n);
      Matrix left_factor = Matrix::Identity(n, n);
      if ((ci - Matrix::Identity(n, n)).norm() <= tol * n) {
        cert.name = "transpose";
      } else {
        cert.name = "transpose-transported";
        c_inv = ci.inverse();
        left_factor = ci;
      }
      cert.map = BilinearMap::from_function(shape, n * n, [&](const Element& a, const Element& b) {
        return vectorize_matrix((b.block(i) * c_inv * a.block(i)).transpose());
      });
      Matrix e12 = Matrix::Zero(n, n);
      e12(0, 1) = 1.0;
      Matrix e11 = Matrix::Zero(n, n);
      e11(0, 0) = 1.0;
      cert.zero_product_witness = {Element::embed(shape, i, left_factor * e12),
                                   Element::embed(shape, i, e11)};
    }
    cert = validate(std::move(cert), c, fiber);
    if (cert.validated) return cert;
    if (!first) first = std::move(cert);
  }
  return first;
}

DeterminednessReport determinedness_rank(const Element& c, int sample_count, std::uint64_t seed,
                                         double tol) {
  const Shape& shape = c.shape();
  const int d = shape.dim();
  if (sample_count < 4 * d * d) {
    throw PreconditionError("determinedness_rank: sample_count must be >= 4 dim(A)^2 = " +
                            std::to_string(4 * d * d));
  }
  DeterminednessReport report;
  report.expected_rank = d * d - d;
  report.samples_used = sample_count;
  report.seed = seed;
  report.tolerance = tol;
  const FiberSample fiber = sample_fiber(c, sample_count, seed, tol);
  report.measured_rank = fiber_difference_rank(fiber);
  if (report.measured_rank == report.expected_rank) {
    report.verdict = Verdict::kDeterminedConsistent;
    return report;
  }
  report.certificate = find_certificate(c, fiber, tol);
  report.verdict = report.certificate && report.certificate->validated ? Verdict::kNotDetermined
                                                                       : Verdict::kInconclusive;
  return report;
}

Counterexample costara_counterexample(int n) {
  if (n < 2) throw PreconditionError("costara_counterexample requires n >= 2");
  const Shape shape{n};
  Matrix c = Matrix::Identity(n, n);
  c(n - 1, n - 1) = 0.0;
  BilinearMap v = BilinearMap::from_function(shape, 1, [n](const Element& a, const Element& b) {
    Vector out(1);
    out(0) = a.block(0)(n - 1, n - 1) * b.block(0)(n - 1, n - 1);
    return out;
  });
  return {Element::embed(shape, 0, c), std::move(v),
          {Element::embed(shape, 0, padded_corner(costara_left(), n)),
           Element::embed(shape, 0, padded_corner(costara_right(), n))}};
}

Counterexample transpose_counterexample(int n) {
  if (n < 2) throw PreconditionError("transpose_counterexample requires n >= 2");
  const Shape shape{n};
  BilinearMap v = BilinearMap::from_function(shape, n * n, [](const Element& a, const Element& b) {
    return vectorize_matrix((b.block(0) * a.block(0)).transpose());
  });
  return {Element::identity(shape), std::move(v),
          {Element::matrix_unit(shape, 0, 0, 1), Element::matrix_unit(shape, 0, 0, 0)}};
}

BalancedCheck balanced_identity_check(const BilinearMap& v, int trials, std::uint64_t seed,
                                      double tol) {
  BalancedCheck out;
  out.precondition_met = vanishes_on_zero_products(v, tol, seed).holds;
  if (!out.precondition_met) return out;
  const Shape& shape = v.shape();
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    const Element a = unit_norm(random_element(shape, rng));
    const Element x = unit_norm(random_element(shape, rng));
    const Element b = unit_norm(random_element(shape, rng));
    const double dev = (v.evaluate(a * x, b) - v.evaluate(a, x * b)).norm();
    out.max_deviation = std::max(out.max_deviation, dev);
  }
  out.holds = out.max_deviation <= tol * (1.0 + v.norm());
  return out;
}

}  // namespace zpd
