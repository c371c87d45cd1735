#include <gtest/gtest.h>

#include <cmath>

#include "zpd/rank_structure.hpp"

namespace zpd {
namespace {

Vector unit(int n, int k) { return Vector::Unit(n, k); }

TEST(RankOne, MatrixEntries) {
  const Shape s{2};
  EXPECT_EQ((rank_one_to_element(s, {0, unit(2, 0), unit(2, 1)}) - Element::matrix_unit(s, 0, 0, 1)).norm(), 0.0);
  EXPECT_EQ((rank_one_to_element(s, {0, unit(2, 0), unit(2, 0)}) - Element::matrix_unit(s, 0, 0, 0)).norm(), 0.0);
  Vector e(2);
  e << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Matrix m = rank_one_to_element(s, {0, e, unit(2, 0)}).block(0);
  EXPECT_NEAR(m(0, 0).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(m(1, 0).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(m.col(1).norm(), 0.0);
  EXPECT_THROW(rank_one_to_element(s, {0, unit(3, 0), unit(2, 0)}), ShapeError);
}

TEST(RankOne, ConjugatesTheRightVector) {
  Vector f(2);
  f << Complex(0, 1), 0.0;
  EXPECT_EQ(rank_one_matrix(unit(2, 0), f)(0, 0), Complex(0, -1));
}

TEST(MinimalPartialIsometry, Examples) {
  EXPECT_TRUE(is_minimal_partial_isometry(Element::matrix_unit(Shape{2}, 0, 0, 1)));
  EXPECT_FALSE(is_minimal_partial_isometry(Element::identity(Shape{2})));
  const Shape s{2, 2};
  EXPECT_FALSE(is_minimal_partial_isometry(Element::matrix_unit(s, 0, 0, 0) + Element::matrix_unit(s, 1, 0, 0)));
  EXPECT_FALSE(is_minimal_partial_isometry(2.0 * Element::matrix_unit(Shape{2}, 0, 0, 1)));
}

TEST(MinPi, Examples) {
  const Shape s{2};
  const auto d = minpi_decompose(3.0 * Element::matrix_unit(s, 0, 0, 0));
  ASSERT_EQ(d.terms.size(), 1u);
  EXPECT_NEAR(d.terms[0].lambda, 3.0, 1e-14);
  EXPECT_NEAR(std::abs(d.terms[0].u.e(0)), 1.0, 1e-14);

  const auto d2 = minpi_decompose(2.0 * Element::matrix_unit(s, 0, 0, 1));
  ASSERT_EQ(d2.terms.size(), 1u);
  EXPECT_NEAR(d2.terms[0].lambda, 2.0, 1e-14);
  EXPECT_NEAR(std::abs(d2.terms[0].u.e(0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(d2.terms[0].u.f(1)), 1.0, 1e-14);

  EXPECT_TRUE(minpi_decompose(Element::zero(Shape{3, 2})).terms.empty());
}

TEST(MinPi, PropertiesOnRandomLowRank) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const Shape s{3, 4};
    const Element a(s, {rng.gaussian_matrix(3, 2) * rng.gaussian_matrix(2, 3),
                        rng.gaussian_matrix(4, 1) * rng.gaussian_matrix(1, 4)});
    const auto d = minpi_decompose(a);
    ASSERT_EQ(d.terms.size(), 3u);
    EXPECT_LE((d.reconstruct() - a).norm(), 1e-9 * a.norm());
    for (std::size_t i = 0; i < d.terms.size(); ++i) {
      EXPECT_GT(d.terms[i].lambda, 0.0);
      EXPECT_TRUE(is_minimal_partial_isometry(rank_one_to_element(s, d.terms[i].u)));
      for (std::size_t j = i + 1; j < d.terms.size(); ++j) {
        EXPECT_TRUE(are_orthogonal(rank_one_to_element(s, d.terms[i].u), rank_one_to_element(s, d.terms[j].u)));
        if (d.terms[i].u.block == d.terms[j].u.block) EXPECT_GE(d.terms[i].lambda, d.terms[j].lambda);
      }
    }
    EXPECT_EQ(d.block_terms(0).size(), 2u);
  }
}

TEST(Orthogonality, Examples) {
  const Shape s{2};
  EXPECT_TRUE(are_orthogonal(Element::matrix_unit(s, 0, 0, 0), Element::matrix_unit(s, 0, 1, 1)));
  EXPECT_FALSE(are_orthogonal(Element::matrix_unit(s, 0, 0, 0), Element::matrix_unit(s, 0, 0, 1)));
  Rng rng(3);
  const Vector e1 = rng.unit_vector(3);
  Vector e2 = rng.gaussian_vector(3);
  e2 -= e1 * e1.dot(e2);
  const Vector f1 = rng.unit_vector(3);
  Vector f2 = rng.gaussian_vector(3);
  f2 -= f1 * f1.dot(f2);
  const Shape s3{3};
  EXPECT_TRUE(are_orthogonal(rank_one_to_element(s3, {0, e1, f1}),
                             rank_one_to_element(s3, {0, e2.normalized(), f2.normalized()})));
}

TEST(RankOneProductZero, Examples) {
  EXPECT_TRUE(rank_one_product_zero({0, unit(3, 0), unit(3, 1)}, {0, unit(3, 2), unit(3, 0)}));
  EXPECT_FALSE(rank_one_product_zero({0, unit(3, 0), unit(3, 1)}, {0, unit(3, 1), unit(3, 2)}));
  EXPECT_TRUE(rank_one_product_zero({0, unit(3, 0), unit(3, 1)}, {1, unit(2, 1), unit(2, 0)}));
}

TEST(ZeroProductDecomposition, MatrixUnits) {
  const Shape s{2};
  const auto d = zp_decompose_pair(Element::matrix_unit(s, 0, 0, 1), Element::matrix_unit(s, 0, 0, 0));
  ASSERT_EQ(d.x.terms.size(), 1u);
  ASSERT_EQ(d.y.terms.size(), 1u);
  EXPECT_EQ(d.max_cross_product, 0.0);
  const auto z = zp_decompose_pair(Element::zero(s), Element::identity(s));
  EXPECT_TRUE(z.x.terms.empty());
}

TEST(ZeroProductDecomposition, RangeInsideKernel) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const Matrix x = rng.gaussian_matrix(4, 1) * rng.gaussian_matrix(1, 4);
    Eigen::FullPivLU<Matrix> lu(x);
    const Matrix k = lu.kernel();
    const Matrix p = k * (k.adjoint() * k).inverse() * k.adjoint();
    const Shape s{4};
    const Element xe = Element::embed(s, 0, x);
    const Element ye = Element::embed(s, 0, p * rng.gaussian_matrix(4, 4));
    const auto d = zp_decompose_pair(xe, ye);
    EXPECT_LE(d.max_cross_product, 1e-9);
  }
}

TEST(ZeroProductDecomposition, RejectsNonZeroProduct) {
  const Shape s{2};
  EXPECT_THROW(zp_decompose_pair(Element::identity(s), Element::identity(s)), PreconditionError);
}

TEST(CubeRoot, Examples) {
  const Shape s{2};
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 8.0;
  d(1, 1) = 27.0;
  const Element r = odd_cube_root(Element::embed(s, 0, d));
  EXPECT_NEAR(std::abs(r.block(0)(0, 0) - 2.0), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(r.block(0)(1, 1) - 3.0), 0.0, 1e-13);
  const Element e = odd_cube_root(8.0 * Element::matrix_unit(s, 0, 0, 1));
  EXPECT_LE((e - 2.0 * Element::matrix_unit(s, 0, 0, 1)).norm(), 1e-13);
}

TEST(CubeRoot, DefiningIdentity) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Element a = random_element(Shape{3, 2}, seed);
    const Element b = odd_cube_root(a);
    EXPECT_LE((b * b.adjoint() * b - a).norm(), 1e-12 * (1.0 + a.norm()));
  }
}

TEST(SupportProjections, Examples) {
  const Shape s{2};
  const auto p = support_projections(Element::matrix_unit(s, 0, 0, 1));
  EXPECT_LE((p.left - Element::matrix_unit(s, 0, 0, 0)).norm(), 1e-14);
  EXPECT_LE((p.right - Element::matrix_unit(s, 0, 1, 1)).norm(), 1e-14);

  const Element g = random_element(Shape{3, 2}, 4, Distribution::kInvertibleGaussian);
  const auto q = support_projections(g);
  EXPECT_LE((q.left - Element::identity(g.shape())).norm(), 1e-12);
  EXPECT_LE((q.right - Element::identity(g.shape())).norm(), 1e-12);

  const Shape s2{2, 2};
  const auto r = support_projections(5.0 * Element::matrix_unit(s2, 0, 0, 0));
  EXPECT_LE((r.left - Element::matrix_unit(s2, 0, 0, 0)).norm(), 1e-14);
  EXPECT_LE((r.right - Element::matrix_unit(s2, 0, 0, 0)).norm(), 1e-14);
}

TEST(Peirce, Examples) {
  const Shape s{2};
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  const Element a = Element::embed(s, 0, m);
  const auto p = peirce_decompose(a, Element::matrix_unit(s, 0, 0, 0));
  EXPECT_LE((p.a2 - Element::matrix_unit(s, 0, 0, 0)).norm(), 1e-15);
  EXPECT_LE((p.a1 - 2.0 * Element::matrix_unit(s, 0, 0, 1) - 3.0 * Element::matrix_unit(s, 0, 1, 0)).norm(), 1e-15);
  EXPECT_LE((p.a0 - 4.0 * Element::matrix_unit(s, 0, 1, 1)).norm(), 1e-15);

  const auto one = peirce_decompose(a, Element::identity(s));
  EXPECT_LE((one.a2 - a).norm(), 1e-15);
  EXPECT_LE(one.a1.norm() + one.a0.norm(), 1e-15);

  const auto zero = peirce_decompose(a, Element::zero(s));
  EXPECT_LE((zero.a0 - a).norm(), 1e-15);

  EXPECT_THROW(peirce_decompose(a, 2.0 * Element::identity(s)), PreconditionError);
}

TEST(OrthonormalComplement, BasicProperties) {
  Rng rng(8);
  std::vector<Vector> vs{rng.gaussian_vector(5), rng.gaussian_vector(5)};
  vs.push_back(vs[0] + 2.0 * vs[1]);
  const auto comp = orthonormal_complement(vs, 5);
  ASSERT_EQ(comp.size(), 3u);
  for (std::size_t i = 0; i < comp.size(); ++i) {
    EXPECT_NEAR(comp[i].norm(), 1.0, 1e-14);
    for (const auto& v : vs) EXPECT_LE(std::abs(comp[i].dot(v)), 1e-12 * v.norm());
    for (std::size_t j = i + 1; j < comp.size(); ++j) EXPECT_LE(std::abs(comp[i].dot(comp[j])), 1e-14);
  }
}

TEST(OrthonormalComplement, StandardBasisTieBreak) {
  const std::vector<Vector> vs{unit(3, 1), unit(3, 2)};
  const auto comp = orthonormal_complement(vs, 3);
  ASSERT_EQ(comp.size(), 1u);
  EXPECT_LE((comp[0] - unit(3, 0)).norm(), 1e-15);
}

}  // namespace
}  // namespace zpd
