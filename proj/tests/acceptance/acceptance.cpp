// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "zpd/bilinear.hpp"
#include "zpd/factorization.hpp"
#include "zpd/maps.hpp"
#include "zpd/rank_structure.hpp"

using namespace zpd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Matrix random_rank(Rng& rng, int n, int r) {
  if (r == 0) return Matrix::Zero(n, n);
  return rng.gaussian_matrix(n, r) * rng.gaussian_matrix(r, n);
}

Matrix random_projection(Rng& rng, int n, int r) {
  Eigen::HouseholderQR<Matrix> qr(rng.gaussian_matrix(n, r));
  const Matrix q = qr.householderQ() * Matrix::Identity(n, r);
  return q * q.adjoint();
}

Matrix random_partial_isometry(Rng& rng, int n, int r) {
  Matrix d = Matrix::Zero(n, n);
  for (int k = 0; k < r; ++k) d(k, k) = 1.0;
  return rng.unitary(n) * d * rng.unitary(n);
}

Element random_block_element(const Shape& s, Rng& rng, const std::function<Matrix(int)>& make) {
  std::vector<Matrix> blocks;
  for (int n : s.block_dims()) blocks.push_back(make(n));
  return {s, std::move(blocks)};
}

Outcome criterion1() {
  const Counterexample two = costara_counterexample(2);
  const Counterexample three = costara_counterexample(3);
  double worst = 0.0;
  for (const auto* ce : {&two, &three}) {
    const auto& [a, b] = ce->zero_product_witness;
    worst = std::max(worst, (a * b).norm());
    worst = std::max(worst, std::abs(ce->map.evaluate(a, b)(0) - 4.0));
  }
  Matrix a(2, 2), b(2, 2);
  a << 1, 1, 2, 2;
  b << -1, -2, 1, 2;
  const bool explicit_pair = (two.zero_product_witness.first.block(0) - a).norm() == 0.0 &&
                          (two.zero_product_witness.second.block(0) - b).norm() == 0.0;
  return {explicit_pair && worst <= 1e-12,
          "n=2 and n=3: ab=0, V(a,b)=4, max error " + fmt("%.1e", worst)};
}

Outcome criterion2() {
  double worst = 0.0;
  bool ok = true;
  for (const Counterexample& ce : {costara_counterexample(2), transpose_counterexample(2)}) {
    const FiberSample fiber = sample_fiber(ce.c, 10000, 2024);
    const PropertyCheck check = has_product_property_at(ce.map, ce.c, fiber, 1e-8);
    ok = ok && check.holds;
    worst = std::max(worst, check.max_deviation / (1.0 + ce.map.norm()));
  }
  return {ok, "10^4 fiber samples each, max scaled deviation " + fmt("%.1e", worst)};
}

Outcome criterion3() {
  const DeterminednessReport m3 = determinedness_rank(Element::matrix_unit(Shape{3}, 0, 0, 0), 1000, 1);
  Rng rng(3);
  const Element rank2 = Element::embed(Shape{4}, 0, random_rank(rng, 4, 2));
  const Element e11 = Element::matrix_unit(Shape{4}, 0, 0, 0);
  const DeterminednessReport m4a = determinedness_rank(rank2, 1024, 2);
  const DeterminednessReport m4b = determinedness_rank(e11, 1024, 3);
  const bool ok = m3.measured_rank == 72 && m4a.measured_rank == 240 && m4b.measured_rank == 240 &&
                  m3.verdict == Verdict::kDeterminedConsistent &&
                  m4a.verdict == Verdict::kDeterminedConsistent;
  return {ok, "M_3 e11: " + std::to_string(m3.measured_rank) + "/72; M_4 rank 2: " +
                  std::to_string(m4a.measured_rank) + "/240; M_4 rank 1: " +
                  std::to_string(m4b.measured_rank) + "/240"};
}

Outcome criterion4() {
  const DeterminednessReport costara = determinedness_rank(Element::matrix_unit(Shape{2}, 0, 0, 0), 10000, 4);
  const DeterminednessReport transpose = determinedness_rank(Element::identity(Shape{2}), 10000, 5);
  const bool c_ok = costara.measured_rank <= 11 && costara.verdict == Verdict::kNotDetermined &&
                    costara.certificate && costara.certificate->name == "costara" &&
                    costara.certificate->validated &&
                    std::abs(costara.certificate->witness_value - 4.0) <= 1e-12;
  const bool t_ok = transpose.verdict == Verdict::kNotDetermined && transpose.certificate &&
                    transpose.certificate->name == "transpose" && transpose.certificate->validated;
  return {c_ok && t_ok, "M_2 e11: rank " + std::to_string(costara.measured_rank) +
                            "/12, Costara certificate value " +
                            fmt("%.3f", costara.certificate ? costara.certificate->witness_value : 0.0) +
                            "; M_2 I: rank " + std::to_string(transpose.measured_rank) +
                            "/12, transpose certificate " +
                            (t_ok ? "validated" : "not validated")};
}

Outcome criterion5() {
  std::map<DispatchCase, int> seen;
  double worst = 0.0;
  bool ok = true;
  for (int t = 0; t < 1000; ++t) {
    Rng rng(5005, static_cast<std::uint64_t>(t));
    const int k = t % 4 == 0 ? rng.uniform_int(1, 3) : rng.uniform_int(2, 3);
    std::vector<int> dims;
    for (int i = 0; i < k; ++i) dims.push_back(rng.uniform_int(3, 6));
    const Shape s(dims);
    const bool same = t % 4 == 0;
    const auto [u, v] = random_zero_product_rank_ones(s, rng, same);
    // Target the dispatch case by zeroing c on the blocks of u and v.
    std::vector<Matrix> blocks;
    for (int i = 0; i < k; ++i) {
      const int n = dims[static_cast<std::size_t>(i)];
      bool zero = rng.uniform() < 0.2;
      if (!same && (i == u.block || i == v.block)) {
        const int mode = t % 4;  // 1: both zero, 2: one nonzero, 3: both nonzero
        zero = mode == 1 || (mode == 2 && i == u.block);
      }
      blocks.push_back(zero ? Matrix::Zero(n, n) : random_rank(rng, n, rng.uniform_int(1, n - 2)));
    }
    const Element c(s, blocks);
    const Factorization f = factorize_through(c, u, v);
    ++seen[f.dispatch];
    const double scaled = f.witness.max_residual() / (1.0 + c.norm());
    worst = std::max(worst, scaled);
    ok = ok && scaled <= 1e-9;
  }
  for (auto d : {DispatchCase::kSameBlock, DispatchCase::kBothZero, DispatchCase::kOneNonzero,
                 DispatchCase::kBothNonzero}) {
    ok = ok && seen[d] >= 50;
  }
  return {ok, "1000 witnesses, max residual/(1+|c|) " + fmt("%.1e", worst) + ", cases " +
                  std::to_string(seen[DispatchCase::kSameBlock]) + "/" +
                  std::to_string(seen[DispatchCase::kBothZero]) + "/" +
                  std::to_string(seen[DispatchCase::kOneNonzero]) + "/" +
                  std::to_string(seen[DispatchCase::kBothNonzero])};
}

Outcome criterion6() {
  double worst = 0.0;
  int verified = 0;
  std::map<SplitSide, int> sides;
  for (int t = 0; t < 500; ++t) {
    Rng rng(6006, static_cast<std::uint64_t>(t));
    const Shape s = t % 2 == 0 ? Shape{3, 3} : Shape{3, 4};
    const Element c = random_block_element(s, rng, [&](int n) { return random_rank(rng, n, rng.uniform_int(1, n - 2)); });
    auto make = [&](int n) -> Matrix {
      if (rng.uniform() < 0.5) return random_projection(rng, n, rng.uniform_int(1, 2));
      return rank_one_matrix(rng.unit_vector(n), rng.unit_vector(n));
    };
    const bool swap = rng.uniform() < 0.5;
    const int bx = swap ? 1 : 0;
    const int by = 1 - bx;
    const Element x = Element::embed(s, bx, make(s.block_dim(bx)));
    const Element y = Element::embed(s, by, make(s.block_dim(by)));
    const GeneralizedWitness w = generalized_factorize(c, x, y);
    ++sides[w.split_side];
    worst = std::max(worst, w.max_residual());
    if (verify_generalized(x, y, c, w, 1e-8)) ++verified;
  }
  return {verified == 500, std::to_string(verified) + "/500 verified, max part residual " +
                               fmt("%.1e", worst) + ", splits none/left/right/both " +
                               std::to_string(sides[SplitSide::kNone]) + "/" +
                               std::to_string(sides[SplitSide::kLeft]) + "/" +
                               std::to_string(sides[SplitSide::kRight]) + "/" +
                               std::to_string(sides[SplitSide::kBoth])};
}

Outcome criterion7() {
  std::string detail;
  bool ok = true;
  for (const Shape& s : {Shape{2}, Shape{3}, Shape{2, 2}}) {
    const int r = tensor_span_rank(zero_fiber_generators(s, 4 * s.dim(), 7));
    const int want = s.dim() * s.dim() - s.dim();
    ok = ok && r == want;
    detail += (detail.empty() ? "" : ", ") + std::to_string(r) + "/" + std::to_string(want);
  }
  return {ok, "span ranks " + detail};
}

Outcome criterion8() {
  const Shape s{3, 3};
  double pair_err = 0.0, single_err = 0.0, deriv_err = 0.0, xi_c = 0.0;
  bool ok = true;
  const Element c = Element::matrix_unit(s, 0, 0, 0);
  const Element xi0(s, {Matrix::Zero(3, 3), Complex(0, 2) * Matrix::Identity(3, 3)});
  for (int t = 0; t < 100; ++t) {
    Rng rng(8008, static_cast<std::uint64_t>(t));
    const LinearMap rho0 = random_automorphism(s, rng, true);
    const Element h = random_element(s, rng, Distribution::kInvertibleGaussian);
    const Element h2 = random_element(s, rng, Distribution::kInvertibleGaussian);
    const HomExtractionReport pr = extract_homomorphism(left_multiplication(h).compose(rho0),
                                                        right_multiplication(h2).compose(rho0), 1e-8, 20, t);
    const double e1 = (pr.rho.matrix - rho0.matrix).norm() / std::max(1.0, rho0.norm());
    pair_err = std::max(pair_err, e1);
    ok = ok && pr.passed && e1 <= 1e-8;

    const Element w0 = random_central(s, rng);
    const WeightedHomReport wr = weighted_hom_decompose(left_multiplication(w0).compose(rho0), 1e-8, t);
    const double e2 = std::max((wr.h - w0).norm() / std::max(1.0, w0.norm()),
                               (wr.rho.matrix - rho0.matrix).norm() / std::max(1.0, rho0.norm()));
    single_err = std::max(single_err, e2);
    ok = ok && wr.passed && e2 <= 1e-8;

    const LinearMap d0 = inner_derivation(random_element(s, rng));
    const DerivationReport dr = derivation_decompose(d0 + left_multiplication(xi0), c, 1e-9, t);
    const double e3 = std::max((dr.xi - xi0).norm(), (dr.d.matrix - d0.matrix).norm() / std::max(1.0, d0.norm()));
    deriv_err = std::max(deriv_err, e3);
    xi_c = std::max(xi_c, dr.xi_c_residual);
    ok = ok && dr.passed && e3 <= 1e-8 && dr.xi_c_residual <= 1e-12;
  }
  return {ok, "100 each: pair " + fmt("%.1e", pair_err) + ", weighted " + fmt("%.1e", single_err) +
                  ", derivation " + fmt("%.1e", deriv_err) + ", |xi c| " + fmt("%.1e", xi_c)};
}

Outcome criterion9() {
  const Shape s{3, 2};
  double cube = 0.0, support = 0.0, peirce = 0.0, balanced = 0.0;
  bool balanced_ok = true;
  for (int t = 0; t < 200; ++t) {
    Rng rng(9009, static_cast<std::uint64_t>(t));
    // Zero-product pair: range(y) inside ker(x).
    std::vector<Matrix> xb, yb;
    for (int n : s.block_dims()) {
      const Matrix p = random_projection(rng, n, rng.uniform_int(1, n - 1));
      xb.push_back(rng.gaussian_matrix(n, n) * (Matrix::Identity(n, n) - p));
      yb.push_back(p * rng.gaussian_matrix(n, n));
    }
    const Element x(s, xb), y(s, yb);
    const double scale = 1.0 + x.norm() * y.norm();
    cube = std::max(cube, (x * y).norm() / scale);
    cube = std::max(cube, (odd_cube_root(x) * odd_cube_root(y)).norm() / (1.0 + odd_cube_root(x).norm() * odd_cube_root(y).norm()));

    const Element a = random_block_element(s, rng, [&](int n) { return random_rank(rng, n, rng.uniform_int(0, n)); });
    const SupportProjections sp = support_projections(a);
    const double an = 1.0 + a.norm();
    support = std::max({support, (sp.left * a - a).norm() / an, (a * sp.right - a).norm() / an,
                        (sp.left * sp.left - sp.left).norm(), (sp.right * sp.right - sp.right).norm(),
                        (sp.left.adjoint() - sp.left).norm(), (sp.right.adjoint() - sp.right).norm()});
    const auto ranks = rank_profile(a).ranks;
    for (int i = 0; i < s.num_blocks(); ++i) {
      const double trace = sp.left.block(i).trace().real();
      support = std::max(support, std::abs(trace - ranks[static_cast<std::size_t>(i)]));
    }

    const Element e = random_block_element(s, rng, [&](int n) { return random_partial_isometry(rng, n, rng.uniform_int(0, n)); });
    const Element b = random_element(s, rng);
    const PeirceComponents pc = peirce_decompose(b, e);
    const Element l = e * e.adjoint();
    const Element r = e.adjoint() * e;
    const Element one = Element::identity(s);
    const double bn = 1.0 + b.norm();
    peirce = std::max({peirce, (pc.a2 + pc.a1 + pc.a0 - b).norm() / bn,
                       (l * pc.a2 * r - pc.a2).norm() / bn,
                       ((one - l) * pc.a0 * (one - r) - pc.a0).norm() / bn,
                       (l * pc.a1 * r).norm() / bn, ((one - l) * pc.a1 * (one - r)).norm() / bn});

    const BilinearMap v = t % 2 == 0 ? product_map(s, rng.gaussian_matrix(2, s.dim())) : trace_product_map(s);
    const BalancedCheck bc = balanced_identity_check(v, 1, static_cast<std::uint64_t>(t), 1e-8);
    balanced_ok = balanced_ok && bc.precondition_met && bc.holds;
    balanced = std::max(balanced, bc.max_deviation / (1.0 + v.norm()));
  }
  const bool ok = cube <= 1e-8 && support <= 1e-8 && peirce <= 1e-8 && balanced_ok && balanced <= 1e-8;
  return {ok, "200 trials each: cube root " + fmt("%.1e", cube) + ", support " + fmt("%.1e", support) +
                  ", Peirce " + fmt("%.1e", peirce) + ", balanced " + fmt("%.1e", balanced)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria{
      {1, "Costara counterexample value", 1, criterion1},
      {2, "counterexample fiber constancy", 20, criterion2},
      {3, "determinedness under the rank hypothesis", 60, criterion3},
      {4, "non-determinedness beyond the rank hypothesis", 30, criterion4},
      {5, "factorization witness suite", 60, criterion5},
      {6, "generalized factorization suite", 60, criterion6},
      {7, "zero-product baseline", 30, criterion7},
      {8, "map round trips", 30, criterion8},
      {9, "structural invariants", 30, criterion9},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.budget_s;
    failures += pass ? 0 : 1;
    std::printf("[%s] criterion %d: %s: %s (%.2f s, budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
