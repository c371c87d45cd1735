#include "zpd/serialize.hpp"

#include <fstream>

namespace zpd {

namespace {

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_json(v(k)));
  return out;
}

Json witness_residuals(const Witness& w) {
  return {{"ay", w.residual_ay}, {"xb", w.residual_xb}, {"ab_minus_c", w.residual_abc}};
}

}  // namespace

Json to_json(const Shape& shape) { return shape.block_dims(); }

Json to_json(const Element& a) {
  Json blocks = Json::array();
  for (const auto& m : a.blocks()) {
    Json entries = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) entries.push_back(complex_json(m(r, c)));
    blocks.push_back(std::move(entries));
  }
  return {{"shape", to_json(a.shape())}, {"blocks", std::move(blocks)}};
}

Element element_from_json(const Json& j) {
  try {
    const Shape shape(j.at("shape").get<std::vector<int>>());
    const Json& blocks = j.at("blocks");
    if (!blocks.is_array() || static_cast<int>(blocks.size()) != shape.num_blocks()) {
      throw ShapeError("element json: block count does not match shape");
    }
    std::vector<Matrix> out;
    for (int i = 0; i < shape.num_blocks(); ++i) {
      const int n = shape.block_dim(i);
      const Json& entries = blocks[static_cast<std::size_t>(i)];
      if (!entries.is_array() || static_cast<int>(entries.size()) != n * n) {
        throw ShapeError("element json: block " + std::to_string(i) + " has the wrong size");
      }
      Matrix m(n, n);
      for (int k = 0; k < n * n; ++k) {
        const Json& z = entries[static_cast<std::size_t>(k)];
        m(k / n, k % n) = z.is_array() ? Complex(z.at(0).get<double>(), z.at(1).get<double>())
                                       : Complex(z.get<double>(), 0.0);
      }
      out.push_back(std::move(m));
    }
    return {shape, std::move(out)};
  } catch (const nlohmann::json::exception& e) {
    throw ShapeError(std::string("element json: ") + e.what());
  }
}

Element load_element(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ShapeError("cannot parse " + path + ": " + e.what());
  }
  return element_from_json(j);
}

Json to_json(const RankOne& u) {
  return {{"block", u.block}, {"e", vector_json(u.e)}, {"f", vector_json(u.f)}};
}

Json to_json(const MinPiDecomposition& d) {
  Json out = Json::array();
  for (const auto& t : d.terms) {
    out.push_back({{"block", t.u.block},
                   {"lambda", t.lambda},
                   {"e", vector_json(t.u.e)},
                   {"f", vector_json(t.u.f)}});
  }
  return out;
}

Json to_json(const Witness& w) {
  return {{"a", to_json(w.a)}, {"b", to_json(w.b)}, {"residuals", witness_residuals(w)}};
}

Json to_json(const GeneralizedWitness& w) {
  Json parts = Json::array();
  for (const auto& p : w.parts) {
    parts.push_back({{"x_part", to_json(p.x_part)},
                     {"y_part", to_json(p.y_part)},
                     {"witness", to_json(p.witness)}});
  }
  return {{"split_side", to_string(w.split_side)},
          {"max_residual", w.max_residual()},
          {"parts", std::move(parts)}};
}

Json to_json(const Certificate& c) {
  return {{"name", c.name},
          {"block", c.block},
          {"witness_a", to_json(c.zero_product_witness.first)},
          {"witness_b", to_json(c.zero_product_witness.second)},
          {"witness_value", c.witness_value},
          {"fiber_deviation", c.fiber_deviation},
          {"validated", c.validated}};
}

Json to_json(const DeterminednessReport& r) {
  Json out = {{"measured_rank", r.measured_rank},
              {"expected_rank", r.expected_rank},
              {"verdict", to_string(r.verdict)},
              {"samples", r.samples_used},
              {"seed", r.seed},
              {"tolerance", r.tolerance}};
  out["certificate"] = r.certificate ? to_json(*r.certificate) : Json(nullptr);
  return out;
}

Json to_json(const HomExtractionReport& r) {
  return {{"passed", r.passed},
          {"phi1", to_json(r.phi1)},
          {"psi1", to_json(r.psi1)},
          {"rho_mismatch", r.rho_mismatch},
          {"mult_residual", r.mult_residual},
          {"unital_residual", r.unital_residual},
          {"reconstruction_residual", r.reconstruction_residual}};
}

Json to_json(const WeightedHomReport& r) {
  return {{"passed", r.passed},
          {"h", to_json(r.h)},
          {"centrality_residual", r.centrality_residual},
          {"mult_residual", r.mult_residual},
          {"unital_residual", r.unital_residual}};
}

Json to_json(const DerivationReport& r) {
  return {{"passed", r.passed},
          {"xi", to_json(r.xi)},
          {"leibniz_residual", r.leibniz_residual},
          {"centrality_residual", r.centrality_residual},
          {"xi_c_residual", r.xi_c_residual}};
}

}  // namespace zpd
