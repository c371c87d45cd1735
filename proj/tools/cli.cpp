#include "cli.hpp"

#include <algorithm>
#include <sstream>

#include "CLI11.hpp"

#include "zpd/bilinear.hpp"
#include "zpd/factorization.hpp"
#include "zpd/maps.hpp"
#include "zpd/serialize.hpp"

namespace zpd::cli {

namespace {

struct RunConfig {
  std::string shape;
  std::string c;
  std::uint64_t seed = 0;
  int samples = 0;
  double tol = kDefaultTol;
  std::string output = "json";
  std::string u = "e1xe2";
  std::string v = "e1xe1";
  std::string construct;
  std::string submode;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

int parse_int(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ShapeError("bad " + what + ": '" + text + "'");
  return value;
}

Matrix block_token(int n, const std::string& token) {
  if (token == "0" || token == "zero") return Matrix::Zero(n, n);
  if (token == "I" || token == "identity") return Matrix::Identity(n, n);
  if (token == "e11") {
    Matrix m = Matrix::Zero(n, n);
    m(0, 0) = 1.0;
    return m;
  }
  if (token == "identity-minus-corner") {
    Matrix m = Matrix::Identity(n, n);
    m(n - 1, n - 1) = 0.0;
    return m;
  }
  throw ShapeError("unknown element token '" + token + "'");
}

Matrix random_rank_block(int n, int r, Rng& rng) {
  if (r < 0 || r > n) throw ShapeError("random-rank: rank out of range for block size");
  if (r == 0) return Matrix::Zero(n, n);
  return rng.gaussian_matrix(n, r) * rng.gaussian_matrix(r, n);
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (!j.is_array()) {
    out.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
  }
}

std::string render(const Json& report, const std::string& format) {
  if (format == "json") return report.dump(2) + "\n";
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  std::ostringstream out;
  if (format == "csv") {
    out << "key,value\n";
    for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
  } else {
    std::size_t width = 0;
    for (const auto& row : rows) width = std::max(width, row.first.size());
    for (const auto& [k, v] : rows) out << k << std::string(width - k.size() + 2, ' ') << v << '\n';
  }
  return out.str();
}

double relative_error(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

// Construct-then-recover tolerance for the maps round trips.
constexpr double kRoundTripTol = 1e-8;

struct CommandOutput {
  Json report;
  int exit_code = kPass;
  std::string warning;
};

CommandOutput cmd_factorize(const RunConfig& cfg) {
  const Shape shape = parse_shape(cfg.shape);
  const Element c = parse_element(shape, cfg.c.empty() ? "e11" : cfg.c, cfg.seed);
  const RankOne u = parse_rank_one(shape, cfg.u);
  const RankOne v = parse_rank_one(shape, cfg.v);
  const Factorization f = factorize_through(c, u, v, cfg.tol);
  const double bound = cfg.tol * (1.0 + c.norm());
  const bool passed = f.witness.max_residual() <= bound;
  Json report = {{"command", "factorize"},
                 {"shape", to_json(shape)},
                 {"dispatch", to_string(f.dispatch)},
                 {"u", to_json(u)},
                 {"v", to_json(v)},
                 {"c", to_json(c)},
                 {"witness", to_json(f.witness)},
                 {"max_residual", f.witness.max_residual()},
                 {"tolerance", bound},
                 {"passed", passed}};
  return {std::move(report), passed ? kPass : kInternalError, ""};
}

CommandOutput cmd_zpd_check(const RunConfig& cfg) {
  const Shape shape = parse_shape(cfg.shape);
  const Element c = parse_element(shape, cfg.c.empty() ? "e11" : cfg.c, cfg.seed);
  const int samples = cfg.samples > 0 ? cfg.samples : 4 * shape.dim() * shape.dim();
  const DeterminednessReport r = determinedness_rank(c, samples, cfg.seed, cfg.tol);
  Json report = {{"command", "zpd-check"}, {"shape", to_json(shape)}};
  const Json body = to_json(r);
  for (const auto& [key, value] : body.items()) report[key] = value;
  CommandOutput out{std::move(report), kPass, ""};
  switch (r.verdict) {
    case Verdict::kDeterminedConsistent: out.exit_code = kPass; break;
    case Verdict::kNotDetermined: out.exit_code = kCertifiedNegative; break;
    case Verdict::kInconclusive:
      out.exit_code = kInconclusive;
      out.warning = "warning: rank deficit without a certificate; try a larger --samples\n";
      break;
  }
  return out;
}

CommandOutput cmd_counterexample(const RunConfig& cfg) {
  const Shape shape = parse_shape(cfg.shape);
  if (shape.num_blocks() != 1) throw PreconditionError("counterexample needs a single block");
  const int n = shape.block_dim(0);
  const std::string kind = cfg.c.empty() ? "identity-minus-corner" : cfg.c;
  Counterexample ce = [&] {
    if (kind == "identity-minus-corner") return costara_counterexample(n);
    if (kind == "identity") return transpose_counterexample(n);
    throw PreconditionError("counterexample --c must be identity-minus-corner or identity");
  }();
  const int samples = cfg.samples > 0 ? cfg.samples : 10000;
  const FiberSample fiber = sample_fiber(ce.c, samples, cfg.seed, cfg.tol);
  const PropertyCheck constancy = has_product_property_at(ce.map, ce.c, fiber, 1e-8);
  const auto& [a, b] = ce.zero_product_witness;
  const Vector value = ce.map.evaluate(a, b);
  const double product = (a * b).norm();
  Json value_json;
  if (value.size() == 1) {
    value_json = Json::array({value(0).real(), value(0).imag()});
  } else {
    value_json = to_json(Element::from_vector(shape, value));
  }
  const bool reproduced = constancy.holds && product <= cfg.tol && value.norm() > 0.5;
  Json report = {{"command", "counterexample"},
                 {"name", kind == "identity" ? "transpose" : "costara"},
                 {"n", n},
                 {"c", to_json(ce.c)},
                 {"witness_a", to_json(a)},
                 {"witness_b", to_json(b)},
                 {"witness_product_norm", product},
                 {"value", value_json},
                 {"value_norm", value.norm()},
                 {"fiber_samples", samples},
                 {"fiber_max_deviation", constancy.max_deviation},
                 {"constant_on_fiber", constancy.holds},
                 {"seed", cfg.seed},
                 {"passed", reproduced}};
  return {std::move(report), reproduced ? kPass : kInternalError, ""};
}

CommandOutput maps_pair(const RunConfig& cfg, const Shape& shape) {
  const std::string construct = cfg.construct.empty() ? "inner" : cfg.construct;
  Rng rng(cfg.seed, 0);
  LinearMap rho0 = LinearMap::identity(shape);
  Element h = Element::identity(shape);
  Element h2 = Element::identity(shape);
  if (construct == "inner" || construct == "inner-permute") {
    rho0 = random_automorphism(shape, rng, construct == "inner-permute");
    h = random_element(shape, rng, Distribution::kInvertibleGaussian);
    h2 = random_element(shape, rng, Distribution::kInvertibleGaussian);
  } else if (construct != "identity") {
    throw PreconditionError("maps pair --construct must be inner, inner-permute or identity");
  }
  const LinearMap phi = left_multiplication(h).compose(rho0);
  const LinearMap psi = right_multiplication(h2).compose(rho0);
  const PairZeroProductCheck zp = pair_preserves_zero_products(phi, psi, 2 * shape.dim(), cfg.seed, cfg.tol);
  const PairIdentityCheck ident = pair_identity_check(phi, psi, 20, cfg.seed, cfg.tol);
  const HomExtractionReport r = extract_homomorphism(phi, psi, cfg.tol, 20, cfg.seed);
  const double rho_error = relative_error(r.rho.matrix, rho0.matrix);
  const bool passed = zp.holds && ident.holds && r.passed && rho_error <= kRoundTripTol;
  Json report = {{"command", "maps"},
                 {"submode", "pair"},
                 {"construct", construct},
                 {"shape", to_json(shape)},
                 {"seed", cfg.seed},
                 {"preserves_zero_products", zp.holds},
                 {"zero_product_max", zp.max_value},
                 {"pair_identity_holds", ident.holds},
                 {"extraction", to_json(r)},
                 {"rho_error", rho_error},
                 {"kernel_gap", kernel_gap(phi, psi)},
                 {"passed", passed}};
  return {std::move(report), passed ? kPass : kInternalError, ""};
}

CommandOutput maps_single(const RunConfig& cfg, const Shape& shape) {
  const std::string construct = cfg.construct.empty() ? "weighted" : cfg.construct;
  Rng rng(cfg.seed, 0);
  LinearMap rho0 = LinearMap::identity(shape);
  Element h0 = Element::identity(shape);
  if (construct == "weighted") {
    rho0 = random_automorphism(shape, rng, true);
    h0 = random_central(shape, rng);
  } else if (construct == "inner") {
    rho0 = random_automorphism(shape, rng, false);
  } else if (construct != "identity") {
    throw PreconditionError("maps single --construct must be weighted, inner or identity");
  }
  const LinearMap phi = left_multiplication(h0).compose(rho0);
  const WeightedHomReport r = weighted_hom_decompose(phi, cfg.tol, cfg.seed);
  const double h_error = (r.h - h0).norm() / std::max(1.0, h0.norm());
  const double rho_error = relative_error(r.rho.matrix, rho0.matrix);
  const bool passed = r.passed && h_error <= kRoundTripTol && rho_error <= kRoundTripTol;
  Json report = {{"command", "maps"},
                 {"submode", "single"},
                 {"construct", construct},
                 {"shape", to_json(shape)},
                 {"seed", cfg.seed},
                 {"decomposition", to_json(r)},
                 {"h_error", h_error},
                 {"rho_error", rho_error},
                 {"passed", passed}};
  return {std::move(report), passed ? kPass : kInternalError, ""};
}

CommandOutput maps_derivation(const RunConfig& cfg, const Shape& shape) {
  const std::string construct = cfg.construct.empty() ? "inner" : cfg.construct;
  const Element c = parse_element(shape, cfg.c.empty() ? "zero" : cfg.c, cfg.seed);
  Rng rng(cfg.seed, 0);
  Element m = Element::zero(shape);
  if (construct == "inner") {
    m = random_element(shape, rng);
  } else if (construct != "central") {
    throw PreconditionError("maps derivation --construct must be inner or central");
  }
  // xi is a scalar on every block where c vanishes and zero elsewhere.
  const Element central = random_central(shape, rng);
  std::vector<Matrix> xi_blocks;
  for (int i = 0; i < shape.num_blocks(); ++i) {
    const int n = shape.block_dim(i);
    xi_blocks.push_back(c.block(i).norm() == 0.0 ? central.block(i) : Matrix::Zero(n, n));
  }
  const Element xi0(shape, std::move(xi_blocks));
  const LinearMap d0 = inner_derivation(m);
  const LinearMap delta = d0 + left_multiplication(xi0);
  const DerivationReport r = derivation_decompose(delta, c, cfg.tol, cfg.seed);
  const double xi_error = (r.xi - xi0).norm() / std::max(1.0, xi0.norm());
  const double d_error = relative_error(r.d.matrix, d0.matrix);
  const bool passed = r.passed && xi_error <= kRoundTripTol && d_error <= kRoundTripTol;
  Json report = {{"command", "maps"},
                 {"submode", "derivation"},
                 {"construct", construct},
                 {"shape", to_json(shape)},
                 {"seed", cfg.seed},
                 {"c", to_json(c)},
                 {"decomposition", to_json(r)},
                 {"xi_error", xi_error},
                 {"d_error", d_error},
                 {"passed", passed}};
  return {std::move(report), passed ? kPass : kInternalError, ""};
}

CommandOutput cmd_maps(const RunConfig& cfg) {
  const Shape shape = parse_shape(cfg.shape);
  if (cfg.submode == "pair") return maps_pair(cfg, shape);
  if (cfg.submode == "single") return maps_single(cfg, shape);
  if (cfg.submode == "derivation") return maps_derivation(cfg, shape);
  throw PreconditionError("maps submode must be pair, single or derivation");
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--shape", cfg.shape, "Block sizes, e.g. 3 or 3,4")->required();
  sub->add_option("--c", cfg.c, "Element spec");
  sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  sub->add_option("--samples", cfg.samples, "Sample count (default depends on command)");
  sub->add_option("--tol", cfg.tol, "Tolerance")->capture_default_str();
  sub->add_option("--output", cfg.output, "Output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
}

}  // namespace

Shape parse_shape(const std::string& text) {
  std::vector<int> dims;
  for (const auto& part : split(text, ',')) dims.push_back(parse_int(part, "shape"));
  return Shape(dims);
}

Element parse_element(const Shape& shape, const std::string& spec, std::uint64_t seed) {
  if (spec.rfind("file:", 0) == 0) {
    Element e = load_element(spec.substr(5));
    if (!(e.shape() == shape)) throw ShapeError("element file shape does not match --shape");
    return e;
  }
  std::vector<Matrix> blocks;
  if (spec.rfind("random-rank:", 0) == 0) {
    std::vector<int> ranks;
    for (const auto& part : split(spec.substr(12), ',')) ranks.push_back(parse_int(part, "rank"));
    if (ranks.size() == 1) ranks.resize(static_cast<std::size_t>(shape.num_blocks()), ranks[0]);
    if (static_cast<int>(ranks.size()) != shape.num_blocks()) {
      throw ShapeError("random-rank needs one rank per block");
    }
    Rng rng(seed, 0xc0ffeeULL);
    for (int i = 0; i < shape.num_blocks(); ++i) {
      blocks.push_back(random_rank_block(shape.block_dim(i), ranks[static_cast<std::size_t>(i)], rng));
    }
    return {shape, std::move(blocks)};
  }
  std::vector<std::string> tokens = split(spec, 'x');
  if (tokens.size() == 1) tokens.resize(static_cast<std::size_t>(shape.num_blocks()), tokens[0]);
  if (static_cast<int>(tokens.size()) != shape.num_blocks()) {
    throw ShapeError("element spec '" + spec + "' needs one token per block");
  }
  for (int i = 0; i < shape.num_blocks(); ++i) {
    blocks.push_back(block_token(shape.block_dim(i), tokens[static_cast<std::size_t>(i)]));
  }
  return {shape, std::move(blocks)};
}

RankOne parse_rank_one(const Shape& shape, const std::string& spec) {
  std::string body = spec;
  int block = 1;
  if (const auto at = spec.find('@'); at != std::string::npos) {
    body = spec.substr(0, at);
    block = parse_int(spec.substr(at + 1), "block index");
  }
  const auto parts = split(body, 'x');
  if (parts.size() != 2 || parts[0].size() < 2 || parts[1].size() < 2 || parts[0][0] != 'e' ||
      parts[1][0] != 'e') {
    throw ShapeError("rank-one spec must look like e<i>xe<j>[@block]: '" + spec + "'");
  }
  if (block < 1 || block > shape.num_blocks()) throw ShapeError("block index out of range in '" + spec + "'");
  const int n = shape.block_dim(block - 1);
  const int i = parse_int(parts[0].substr(1), "row index");
  const int j = parse_int(parts[1].substr(1), "column index");
  if (i < 1 || i > n || j < 1 || j > n) throw ShapeError("index out of range in '" + spec + "'");
  return RankOne{block - 1, Vector::Unit(n, i - 1), Vector::Unit(n, j - 1)};
}

RunResult run(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Zero-product determinedness experiments on direct sums of matrix algebras", "zpd"};
  app.require_subcommand(1);

  auto* factorize = app.add_subcommand("factorize", "Factorize c through a zero-product pair (u, v)");
  add_common(factorize, cfg);
  factorize->add_option("--u", cfg.u, "Rank-one u, e<i>xe<j>[@block]")->capture_default_str();
  factorize->add_option("--v", cfg.v, "Rank-one v, e<i>xe<j>[@block]")->capture_default_str();

  auto* check = app.add_subcommand("zpd-check", "Test whether A is determined by products at c");
  add_common(check, cfg);

  auto* counter = app.add_subcommand("counterexample", "Reproduce the rank n-1 or rank n counterexample");
  add_common(counter, cfg);

  auto* maps = app.add_subcommand("maps", "Round trips for zero-product preserving maps");
  add_common(maps, cfg);
  maps->add_option("submode,--submode", cfg.submode, "pair | single | derivation");
  maps->add_option("--construct", cfg.construct, "Construction of the test map");

  RunResult result;
  std::ostringstream out;
  std::ostringstream err;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    result.out = out.str();
    result.err = err.str();
    result.exit_code = code == 0 ? kPass : kPrecondition;
    return result;
  }

  try {
    CommandOutput cmd;
    if (factorize->parsed()) {
      cmd = cmd_factorize(cfg);
    } else if (check->parsed()) {
      cmd = cmd_zpd_check(cfg);
    } else if (counter->parsed()) {
      cmd = cmd_counterexample(cfg);
    } else {
      cmd = cmd_maps(cfg);
    }
    result.out = render(cmd.report, cfg.output);
    result.err = cmd.warning;
    result.exit_code = cmd.exit_code;
  } catch (const PreconditionError& e) {
    result.err = std::string("error: ") + e.what() + "\n";
    result.exit_code = kPrecondition;
  } catch (const ShapeError& e) {
    result.err = std::string("error: ") + e.what() + "\n";
    result.exit_code = kPrecondition;
  } catch (const std::exception& e) {
    result.err = std::string("internal error: ") + e.what() + "\n";
    result.exit_code = kInternalError;
  }
  return result;
}

}  // namespace zpd::cli
