#include <gtest/gtest.h>

#include "cli.hpp"
#include "zpd/serialize.hpp"

namespace zpd::cli {
namespace {

Json parse(const RunResult& r) { return Json::parse(r.out); }

TEST(Cli, FactorizeMatrixUnits) {
  const RunResult r = run({"factorize", "--shape", "3", "--c", "e11", "--u", "e1xe2", "--v", "e3xe1"});
  EXPECT_EQ(r.exit_code, kPass) << r.err;
  const Json j = parse(r);
  EXPECT_EQ(j.at("max_residual").get<double>(), 0.0);
  EXPECT_EQ(j.at("dispatch"), "same-block");
}

TEST(Cli, FactorizeRankHypothesisViolation) {
  const RunResult r = run({"factorize", "--shape", "2", "--c", "e11"});
  EXPECT_EQ(r.exit_code, kPrecondition);
  EXPECT_NE(r.err.find("rank hypothesis violated"), std::string::npos);
}

TEST(Cli, FactorizeRandomRank) {
  const RunResult r = run({"factorize", "--shape", "3,3", "--c", "random-rank:1,1", "--u", "e1xe2@1", "--v", "e2xe2@2"});
  EXPECT_EQ(r.exit_code, kPass) << r.err;
  EXPECT_EQ(parse(r).at("dispatch"), "both-nonzero");
  EXPECT_EQ(run({"factorize", "--shape", "3,3", "--c", "random-rank:1,1"}).exit_code, kPass);
}

TEST(Cli, ZpdCheckVerdicts) {
  const RunResult det = run({"zpd-check", "--shape", "3", "--c", "e11", "--samples", "1000"});
  EXPECT_EQ(det.exit_code, kPass) << det.err;
  const Json j = parse(det);
  EXPECT_EQ(j.at("measured_rank"), 72);
  EXPECT_EQ(j.at("expected_rank"), 72);
  EXPECT_EQ(j.at("samples"), 1000);

  const RunResult costara = run({"zpd-check", "--shape", "2", "--c", "e11"});
  EXPECT_EQ(costara.exit_code, kCertifiedNegative);
  EXPECT_EQ(parse(costara).at("certificate").at("name"), "costara");

  const RunResult transpose = run({"zpd-check", "--shape", "2", "--c", "identity"});
  EXPECT_EQ(transpose.exit_code, kCertifiedNegative);
  EXPECT_EQ(parse(transpose).at("certificate").at("name"), "transpose");
}

TEST(Cli, ZpdCheckTooFewSamples) {
  EXPECT_EQ(run({"zpd-check", "--shape", "3", "--samples", "10"}).exit_code, kPrecondition);
}

TEST(Cli, Counterexamples) {
  const RunResult two = run({"counterexample", "--shape", "2"});
  EXPECT_EQ(two.exit_code, kPass) << two.err;
  const Json j = parse(two);
  EXPECT_EQ(j.at("value"), Json::array({4.0, 0.0}));
  EXPECT_EQ(j.at("fiber_samples"), 10000);

  const RunResult three = run({"counterexample", "--shape", "3", "--samples", "500"});
  EXPECT_EQ(three.exit_code, kPass);
  EXPECT_EQ(parse(three).at("value"), Json::array({4.0, 0.0}));

  const RunResult t = run({"counterexample", "--shape", "2", "--c", "identity", "--samples", "500"});
  EXPECT_EQ(t.exit_code, kPass);
  const Element v = element_from_json(parse(t).at("value"));
  EXPECT_EQ((v - Element::matrix_unit(Shape{2}, 0, 1, 0)).norm(), 0.0);
}

TEST(Cli, Maps) {
  const RunResult pair = run({"maps", "pair", "--shape", "2", "--construct", "inner", "--seed", "7"});
  EXPECT_EQ(pair.exit_code, kPass) << pair.out << pair.err;
  const RunResult deriv = run({"maps", "derivation", "--shape", "3,3", "--c", "e11x0"});
  EXPECT_EQ(deriv.exit_code, kPass) << deriv.out << deriv.err;
  EXPECT_LE(parse(deriv).at("decomposition").at("xi_c_residual").get<double>(), 1e-12);
  const RunResult single = run({"maps", "single", "--shape", "3", "--construct", "weighted"});
  EXPECT_EQ(single.exit_code, kPass) << single.out << single.err;
  EXPECT_EQ(run({"maps", "--submode", "single", "--shape", "2,2"}).exit_code, kPass);
  EXPECT_EQ(run({"maps", "bogus", "--shape", "2"}).exit_code, kPrecondition);
}

TEST(Cli, ByteIdenticalOutput) {
  const std::vector<std::string> args{"zpd-check", "--shape", "2,2", "--c", "e11x0", "--seed", "42"};
  const RunResult a = run(args);
  const RunResult b = run(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.exit_code, b.exit_code);
  const std::vector<std::string> m{"maps", "pair", "--shape", "2,2", "--construct", "inner-permute", "--seed", "3"};
  EXPECT_EQ(run(m).out, run(m).out);
}

TEST(Cli, OutputFormats) {
  const RunResult csv = run({"zpd-check", "--shape", "2", "--output", "csv"});
  EXPECT_EQ(csv.out.rfind("key,value\n", 0), 0u);
  EXPECT_NE(csv.out.find("verdict,not-determined"), std::string::npos);
  const RunResult text = run({"zpd-check", "--shape", "2", "--output", "text"});
  EXPECT_NE(text.out.find("verdict"), std::string::npos);
  EXPECT_EQ(run({"zpd-check", "--shape", "2", "--output", "xml"}).exit_code, kPrecondition);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).exit_code, kPrecondition);
  EXPECT_EQ(run({"factorize"}).exit_code, kPrecondition);
  EXPECT_EQ(run({"factorize", "--shape", "3", "--u", "e9xe1"}).exit_code, kPrecondition);
  EXPECT_EQ(run({"factorize", "--shape", "x"}).exit_code, kPrecondition);
  EXPECT_EQ(run({"--help"}).exit_code, kPass);
}

TEST(Cli, ParseHelpers) {
  EXPECT_EQ(parse_shape("3,4").block_dims(), (std::vector<int>{3, 4}));
  const Shape s{3, 2};
  const Element c = parse_element(s, "e11x0", 0);
  EXPECT_EQ((c - Element::matrix_unit(s, 0, 0, 0)).norm(), 0.0);
  const Element corner = parse_element(Shape{3}, "identity-minus-corner", 0);
  EXPECT_EQ(rank_profile(corner).ranks[0], 2);
  EXPECT_EQ(rank_profile(parse_element(Shape{4, 4}, "random-rank:2,1", 1)).ranks, (std::vector<int>{2, 1}));
  const RankOne u = parse_rank_one(s, "e2xe1@2");
  EXPECT_EQ(u.block, 1);
  EXPECT_EQ((rank_one_to_element(s, u) - Element::matrix_unit(s, 1, 1, 0)).norm(), 0.0);
  EXPECT_THROW(parse_rank_one(s, "e1xe2@3"), ShapeError);
  EXPECT_THROW(parse_element(s, "e11x0x0", 0), ShapeError);
}

}  // namespace
}  // namespace zpd::cli
