#pragma once

#include <string>
#include <vector>

#include "zpd/algebra.hpp"
#include "zpd/rank_structure.hpp"

namespace zpd::cli {

enum ExitCode : int {
  kPass = 0,
  kInternalError = 1,
  kPrecondition = 2,
  kCertifiedNegative = 3,
  kInconclusive = 4,
};

struct RunResult {
  int exit_code = kInternalError;
  std::string out;
  std::string err;
};

/// Runs one command line (without the program name) and captures its output.
RunResult run(const std::vector<std::string>& args);

/// "3" or "3,4".
Shape parse_shape(const std::string& text);

/// zero | e11 | identity | identity-minus-corner | file:<path> |
/// random-rank:<r1,r2,...> | per-block tokens joined by 'x' (e.g. e11x0).
Element parse_element(const Shape& shape, const std::string& spec, std::uint64_t seed);

/// "e<i>xe<j>[@block]", all indices 1-based.
RankOne parse_rank_one(const Shape& shape, const std::string& spec);

}  // namespace zpd::cli
