#pragma once

#include <string>

#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
#include "json.hpp"
#pragma GCC diagnostic pop

#include "zpd/algebra.hpp"
#include "zpd/bilinear.hpp"
#include "zpd/factorization.hpp"
#include "zpd/maps.hpp"
#include "zpd/rank_structure.hpp"

namespace zpd {

using Json = nlohmann::ordered_json;

/// {"shape": [n...], "blocks": [[[re, im], ...], ...]}, each block row-major.
Json to_json(const Element& a);
/// Inverse of to_json(Element). Throws ShapeError on malformed input.
Element element_from_json(const Json& j);
/// Reads an element from a JSON file. Throws Error if it cannot be opened.
Element load_element(const std::string& path);

Json to_json(const Shape& shape);
Json to_json(const RankOne& u);
/// [{"block", "lambda", "e", "f"}, ...].
Json to_json(const MinPiDecomposition& d);
Json to_json(const Witness& w);
Json to_json(const GeneralizedWitness& w);
Json to_json(const Certificate& c);
/// {"measured_rank", "expected_rank", "verdict", "samples", "seed", ...}.
Json to_json(const DeterminednessReport& r);
Json to_json(const HomExtractionReport& r);
Json to_json(const WeightedHomReport& r);
Json to_json(const DerivationReport& r);

}  // namespace zpd
