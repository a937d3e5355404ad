#pragma once

#include "fedosov/geodesic.hpp"
#include "fedosov/vertical_operator.hpp"

#include <json.hpp>

#include <string>

namespace fedosov {

using Json = nlohmann::ordered_json;

/// Coefficients serialize as "p/q" strings when constant and as arrays of
/// [multi-index, "p/q"] pairs for chart polynomials.
Json coefficient_to_json(const Coefficient& c);
Coefficient coefficient_from_json(const Json& j, BaseMode mode, int chart_dim);

/// Presentation files carry mode, ranks, chart dimension, bracket, anchor,
/// offset and both connections, all numbers as rational strings.
Json presentation_to_json(const LiePairPresentation& p);
LiePairPresentation presentation_from_json(const Json& j);
LiePairPresentation load_presentation(const std::string& path);

Json formal_function_to_json(const FormalFunction& f);
Json bform_to_json(const BForm& x);
Json vertical_operator_to_json(const VerticalOperator& op);
Json jet_map_to_json(const JetMap& f);
/// Words split into B- and A-letter blocks; tangent charts use the
/// derivative-multi-index form instead.
Json enveloping_to_json(const EnvelopingElement& e);

} // namespace fedosov
