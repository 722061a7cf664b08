#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "greenp2/homog_poly.hpp"
#include "greenp2/proj_map.hpp"

namespace greenp2cli {

using Json = nlohmann::ordered_json;

/// Map file, schema 1:
///   {"schema": 1, "degree": d,
///    "components": [[[i, j, k, re, im], ...], [...], [...]],
///    "metadata": {...}}
/// Unknown fields are rejected. Errors are ParseError naming the line or the
/// JSON pointer of the offending entry; DegenerateMap comes from validation.
greenp2::ProjMap parse_map(std::string_view text);
greenp2::ProjMap load_map(const std::string& path);

/// Nonzero coefficients in storage order; values round-trip exactly.
Json map_to_json(const greenp2::ProjMap& f, const Json& metadata = Json::object());

/// Homogeneous polynomial from an expression in z, w, t, e.g. "(z+w+2t)*(z-w+t)"
/// or "z^2 - 0.5i*w*t". Implicit products of a number and a factor are allowed.
greenp2::HomogPoly3 parse_curve(std::string_view expr);

/// Point from "z:w:t" or "z,w,t" with constant coordinates, e.g. "1:0:2i".
greenp2::ProjPoint parse_point(std::string_view text);

}  // namespace greenp2cli
