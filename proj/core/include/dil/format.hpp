#pragma once

#include "dil/types.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace dil {

/// Shortest round-trip decimal form of a double; stable across runs.
std::string fmt_double(double v);

nlohmann::json vec_to_json(const Vec& v);
Vec vec_from_json(const nlohmann::json& j);

}  // namespace dil
