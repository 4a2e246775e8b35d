#pragma once

// Fixed-format number output shared by CSV and JSON writers.

#include <string>

#include "json.hpp"

namespace rds {

/// Shortest-independent, platform-stable rendering at 17 significant digits.
std::string fmt17(double v);

/// JSON text with every floating-point number printed by fmt17 and object
/// keys in sorted order; two-space indentation.
std::string dump_json(const nlohmann::json& j);

}  // namespace rds
