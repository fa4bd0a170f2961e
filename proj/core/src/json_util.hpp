#pragma once

#include <cmath>

#include <nlohmann/json.hpp>

namespace mutakill::detail {

// JSON has no infinities; degenerate zero-variance tests produce them.
inline nlohmann::ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

}  // namespace mutakill::detail
