#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "cans/minimax.hpp"
#include "cans/poly.hpp"
#include "cans/schedule.hpp"

namespace cans {

// JSON shapes (keys are emitted in sorted order, so output is stable):
//   polynomial    {"coeffs": [a1, a3, ...]}
//   composition   [polynomial, ...]                (innermost first)
//   minimax       {"a","alternance","b","coeffs","epsilon"}
//   schedule      {"delta"?, "entries": [{"a","b","coeffs","epsilon"}, ...],
//                  "total_matmuls"}

nlohmann::json poly_to_json(const OddPolynomial& p);
OddPolynomial poly_from_json(const nlohmann::json& j);

nlohmann::json composition_to_json(const Composition& c);
Composition composition_from_json(const nlohmann::json& j);

nlohmann::json minimax_to_json(const MinimaxResult& r);

nlohmann::json schedule_to_json(const Schedule& s,
                                std::optional<double> delta = std::nullopt);
Schedule schedule_from_json(const nlohmann::json& j);

// File helpers; throw ParseError with a description on malformed content.
nlohmann::json load_json_file(const std::string& path);
Composition load_composition_file(const std::string& path);
Schedule load_schedule_file(const std::string& path);

}  // namespace cans
