#pragma once

#include "pgfl/finite_pp.hpp"

#include <json.hpp>

#include <string>

namespace pgfl {

/// JSON document:
///   {"labels": [...], "n_max": N, "truncation_mass": t,
///    "tensors": [[p_0], [p_1 row-major], ..., [p_N row-major]]}
nlohmann::json to_json(const MultiObjectDensity& p);
MultiObjectDensity density_from_json(const nlohmann::json& j);

/// Shortest round-trip decimal representation ("%.17g").
std::string format_double(double v);

}  // namespace pgfl
