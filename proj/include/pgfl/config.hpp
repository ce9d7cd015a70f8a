#pragma once

#include "pgfl/bayes.hpp"
#include "pgfl/finite_pp.hpp"
#include "pgfl/prediction.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>

namespace pgfl {

inline constexpr int kConfigVersion = 1;

/// A complete filtering scenario, validated on load.
///
/// Document layout (all vectors follow label order):
///   version, state_labels, observation_labels, n_max, [m_max],
///   prior      {type: poisson|bernoulli|explicit|empty, ...}
///   kernel     {type: bernoulli_detection|explicit, ...}
///   [clutter]  {type: poisson|explicit|empty, ...}
///   [transition] {survival, motion, birth}
///   steps, seed, [tolerances {tail, truncation}], [log_domain]
struct ScenarioConfig {
    FiniteSpace states;
    FiniteSpace observations;
    std::size_t n_max;
    MultiObjectDensity prior;
    ObservationKernel kernel;
    std::optional<ClutterProcess> clutter;
    std::optional<MultiplicativeSpec> transition;
    std::size_t steps = 0;
    std::uint64_t seed = 0;
    double tail_tol = 1e-9;
    double truncation_tol = 1e-9;
    bool log_domain = false;

    /// The configured clutter, or the empty process when disabled.
    [[nodiscard]] ClutterProcess clutter_or_none() const;
};

/// Throws ConfigError with a description of the first violated rule.
ScenarioConfig load_config(const nlohmann::json& doc);
ScenarioConfig load_config_file(const std::filesystem::path& path);

/// Parses a comma-separated label list such as "z1,z2,z1".
MeasurementSet parse_measurements(const FiniteSpace& observations, const std::string& list);

}  // namespace pgfl
