#pragma once

#include "pgfl/bayes.hpp"
#include "pgfl/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace pgfl {

/// Seeded generator: mt19937_64, uniforms from the top 53 bits. Sampling is
/// done by inverse CDF in a fixed order, so draws match across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
    /// Index drawn proportionally to nonnegative weights.
    std::size_t categorical(std::span<const double> weights);

private:
    std::mt19937_64 engine_;
};

/// Draws one configuration (ordered tuple) from a point process.
Tuple sample_configuration(const MultiObjectDensity& p, Rng& rng);

/// Ground truth and measurements of a scenario. truth[0] is drawn from the
/// prior; truth[t] and measurements[t - 1] belong to step t.
struct Simulation {
    std::vector<Tuple> truth;
    std::vector<MeasurementSet> measurements;
};

Simulation simulate(const ScenarioConfig& config);

/// One filter step summary.
struct RunRecord {
    std::size_t step = 0;
    MeasurementSet measurements;
    double log_evidence = 0.0;
    std::vector<double> intensity;
    std::vector<double> cardinality;
    std::size_t map_cardinality = 0;
};

enum class RunStatus { ok, zero_evidence, truncation_overflow };

struct RunResult {
    Simulation simulation;
    std::vector<RunRecord> records;
    RunStatus status = RunStatus::ok;
    /// Step at which the recursion stopped, if it did.
    std::optional<std::size_t> failed_step;
    std::string error;
};

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<bool> log_domain;
};

/// Alternates prediction and the clutter-aware partition-sum update over the
/// simulated measurements. ZeroEvidence and TruncationOverflow stop the run
/// and are reported in the result rather than thrown.
RunResult run(const ScenarioConfig& config, const RunOptions& options = {});

/// CSV columns: step, log_evidence, intensity_<label>..., card_0..card_N.
std::string records_csv(const ScenarioConfig& config, const std::vector<RunRecord>& records);
std::string summary_json(const ScenarioConfig& config, const RunResult& result, std::uint64_t seed);

/// Writes run.csv and summary.json into `out_dir`.
void write_run_outputs(const std::filesystem::path& out_dir, const ScenarioConfig& config, const RunResult& result,
                       std::uint64_t seed);

}  // namespace pgfl
