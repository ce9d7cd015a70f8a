#pragma once

#include "pgfl/bayes.hpp"
#include "pgfl/simulate.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pgfl {

enum class VerifyLevel { fast, full };

struct VerifyOptions {
    VerifyLevel level = VerifyLevel::fast;
    std::uint64_t seed = 20240611;
    /// Instances per randomized sweep; 0 picks the level default.
    std::size_t instances = 0;
};

/// Outcome of one oracle comparison. `criterion` groups checks for the
/// acceptance report.
struct CheckResult {
    int criterion = 0;
    std::string name;
    double tolerance = 0.0;
    double max_error = 0.0;
    std::size_t instances = 0;
    std::size_t failures = 0;
    double seconds = 0.0;
    std::string detail;

    [[nodiscard]] bool passed() const { return failures == 0 && max_error <= tolerance; }
};

struct SuiteReport {
    std::vector<CheckResult> checks;
    double seconds = 0.0;

    [[nodiscard]] bool passed() const;
};

// Random instance builders shared with the tests.

/// Symmetric nonnegative tensors with entries in [0, 1); about `zero_fraction`
/// of sorted entries are exactly zero. Normalized to total mass 1 unless
/// `normalize` is false.
MultiObjectDensity random_density(const FiniteSpace& space, std::size_t n_max, Rng& rng, bool normalize = true,
                                  double zero_fraction = 0.15);
TestFunction random_function(std::size_t d, Rng& rng, double lo, double hi);
ObservationKernel random_kernel(const FiniteSpace& states, const FiniteSpace& observations, std::size_t m_max,
                                Rng& rng);
MeasurementSet random_measurements(std::size_t dz, std::size_t m, Rng& rng);
/// Fisher-Yates shuffle driven by `rng`.
MeasurementSet shuffled(const MeasurementSet& z, Rng& rng);

// Oracle checks; each runs a randomized sweep.
std::vector<CheckResult> check_partition_update(const VerifyOptions& options);
std::vector<CheckResult> check_poisson_closed_forms(const VerifyOptions& options);
CheckResult check_phd_recovery(const VerifyOptions& options);
std::vector<CheckResult> check_functional_calculus(const VerifyOptions& options);
std::vector<CheckResult> check_prediction(const VerifyOptions& options);
CheckResult check_large_update(const VerifyOptions& options);

SuiteReport run_suite(const VerifyOptions& options);
void print_report(std::ostream& out, const SuiteReport& report);

}  // namespace pgfl
