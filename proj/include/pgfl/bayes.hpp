#pragma once

#include "pgfl/finite_pp.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace pgfl {

/// Per-object measurement model: for every state x, the Janossy family
/// r_{m|1}(z_1..z_m | x), m = 0..m_max, of the measurement group x generates.
class ObservationKernel {
public:
    /// One normalized, symmetric density over `observations` per state.
    ObservationKernel(FiniteSpace states, FiniteSpace observations, std::vector<MultiObjectDensity> per_state);

    /// m_max = 1 kernel: missed with 1 - p_D(x), otherwise one measurement
    /// drawn from g(.|x). `likelihood[x][z]` = g(z|x), rows normalized.
    static ObservationKernel bernoulli_detection(FiniteSpace states, FiniteSpace observations,
                                                 const std::vector<double>& detection,
                                                 const std::vector<std::vector<double>>& likelihood);

    [[nodiscard]] const FiniteSpace& states() const { return states_; }
    [[nodiscard]] const FiniteSpace& observations() const { return observations_; }
    [[nodiscard]] std::size_t m_max() const { return m_max_; }
    [[nodiscard]] const MultiObjectDensity& conditional(std::size_t x) const { return per_state_.at(x); }

    /// r_{|z|}(z | x); zero when |z| > m_max.
    [[nodiscard]] double group(std::size_t x, std::span<const std::size_t> z) const;
    /// P_0(x) = r_{0|1}(x) as a function of the state.
    [[nodiscard]] TestFunction missed() const;
    /// x -> r_{|z|}(z | x).
    [[nodiscard]] TestFunction group_function(std::span<const std::size_t> z) const;
    /// Expected number of measurements generated by an object at x.
    [[nodiscard]] double mean_group_size(std::size_t x) const;

private:
    FiniteSpace states_;
    FiniteSpace observations_;
    std::vector<MultiObjectDensity> per_state_;
    std::size_t m_max_ = 0;
};

/// Measurements not generated by any object.
class ClutterProcess {
public:
    explicit ClutterProcess(MultiObjectDensity density);
    /// The deterministic empty process: no clutter ever.
    static ClutterProcess none(const FiniteSpace& observations);

    [[nodiscard]] const MultiObjectDensity& density() const { return density_; }
    /// p_{|S| |0}(S); zero beyond the stored order.
    [[nodiscard]] double group(std::span<const std::size_t> z) const;

private:
    MultiObjectDensity density_;
};

/// Measurement points z_1..z_m; order carries no meaning and repeats are allowed.
struct MeasurementSet {
    std::vector<std::size_t> points;

    [[nodiscard]] std::size_t size() const { return points.size(); }
    /// Sorted copy used for all summations.
    [[nodiscard]] MeasurementSet canonical() const;
};

struct Posterior {
    MultiObjectDensity density;
    /// First factorial moment density M_1 over the state space.
    std::vector<double> intensity;
    /// log of the measurement-set likelihood (normalizing constant).
    double log_evidence = 0.0;
};

struct UpdateOptions {
    /// Skip partitions with blocks larger than the kernel's m_max.
    bool prune_blocks = true;
    /// Accumulate numerators and denominators with log-sum-exp.
    bool log_domain = false;
    /// Allowed mismatch between posterior mass and the evidence.
    double truncation_tol = 1e-9;
};

/// p_{m|n}(Z | x_1..x_n) by enumerating every assignment of each measurement
/// to an object or, when `clutter` is given, to clutter: (n+1)^m terms.
double joint_likelihood(const ObservationKernel& kernel, const ClutterProcess* clutter,
                        std::span<const std::size_t> states, const MeasurementSet& z);

/// Direct Bayes rule on the Janossy tensors, with a brute-force intensity.
/// Serves as the oracle for the partition-sum updates.
Posterior posterior_direct(const MultiObjectDensity& prior, const ObservationKernel& kernel,
                           const ClutterProcess* clutter, const MeasurementSet& z);

/// Update without clutter as a sum over partitions of the measurement set.
Posterior posterior_partition(const MultiObjectDensity& prior, const ObservationKernel& kernel,
                              const MeasurementSet& z, const UpdateOptions& options = {});

/// Posterior intensity from the partition-sum first moment.
std::vector<double> posterior_intensity(const MultiObjectDensity& prior, const ObservationKernel& kernel,
                                        const MeasurementSet& z, const UpdateOptions& options = {});

/// Update with clutter: a sum over subsets W of the measurements (the rest is
/// clutter) and partitions of W.
Posterior posterior_partition_clutter(const MultiObjectDensity& prior, const ObservationKernel& kernel,
                                      const ClutterProcess& clutter, const MeasurementSet& z,
                                      const UpdateOptions& options = {});

std::vector<double> posterior_intensity_clutter(const MultiObjectDensity& prior, const ObservationKernel& kernel,
                                                const ClutterProcess& clutter, const MeasurementSet& z,
                                                const UpdateOptions& options = {});

/// Closed-form update of an untruncated Poisson prior with intensity `mu`.
/// The posterior density is tabulated up to `n_max`; missing mass is recorded.
Posterior poisson_posterior(const TestFunction& mu, const ObservationKernel& kernel, const MeasurementSet& z,
                            std::size_t n_max, const UpdateOptions& options = {});

std::vector<double> poisson_posterior_intensity(const TestFunction& mu, const ObservationKernel& kernel,
                                                const MeasurementSet& z, const UpdateOptions& options = {});

/// Posterior generating functional of the Poisson closed form evaluated at eta.
double poisson_posterior_pgfl(const TestFunction& mu, const ObservationKernel& kernel, const MeasurementSet& z,
                              const TestFunction& eta, const UpdateOptions& options = {});

/// Number of partition-sum terms an update evaluates (for diagnostics).
std::size_t update_term_count(const ObservationKernel& kernel, const ClutterProcess* clutter,
                              const MeasurementSet& z, const UpdateOptions& options = {});

}  // namespace pgfl
