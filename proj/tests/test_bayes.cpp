#include "pgfl/bayes.hpp"
#include "pgfl/errors.hpp"
#include "pgfl/parallel.hpp"
#include "pgfl/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

using namespace pgfl;

namespace {

const FiniteSpace kStates({"x0", "x1"});
const FiniteSpace kObs({"z0", "z1"});

ObservationKernel detection_kernel() {
    return ObservationKernel::bernoulli_detection(kStates, kObs, {0.8, 0.4}, {{0.9, 0.1}, {0.2, 0.8}});
}

}  // namespace

TEST(Update, SingleBernoulliObjectByHand) {
    const auto prior = bernoulli(kStates, 0.5, TestFunction({0.5, 0.5}));
    const MeasurementSet z{{0}};
    const auto post = posterior_partition(prior, detection_kernel(), z);
    // Only the object can explain z0: weights 0.5*0.5*0.8*0.9 and 0.5*0.5*0.4*0.2.
    EXPECT_NEAR(post.density.tensor(0)[0], 0.0, 1e-16);
    EXPECT_NEAR(post.density.entry(Tuple{0}), 0.9, 1e-15);
    EXPECT_NEAR(post.density.entry(Tuple{1}), 0.1, 1e-15);
    EXPECT_NEAR(post.log_evidence, std::log(0.2), 1e-15);
    EXPECT_NEAR(post.intensity[0], 0.9, 1e-15);
    EXPECT_NEAR(post.intensity[1], 0.1, 1e-15);
}

TEST(Update, BernoulliObjectWithPoissonClutterByHand) {
    const auto prior = bernoulli(kStates, 0.5, TestFunction({0.5, 0.5}));
    const TestFunction kappa({0.3, 0.1});
    const ClutterProcess clutter(poisson(kObs, {kappa, 1e-14}, 3));
    const MeasurementSet z{{0}};
    const double e = std::exp(-0.4);
    const double w_empty = 0.5 * e * 0.3;
    const double w0 = 0.25 * (0.2 * e * 0.3 + 0.8 * 0.9 * e);
    const double w1 = 0.25 * (0.6 * e * 0.3 + 0.4 * 0.2 * e);
    const double total = w_empty + w0 + w1;
    const auto post = posterior_partition_clutter(prior, detection_kernel(), clutter, z);
    EXPECT_NEAR(post.density.tensor(0)[0], w_empty / total, 1e-15);
    EXPECT_NEAR(post.density.entry(Tuple{0}), w0 / total, 1e-15);
    EXPECT_NEAR(post.density.entry(Tuple{1}), w1 / total, 1e-15);
    EXPECT_NEAR(post.log_evidence, std::log(total), 1e-14);
}

TEST(Update, EmptyClutterEqualsNoClutter) {
    Rng rng(5);
    const auto prior = random_density(kStates, 3, rng);
    const auto kernel = random_kernel(kStates, kObs, 2, rng);
    const MeasurementSet z{{1, 1}};
    const auto a = posterior_partition(prior, kernel, z);
    const auto b = posterior_partition_clutter(prior, kernel, ClutterProcess::none(kObs), z);
    EXPECT_LT(max_abs_difference(a.density, b.density), 1e-15);
    EXPECT_NEAR(a.log_evidence, b.log_evidence, 1e-15);
}

TEST(Update, ZeroEvidence) {
    const auto prior = bernoulli(kStates, 0.5, TestFunction({0.5, 0.5}));
    // Two measurements cannot come from at most one single-detection object.
    EXPECT_THROW(posterior_partition(prior, detection_kernel(), MeasurementSet{{0, 1}}), ZeroEvidence);
    EXPECT_THROW(posterior_direct(prior, detection_kernel(), nullptr, MeasurementSet{{0, 1}}), ZeroEvidence);
    UpdateOptions logs;
    logs.log_domain = true;
    EXPECT_THROW(posterior_partition(prior, detection_kernel(), MeasurementSet{{0, 1}}, logs), ZeroEvidence);
}

TEST(Update, InvalidMeasurement) {
    const auto prior = bernoulli(kStates, 0.5, TestFunction({0.5, 0.5}));
    EXPECT_THROW(posterior_partition(prior, detection_kernel(), MeasurementSet{{7}}), std::out_of_range);
}

TEST(Update, RepeatedMeasurementsMatchOracle) {
    Rng rng(6);
    const auto prior = random_density(kStates, 4, rng);
    const auto kernel = random_kernel(kStates, kObs, 2, rng);
    const MeasurementSet z{{1, 1, 1}};
    const auto a = posterior_partition(prior, kernel, z);
    const auto b = posterior_direct(prior, kernel, nullptr, z);
    EXPECT_LT(max_abs_difference(a.density, b.density), 1e-14);
}

TEST(Update, LogDomainMatchesLinear) {
    Rng rng(9);
    const auto prior = random_density(kStates, 4, rng);
    const auto kernel = random_kernel(kStates, kObs, 2, rng);
    const ClutterProcess clutter(poisson(kObs, {TestFunction({0.3, 0.2}), 1e-12}, 4));
    const MeasurementSet z{{0, 1, 1, 0}};
    UpdateOptions logs;
    logs.log_domain = true;
    const auto a = posterior_partition_clutter(prior, kernel, clutter, z);
    const auto b = posterior_partition_clutter(prior, kernel, clutter, z, logs);
    EXPECT_LT(max_abs_difference(a.density, b.density), 1e-14);
    EXPECT_NEAR(a.log_evidence, b.log_evidence, 1e-13);
}

TEST(Kernel, Validation) {
    std::vector<MultiObjectDensity> bad = {bernoulli(kObs, 0.5, TestFunction({0.5, 0.5})),
                                           MultiObjectDensity(kObs, {{0.5}, {0.1, 0.1}})};
    EXPECT_THROW(ObservationKernel(kStates, kObs, bad), std::invalid_argument);
    EXPECT_THROW(ObservationKernel(kStates, kObs, {bad[0]}), std::invalid_argument);
    EXPECT_THROW(ObservationKernel::bernoulli_detection(kStates, kObs, {0.5, 0.5}, {{1.0}, {1.0}}),
                 std::invalid_argument);
    const auto k = detection_kernel();
    EXPECT_EQ(k.m_max(), 1u);
    EXPECT_NEAR(k.missed()[1], 0.6, 1e-16);
    EXPECT_NEAR(k.mean_group_size(0), 0.8, 1e-16);
    EXPECT_THROW(ClutterProcess(MultiObjectDensity(kObs, {{0.5}})), std::invalid_argument);
}

TEST(Terms, CountsWithAndWithoutPruning) {
    Rng rng(7);
    const auto kernel = random_kernel(kStates, kObs, 2, rng);
    const MeasurementSet z{{0, 1, 0}};
    UpdateOptions unpruned;
    unpruned.prune_blocks = false;
    EXPECT_EQ(update_term_count(kernel, nullptr, z), 4u);
    EXPECT_EQ(update_term_count(kernel, nullptr, z, unpruned), 5u);
    const ClutterProcess clutter(poisson(kObs, {TestFunction({0.2, 0.2}), 1e-12}, 3));
    EXPECT_EQ(update_term_count(kernel, &clutter, z), 14u);
    EXPECT_EQ(update_term_count(kernel, &clutter, z, unpruned), 15u);
}

TEST(Measurements, CanonicalOrderAndPermutationInvariance) {
    Rng rng(8);
    const auto prior = random_density(kStates, 3, rng);
    const auto kernel = random_kernel(kStates, kObs, 2, rng);
    const MeasurementSet z{{1, 0, 1, 0}};
    EXPECT_EQ(z.canonical().points, (std::vector<std::size_t>{0, 0, 1, 1}));
    const auto a = posterior_partition(prior, kernel, z);
    const auto b = posterior_partition(prior, kernel, MeasurementSet{{0, 1, 1, 0}});
    EXPECT_EQ(a.density.tensors(), b.density.tensors());
    EXPECT_EQ(a.intensity, b.intensity);
}

TEST(Poisson, EmptyMeasurementIntensity) {
    const TestFunction mu({0.4, 0.7});
    const auto m1 = poisson_posterior_intensity(mu, detection_kernel(), {});
    EXPECT_NEAR(m1[0], 0.4 * 0.2, 1e-16);
    EXPECT_NEAR(m1[1], 0.7 * 0.6, 1e-16);
    EXPECT_NEAR(poisson_posterior_pgfl(mu, detection_kernel(), {}, TestFunction({1.0, 1.0})), 1.0, 1e-15);
}

TEST(Parallel, WorkerCapFromEnvironment) {
    ::setenv(kMaxThreadsEnv, "1", 1);
    EXPECT_EQ(worker_count(), 1u);
    ::unsetenv(kMaxThreadsEnv);
    EXPECT_GE(worker_count(), 1u);
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
    ::setenv(kMaxThreadsEnv, "4", 1);
    EXPECT_EQ(worker_count(), 4u);
    EXPECT_THROW(parallel_for(200, [](std::size_t i) {
                     if (i == 150) throw std::runtime_error("boom");
                 }),
                 std::runtime_error);
    ::unsetenv(kMaxThreadsEnv);
}

TEST(Parallel, ThreadCountDoesNotChangeResults) {
    Rng rng(30);
    const auto states = FiniteSpace::indexed(3);
    const auto prior = random_density(states, 4, rng);
    const auto kernel = random_kernel(states, kObs, 2, rng);
    const ClutterProcess clutter(poisson(kObs, {TestFunction({0.3, 0.2}), 1e-12}, 4));
    const MeasurementSet z{{0, 1, 1, 0}};
    ::setenv(kMaxThreadsEnv, "1", 1);
    const auto serial = posterior_partition_clutter(prior, kernel, clutter, z);
    ::setenv(kMaxThreadsEnv, "5", 1);
    const auto threaded = posterior_partition_clutter(prior, kernel, clutter, z);
    ::unsetenv(kMaxThreadsEnv);
    EXPECT_EQ(serial.density.tensors(), threaded.density.tensors());
    EXPECT_EQ(serial.intensity, threaded.intensity);
    EXPECT_EQ(serial.log_evidence, threaded.log_evidence);
}
