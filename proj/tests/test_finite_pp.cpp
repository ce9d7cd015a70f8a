#include "pgfl/errors.hpp"
#include "pgfl/finite_pp.hpp"
#include "pgfl/serialization.hpp"
#include "pgfl/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pgfl;

namespace {

const FiniteSpace kSpace = FiniteSpace::indexed(3);
const TestFunction kMu({0.05, 0.1, 0.05});

}  // namespace

TEST(FiniteSpace, Tuples) {
    EXPECT_EQ(tuple_count(3, 0), 1u);
    EXPECT_EQ(tuple_count(3, 4), 81u);
    const Tuple t{2, 0, 1};
    EXPECT_EQ(encode_tuple(t, 3), 2u * 9 + 0 * 3 + 1);
    EXPECT_EQ(decode_tuple(encode_tuple(t, 3), 3, 3), t);
    EXPECT_THROW(tuple_count(2, 40), std::length_error);
    EXPECT_EQ(kSpace.index_of("s1"), 1u);
    EXPECT_FALSE(kSpace.find("nope"));
    EXPECT_THROW(FiniteSpace({"a", "a"}), std::invalid_argument);
}

TEST(Density, ConstructorValidates) {
    EXPECT_THROW(MultiObjectDensity(kSpace, {{1.0}, {0.5, 0.5}}), std::invalid_argument);
    EXPECT_THROW(MultiObjectDensity(kSpace, {{NAN}}), std::invalid_argument);
    EXPECT_THROW(MultiObjectDensity(kSpace, std::vector<std::vector<double>>{}), std::invalid_argument);
}

TEST(Poisson, PgflIsExponential) {
    const auto p = poisson(kSpace, {kMu, 1e-13});
    const TestFunction psi({0.3, 0.9, 0.1});
    const double lambda = kMu.sum();
    EXPECT_NEAR(evaluate(p, psi), std::exp(integrate(kMu, psi) - lambda), 1e-13);
    EXPECT_NEAR(p.total_mass() + p.truncation_mass(), 1.0, 1e-15);
    EXPECT_LT(p.truncation_mass(), 1e-13);
}

TEST(Poisson, JanossyAndMoments) {
    // Third moments read the tail from order n_max - 3 on.
    const auto p = poisson(kSpace, {kMu, 1e-13}, 12);
    const Tuple t{0, 2, 2};
    const double prod = kMu[0] * kMu[2] * kMu[2];
    EXPECT_NEAR(janossy(p, t), std::exp(-kMu.sum()) * prod, 1e-15);
    EXPECT_NEAR(moment(p, t), prod, 1e-13);
    const auto m1 = intensity(p);
    for (std::size_t x = 0; x < 3; ++x) EXPECT_NEAR(m1[x], kMu[x], 1e-12);
}

TEST(Poisson, FixedOrderRecordsTail) {
    const auto p = poisson(kSpace, {kMu, 1e-12}, 2);
    EXPECT_EQ(p.n_max(), 2u);
    EXPECT_NEAR(p.truncation_mass(), poisson_tail(kMu.sum(), 2), 1e-16);
    EXPECT_NEAR(p.total_mass() + p.truncation_mass(), 1.0, 1e-15);
    EXPECT_THROW(poisson(kSpace, {TestFunction({5.0, 5.0, 5.0}), 1e-15}), std::invalid_argument);
}

TEST(Bernoulli, Structure) {
    const TestFunction f({0.5, 0.25, 0.25});
    const auto b = bernoulli(kSpace, 0.4, f);
    EXPECT_EQ(b.n_max(), 1u);
    EXPECT_DOUBLE_EQ(b.tensor(0)[0], 0.6);
    EXPECT_DOUBLE_EQ(b.tensor(1)[0], 0.2);
    EXPECT_DOUBLE_EQ(evaluate(b, TestFunction::constant(3, 1.0)), 1.0);
    EXPECT_THROW(bernoulli(kSpace, 1.5, f), std::invalid_argument);
}

TEST(Differential, CoefficientShift) {
    Rng rng(1);
    const auto p = random_density(kSpace, 3, rng);
    // Differentiating at a point and reading the Janossy density agrees with the tensor entry.
    const Tuple t{1, 0};
    EXPECT_NEAR(janossy(p, t), p.entry(t), 1e-15);
    const auto d0 = differentiate(p, std::size_t{2});
    EXPECT_EQ(d0.n_max(), 2u);
    EXPECT_NEAR(d0.entry(Tuple{1}), p.entry(Tuple{2, 1}), 1e-15);
    // Linearity in the increment.
    const TestFunction a({0.1, -0.2, 0.3});
    const TestFunction b({0.4, 0.0, -0.1});
    const TestFunction at({0.5, 0.5, 0.5});
    TestFunction ab({0.5, -0.2, 0.2});
    const TestFunction one[] = {ab};
    const TestFunction ia[] = {a};
    const TestFunction ib[] = {b};
    EXPECT_NEAR(differential(p, at, one), differential(p, at, ia) + differential(p, at, ib), 1e-14);
}

TEST(Differential, BeyondOrderIsZero) {
    const auto b = bernoulli(kSpace, 0.4, TestFunction({1.0, 0.0, 0.0}));
    const TestFunction incs[] = {TestFunction::one_hot(3, 0), TestFunction::one_hot(3, 0)};
    EXPECT_EQ(differential(b, TestFunction::constant(3, 1.0), incs), 0.0);
}

TEST(Superpose, PoissonPlusPoissonIsPoisson) {
    const TestFunction mu2({0.1, 0.1, 0.2});
    const auto a = poisson(kSpace, {kMu, 0.0}, 7);
    const auto b = poisson(kSpace, {mu2, 0.0}, 7);
    const auto s = superpose(a, b);
    // Truncated operands cap the order.
    EXPECT_EQ(s.n_max(), 7u);
    TestFunction sum({0.15, 0.2, 0.25});
    const auto direct = poisson(kSpace, {sum, 0.0}, 7);
    EXPECT_LT(max_abs_difference(s, direct), 1e-14);
}

TEST(Superpose, ExactOperandsKeepFullOrder) {
    const auto a = bernoulli(kSpace, 0.3, TestFunction({1.0, 0.0, 0.0}));
    const auto b = bernoulli(kSpace, 0.5, TestFunction({0.0, 1.0, 0.0}));
    const auto s = superpose(a, b);
    EXPECT_EQ(s.n_max(), 2u);
    EXPECT_NEAR(s.entry(Tuple{0, 1}), 0.15, 1e-15);
    EXPECT_NEAR(s.entry(Tuple{1, 0}), 0.15, 1e-15);
    const auto u = superpose(MultiObjectDensity::unit(kSpace), a);
    EXPECT_LT(max_abs_difference(u, a), 1e-16);
    EXPECT_EQ(superpose(a, b, 1).n_max(), 1u);
}

TEST(ScalarProduct, MatchesDefinition) {
    const auto a = bernoulli(kSpace, 0.3, TestFunction({0.5, 0.5, 0.0}));
    const auto b = bernoulli(kSpace, 0.6, TestFunction({0.0, 1.0, 0.0}));
    EXPECT_NEAR(scalar_product(a, b), 0.7 * 0.4 + 0.15 * 0.6, 1e-15);
}

TEST(Density, SymmetryAndCardinality) {
    Rng rng(2);
    const auto p = random_density(kSpace, 3, rng);
    EXPECT_EQ(p.symmetry_defect(), 0.0);
    double s = 0.0;
    for (double c : p.cardinality_distribution()) s += c;
    EXPECT_NEAR(s, 1.0, 1e-15);
    EXPECT_THROW(linear_combination(1.0, p, 1.0, MultiObjectDensity::unit(FiniteSpace::indexed(2))), SpaceMismatch);
}

TEST(Serialization, RoundTrip) {
    Rng rng(3);
    const auto p = random_density(kSpace, 2, rng);
    const auto j = to_json(p);
    const auto q = density_from_json(j);
    EXPECT_EQ(p.tensors(), q.tensors());
    EXPECT_EQ(q.space().labels(), kSpace.labels());
    EXPECT_THROW(density_from_json(nlohmann::json::object()), ConfigError);
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}
