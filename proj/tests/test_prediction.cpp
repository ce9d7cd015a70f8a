#include "pgfl/errors.hpp"
#include "pgfl/prediction.hpp"
#include "pgfl/verify.hpp"

#include <gtest/gtest.h>

using namespace pgfl;

namespace {

const FiniteSpace kSpace = FiniteSpace::indexed(2);

MultiplicativeSpec simple_spec() {
    return {{0.9, 0.5}, {{0.7, 0.3}, {0.4, 0.6}}, bernoulli(kSpace, 0.2, TestFunction({0.25, 0.75}))};
}

}  // namespace

TEST(Transition, IdentityCountsPermutations) {
    const auto id = TransitionModel::identity(kSpace, 3);
    EXPECT_DOUBLE_EQ(id.probability(Tuple{0, 1}, Tuple{1, 0}), 1.0);
    EXPECT_DOUBLE_EQ(id.probability(Tuple{0, 0}, Tuple{0, 0}), 2.0);
    EXPECT_DOUBLE_EQ(id.probability(Tuple{0, 0, 0}, Tuple{0, 0, 0}), 6.0);
    EXPECT_DOUBLE_EQ(id.probability(Tuple{0, 1}, Tuple{0, 0}), 0.0);
    EXPECT_DOUBLE_EQ(id.probability(Tuple{0}, Tuple{0, 0}), 0.0);
    EXPECT_LT(id.normalization_defect(), 1e-15);
}

TEST(Transition, IdentityPredictionIsNoOp) {
    Rng rng(20);
    const auto p = random_density(kSpace, 3, rng);
    const auto q = predict(p, TransitionModel::identity(kSpace, 3));
    EXPECT_LT(max_abs_difference(p, q), 1e-15);
}

TEST(Transition, SingleObjectByHand) {
    const auto model = build_multiplicative(simple_spec(), 3);
    // One object at 0: dies and no birth, or survives to x with no birth, etc.
    EXPECT_NEAR(model.probability(Tuple{}, Tuple{0}), 0.1 * 0.8, 1e-16);
    EXPECT_NEAR(model.probability(Tuple{1}, Tuple{0}), 0.9 * 0.3 * 0.8 + 0.1 * 0.2 * 0.75, 1e-16);
    EXPECT_NEAR(model.probability(Tuple{0, 1}, Tuple{0}), 0.9 * 0.7 * 0.2 * 0.75 + 0.9 * 0.3 * 0.2 * 0.25, 1e-16);
    EXPECT_NEAR(model.probability(Tuple{1, 0}, Tuple{0}), model.probability(Tuple{0, 1}, Tuple{0}), 0.0);
    EXPECT_LT(model.normalization_defect(), 1e-15);
}

TEST(Transition, DroppedMassIsRecorded) {
    const auto model = build_multiplicative(simple_spec(), 2);
    // Two survivors plus a birth exceed n_max = 2.
    const double expected = 0.9 * 0.5 * 0.2;
    EXPECT_NEAR(model.dropped(Tuple{0, 1}), expected, 1e-15);
    EXPECT_NEAR(model.dropped(Tuple{0}), 0.0, 1e-16);
}

TEST(Transition, BirthBeyondOrderThrows) {
    auto spec = simple_spec();
    spec.birth = poisson(kSpace, {TestFunction({0.5, 0.5}), 1e-14});
    EXPECT_THROW(build_multiplicative(spec, 2), TruncationOverflow);
    EXPECT_NO_THROW(build_multiplicative(spec, 2, 1.0));
}

TEST(Transition, InvalidSpec) {
    auto spec = simple_spec();
    spec.motion[0] = {0.5, 0.4};
    EXPECT_THROW(build_multiplicative(spec, 2), std::invalid_argument);
    spec = simple_spec();
    spec.survival[1] = 1.5;
    EXPECT_THROW(build_multiplicative(spec, 2), std::invalid_argument);
}

TEST(Predict, PreservesMassAndMovesIntensity) {
    const auto p = bernoulli(kSpace, 1.0, TestFunction({1.0, 0.0}));
    const auto q = predict(p, build_multiplicative(simple_spec(), 2));
    EXPECT_NEAR(q.total_mass(), 1.0, 1e-15);
    const auto m1 = intensity(q);
    EXPECT_NEAR(m1[0], 0.9 * 0.7 + 0.2 * 0.25, 1e-15);
    EXPECT_NEAR(m1[1], 0.9 * 0.3 + 0.2 * 0.75, 1e-15);
}

TEST(Predict, Overflow) {
    Rng rng(21);
    const auto p = random_density(kSpace, 2, rng);
    EXPECT_THROW(predict(p, build_multiplicative(simple_spec(), 2)), TruncationOverflow);
    EXPECT_THROW(predict(p, build_multiplicative(simple_spec(), 1)), std::invalid_argument);
    const auto q = predict(p, build_multiplicative(simple_spec(), 2), 1.0);
    EXPECT_GT(q.truncation_mass(), 0.0);
    EXPECT_NEAR(q.total_mass() + q.truncation_mass(), 1.0, 1e-15);
}
