#pragma once

#include "pgfl/finite_pp.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace pgfl {

using IncrementList = std::vector<TestFunction>;

/// Opaque real functional of a test function, used as a numeric oracle.
struct BlackBoxFunctional {
    std::size_t dim = 0;
    std::function<double(const TestFunction&)> eval;
};

/// Real functional together with its exact Gateaux differentials
/// delta^k f(at; increments). k = 0 is the value itself.
struct ExactFunctional {
    std::size_t dim = 0;
    std::function<double(const TestFunction& at, std::span<const TestFunction> increments)> variation;

    double operator()(const TestFunction& at) const { return variation(at, {}); }
    [[nodiscard]] BlackBoxFunctional black_box() const;
};

/// Function-valued functional y -> g(y) with exact differentials; g(y) lives
/// on a space of `out_dim` points, y on a space of `in_dim` points.
struct ExactMapping {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    std::function<TestFunction(const TestFunction& y, std::span<const TestFunction> increments)> variation;

    TestFunction operator()(const TestFunction& y) const { return variation(y, {}); }
};

/// Generating functional backed by stored coefficient tensors.
ExactFunctional tensor_functional(MultiObjectDensity p);

/// exp(mu[phi - 1]) with differentials exp(mu[phi - 1]) prod mu[xi_i].
ExactFunctional poisson_functional(TestFunction mu);

/// Pointwise product of two functionals on the same space (for Leibniz checks).
BlackBoxFunctional product_black_box(const ExactFunctional& f, const ExactFunctional& g);

/// g(y) = y.
ExactMapping identity_mapping(std::size_t d);

/// g(y)(x) = G_x(y) for one coefficient functional G_x per output point.
ExactMapping tensor_mapping(std::vector<MultiObjectDensity> per_point);

/// delta^n F(psi; eta_1..eta_n) by mixed central differences with Richardson
/// extrapolation over four halvings of the base step. Exact to round-off for
/// polynomial functionals of total degree <= n + 7. At most four increments.
double numeric_differential(const BlackBoxFunctional& f, const TestFunction& psi,
                            std::span<const TestFunction> increments);

/// Base step of numeric_differential.
inline constexpr double kNumericStep = 0.25;

/// Higher-order chain rule: the variation of f(g(y)) as a sum over partitions
/// of the increments, each block contributing the matching variation of g.
/// `max_block` prunes partitions whose blocks are larger.
double faa_di_bruno(const ExactFunctional& outer, const ExactMapping& inner, const TestFunction& y,
                    std::span<const TestFunction> increments, std::optional<std::size_t> max_block = std::nullopt);

/// Product rule: sum over subsets Phi of the increments of
/// delta^|Phi| f(y; Phi) * delta^(n-|Phi|) g(y; rest).
double leibniz(const ExactFunctional& f, const ExactFunctional& g, const TestFunction& y,
               std::span<const TestFunction> increments);

/// Increment of an outer variation that may depend on y. Either a fixed
/// function or the variation delta^k g(y; directions) of the inner mapping.
class InnerIncrement {
public:
    static InnerIncrement fixed(TestFunction value);
    static InnerIncrement inner_variation(IncrementList directions);

    [[nodiscard]] TestFunction value(const ExactMapping& g, const TestFunction& y) const;
    /// First variation of the increment with respect to y along eta.
    [[nodiscard]] TestFunction variation(const ExactMapping& g, const TestFunction& y, const TestFunction& eta) const;

private:
    std::optional<TestFunction> fixed_;
    IncrementList directions_;
};

/// delta( delta^n f(g(y); xi_1(y)..xi_n(y)); eta ) expanded as
///   delta^(n+1) f(g(y); xi_1..xi_n, delta g(y; eta))
///   + sum_w delta^n f(g(y); xi_1..delta xi_w(y; eta)..xi_n).
double differential_of_variation(const ExactFunctional& f, const ExactMapping& g, const TestFunction& y,
                                 std::span<const InnerIncrement> increments, const TestFunction& eta);

}  // namespace pgfl
