#include "pgfl/functional_calculus.hpp"

#include "pgfl/combinatorics.hpp"
#include "pgfl/errors.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pgfl {

namespace {

void require_dim(const TestFunction& f, std::size_t dim, const char* what) {
    if (f.size() != dim) throw SpaceMismatch(std::string(what) + ": test function on the wrong space");
}

// Mixed central difference with step h.
double central_difference(const BlackBoxFunctional& f, const TestFunction& psi,
                          std::span<const TestFunction> increments, double h) {
    const std::size_t n = increments.size();
    double total = 0.0;
    TestFunction point(psi.values);
    for (std::uint32_t signs = 0; signs < (1U << n); ++signs) {
        point.values = psi.values;
        double sign = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = (signs >> i) & 1U ? -1.0 : 1.0;
            sign *= s;
            for (std::size_t x = 0; x < point.size(); ++x) point[x] += s * h * increments[i][x];
        }
        const double v = f.eval(point);
        if (!std::isfinite(v)) throw Error("numeric_differential: functional evaluated to a non-finite value");
        total += sign * v;
    }
    return total / std::pow(2.0 * h, static_cast<double>(n));
}

}  // namespace

BlackBoxFunctional ExactFunctional::black_box() const {
    auto var = variation;
    return BlackBoxFunctional{dim, [var](const TestFunction& at) { return var(at, {}); }};
}

ExactFunctional tensor_functional(MultiObjectDensity p) {
    const std::size_t d = p.dim();
    return ExactFunctional{d, [p = std::move(p)](const TestFunction& at, std::span<const TestFunction> incs) {
                               return differential(p, at, incs);
                           }};
}

ExactFunctional poisson_functional(TestFunction mu) {
    const std::size_t d = mu.size();
    return ExactFunctional{d, [mu = std::move(mu)](const TestFunction& at, std::span<const TestFunction> incs) {
                               require_dim(at, mu.size(), "poisson_functional");
                               double exponent = 0.0;
                               for (std::size_t x = 0; x < mu.size(); ++x) exponent += mu[x] * (at[x] - 1.0);
                               double v = std::exp(exponent);
                               for (const auto& inc : incs) v *= integrate(mu, inc);
                               return v;
                           }};
}

BlackBoxFunctional product_black_box(const ExactFunctional& f, const ExactFunctional& g) {
    if (f.dim != g.dim) throw SpaceMismatch("product_black_box: functionals on different spaces");
    return BlackBoxFunctional{f.dim, [f, g](const TestFunction& at) { return f(at) * g(at); }};
}

ExactMapping identity_mapping(std::size_t d) {
    return ExactMapping{d, d, [d](const TestFunction& y, std::span<const TestFunction> incs) {
                            require_dim(y, d, "identity_mapping");
                            if (incs.empty()) return y;
                            if (incs.size() == 1) return incs[0];
                            return TestFunction::constant(d, 0.0);
                        }};
}

ExactMapping tensor_mapping(std::vector<MultiObjectDensity> per_point) {
    if (per_point.empty()) throw std::invalid_argument("tensor_mapping: no output points");
    const std::size_t in_dim = per_point.front().dim();
    for (const auto& p : per_point) require_same_space(p.space(), per_point.front().space(), "tensor_mapping");
    const std::size_t out_dim = per_point.size();
    return ExactMapping{in_dim, out_dim,
                        [maps = std::move(per_point)](const TestFunction& y, std::span<const TestFunction> incs) {
                            std::vector<double> out(maps.size());
                            for (std::size_t x = 0; x < maps.size(); ++x) out[x] = differential(maps[x], y, incs);
                            return TestFunction(std::move(out));
                        }};
}

double numeric_differential(const BlackBoxFunctional& f, const TestFunction& psi,
                            std::span<const TestFunction> increments) {
    if (increments.size() > 4) throw std::invalid_argument("numeric_differential: at most 4 increments");
    require_dim(psi, f.dim, "numeric_differential");
    for (const auto& inc : increments) require_dim(inc, f.dim, "numeric_differential");
    if (increments.empty()) {
        const double v = f.eval(psi);
        if (!std::isfinite(v)) throw Error("numeric_differential: functional evaluated to a non-finite value");
        return v;
    }
    constexpr std::size_t kLevels = 4;
    std::array<std::array<double, kLevels>, kLevels> r{};
    double h = kNumericStep;
    for (std::size_t i = 0; i < kLevels; ++i, h /= 2.0) {
        r[i][0] = central_difference(f, psi, increments, h);
        double factor = 1.0;
        for (std::size_t j = 1; j <= i; ++j) {
            factor *= 4.0;
            r[i][j] = r[i][j - 1] + (r[i][j - 1] - r[i - 1][j - 1]) / (factor - 1.0);
        }
    }
    return r[kLevels - 1][kLevels - 1];
}

double faa_di_bruno(const ExactFunctional& outer, const ExactMapping& inner, const TestFunction& y,
                    std::span<const TestFunction> increments, std::optional<std::size_t> max_block) {
    if (increments.size() > 6) throw std::invalid_argument("faa_di_bruno: at most 6 increments");
    if (outer.dim != inner.out_dim) throw SpaceMismatch("faa_di_bruno: inner output space differs from outer domain");
    const TestFunction gy = inner(y);
    double total = 0.0;
    IncrementList block_incs;
    IncrementList xis;
    auto stream = partitions(increments.size(), max_block);
    while (stream.next()) {
        xis.clear();
        for (const auto& block : stream.current().blocks) {
            block_incs.clear();
            for (auto i : block) block_incs.push_back(increments[i]);
            xis.push_back(inner.variation(y, block_incs));
        }
        total += outer.variation(gy, xis);
    }
    return total;
}

double leibniz(const ExactFunctional& f, const ExactFunctional& g, const TestFunction& y,
               std::span<const TestFunction> increments) {
    if (increments.size() > 6) throw std::invalid_argument("leibniz: at most 6 increments");
    if (f.dim != g.dim) throw SpaceMismatch("leibniz: functionals on different spaces");
    double total = 0.0;
    IncrementList kept;
    IncrementList rest;
    auto stream = subsets(increments.size());
    while (stream.next()) {
        const auto& split = stream.current();
        kept.clear();
        rest.clear();
        for (auto i : split.kept) kept.push_back(increments[i]);
        for (auto i : split.dropped) rest.push_back(increments[i]);
        total += f.variation(y, kept) * g.variation(y, rest);
    }
    return total;
}

InnerIncrement InnerIncrement::fixed(TestFunction value) {
    InnerIncrement inc;
    inc.fixed_ = std::move(value);
    return inc;
}

InnerIncrement InnerIncrement::inner_variation(IncrementList directions) {
    InnerIncrement inc;
    inc.directions_ = std::move(directions);
    return inc;
}

TestFunction InnerIncrement::value(const ExactMapping& g, const TestFunction& y) const {
    if (fixed_) return *fixed_;
    return g.variation(y, directions_);
}

TestFunction InnerIncrement::variation(const ExactMapping& g, const TestFunction& y, const TestFunction& eta) const {
    if (fixed_) return TestFunction::constant(fixed_->size(), 0.0);
    IncrementList dirs = directions_;
    dirs.push_back(eta);
    return g.variation(y, dirs);
}

double differential_of_variation(const ExactFunctional& f, const ExactMapping& g, const TestFunction& y,
                                 std::span<const InnerIncrement> increments, const TestFunction& eta) {
    if (increments.size() > 4) throw std::invalid_argument("differential_of_variation: at most 4 increments");
    if (f.dim != g.out_dim) throw SpaceMismatch("differential_of_variation: inner output space differs from outer domain");
    const TestFunction gy = g(y);
    IncrementList xis;
    for (const auto& inc : increments) xis.push_back(inc.value(g, y));

    IncrementList appended = xis;
    appended.push_back(g.variation(y, std::span<const TestFunction>(&eta, 1)));
    double total = f.variation(gy, appended);

    for (std::size_t w = 0; w < increments.size(); ++w) {
        IncrementList replaced = xis;
        replaced[w] = increments[w].variation(g, y, eta);
        total += f.variation(gy, replaced);
    }
    return total;
}

}  // namespace pgfl
