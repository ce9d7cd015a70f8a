#pragma once

#include "pgfl/finite_pp.hpp"

#include <cstddef>
#include <vector>

namespace pgfl {

/// Multi-object Markov transition as explicit tables
///   p_{M,n|m}(x_1..x_n | y_1..y_m),  n, m <= n_max,
/// stored per (n, m) as a d^n x d^m row-major matrix (x major).
class TransitionModel {
public:
    /// `tables[n][m]` holds d^n * d^m entries. `dropped[m][y]` is the mass each
    /// source tuple sends beyond n_max (zero when omitted).
    TransitionModel(FiniteSpace space, std::size_t n_max, std::vector<std::vector<std::vector<double>>> tables,
                    std::vector<std::vector<double>> dropped = {});

    /// Every object stays where it is; p_{M,n|n}(x|y) counts the permutations
    /// taking y to x.
    static TransitionModel identity(const FiniteSpace& space, std::size_t n_max);

    [[nodiscard]] const FiniteSpace& space() const { return space_; }
    [[nodiscard]] std::size_t n_max() const { return n_max_; }
    [[nodiscard]] double probability(std::span<const std::size_t> to, std::span<const std::size_t> from) const;
    /// Mass the source tuple loses to cardinalities above n_max.
    [[nodiscard]] double dropped(std::span<const std::size_t> from) const;

    /// y -> p_{M,n|.}(x | y) as a coefficient functional over source tuples.
    [[nodiscard]] MultiObjectDensity source_functional(std::span<const std::size_t> to) const;

    /// Largest |sum_n 1/n! sum_x p_{M,n|m}(x|y) + dropped(y) - 1| over sources.
    [[nodiscard]] double normalization_defect() const;

private:
    FiniteSpace space_;
    std::size_t n_max_;
    std::vector<std::vector<std::vector<double>>> tables_;
    std::vector<std::vector<double>> dropped_;
};

/// Independent survival/motion per object plus an independent birth process.
struct MultiplicativeSpec {
    /// p_S(y).
    std::vector<double> survival;
    /// motion[y][x] = f(x | y); each row sums to one.
    std::vector<std::vector<double>> motion;
    MultiObjectDensity birth;
};

/// Expands a multiplicative spec into explicit tables by enumerating which
/// source objects survive and which target slots they occupy; the remaining
/// slots are births. Throws TruncationOverflow when the birth process itself
/// puts more than `tol` mass above n_max.
TransitionModel build_multiplicative(const MultiplicativeSpec& spec, std::size_t n_max, double tol = 1e-9);

/// Chapman-Kolmogorov step: each predicted tensor entry is the scalar product
/// of the transition's source functional with the posterior. Throws
/// TruncationOverflow when the mass sent beyond n_max exceeds `tol`.
MultiObjectDensity predict(const MultiObjectDensity& posterior, const TransitionModel& model, double tol = 1e-9);

}  // namespace pgfl
