#pragma once

#include "pgfl/finite_space.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace pgfl {

/// Point process (or generating functional) on a finite space, stored as its
/// coefficient tensors p_0, p_1(x), ..., p_N(x_1..x_N) over ordered tuples.
///
///   G(psi) = sum_n 1/n! sum_{x_1..x_n} p_n(x_1..x_n) psi(x_1)...psi(x_n)
///
/// For probability densities the tensors are Janossy densities. The same type
/// carries unnormalized functionals (numerators, differentials) where entries
/// may be any finite real. `truncation_mass` records coefficient mass known to
/// be missing above `n_max`; it is zero when the representation is exact.
/// Values are immutable once built.
class MultiObjectDensity {
public:
    /// The zero functional of order `n_max`.
    MultiObjectDensity(FiniteSpace space, std::size_t n_max);
    /// Takes ownership of row-major tensors; tensors[n] must hold d^n entries.
    MultiObjectDensity(FiniteSpace space, std::vector<std::vector<double>> tensors, double truncation_mass = 0.0);

    /// Builds tensors entry by entry from `fn(tuple)`.
    static MultiObjectDensity tabulate(FiniteSpace space, std::size_t n_max,
                                       const std::function<double(std::span<const std::size_t>)>& fn,
                                       double truncation_mass = 0.0);

    /// The constant functional 1: the deterministic empty process.
    static MultiObjectDensity unit(FiniteSpace space);

    [[nodiscard]] const FiniteSpace& space() const { return space_; }
    [[nodiscard]] std::size_t dim() const { return space_.size(); }
    [[nodiscard]] std::size_t n_max() const { return tensors_.size() - 1; }
    [[nodiscard]] std::span<const double> tensor(std::size_t n) const { return tensors_.at(n); }
    [[nodiscard]] const std::vector<std::vector<double>>& tensors() const { return tensors_; }
    [[nodiscard]] double entry(std::span<const std::size_t> tuple) const;
    [[nodiscard]] double truncation_mass() const { return truncation_mass_; }
    [[nodiscard]] bool is_exact() const { return truncation_mass_ == 0.0; }

    /// (1/n!) sum over n-tuples of p_n: the cardinality probability for densities.
    [[nodiscard]] double cardinality_mass(std::size_t n) const;
    [[nodiscard]] std::vector<double> cardinality_distribution() const;
    /// sum_n cardinality_mass(n).
    [[nodiscard]] double total_mass() const;

    /// Largest |p_n(x) - p_n(sigma x)| over all tuples and adjacent transpositions.
    [[nodiscard]] double symmetry_defect() const;
    [[nodiscard]] bool all_nonnegative() const;

    /// Zero-padded or truncated copy; truncation adds the dropped mass.
    [[nodiscard]] MultiObjectDensity with_n_max(std::size_t n_max) const;
    [[nodiscard]] MultiObjectDensity scaled(double c) const;

private:
    FiniteSpace space_;
    std::vector<std::vector<double>> tensors_;
    double truncation_mass_ = 0.0;
};

/// a*P + b*Q, zero-padding the shorter operand.
MultiObjectDensity linear_combination(double a, const MultiObjectDensity& p, double b, const MultiObjectDensity& q);

/// Largest elementwise difference, zero-padding the shorter operand.
double max_abs_difference(const MultiObjectDensity& p, const MultiObjectDensity& q);

/// G(psi).
double evaluate(const MultiObjectDensity& p, const TestFunction& psi);

/// First variation at a Dirac increment: coefficients shift by one order,
///   p'_n(x_1..x_n) = p_{n+1}(x, x_1..x_n).
/// For n_max = 0 the result is the zero functional.
MultiObjectDensity differentiate(const MultiObjectDensity& p, std::size_t point);

/// First variation along an arbitrary increment:
///   p'_n(x_1..x_n) = sum_x eta(x) p_{n+1}(x, x_1..x_n).
MultiObjectDensity differentiate(const MultiObjectDensity& p, const TestFunction& direction);

/// delta^k G(at; increments) through the coefficient-shift path.
double differential(const MultiObjectDensity& p, const TestFunction& at, std::span<const TestFunction> increments);

/// Janossy value: k-th variation at the Dirac increments, evaluated at psi = 0.
double janossy(const MultiObjectDensity& p, std::span<const std::size_t> tuple);
/// Factorial moment density: k-th variation at the Dirac increments, evaluated at psi = 1.
double moment(const MultiObjectDensity& p, std::span<const std::size_t> tuple);
/// First factorial moment density at every point.
std::vector<double> intensity(const MultiObjectDensity& p);

/// <A, B> = sum_n 1/n! sum_tuples a_n b_n.
double scalar_product(const MultiObjectDensity& a, const MultiObjectDensity& b);

struct PoissonSpec {
    TestFunction intensity;
    double tail_tol = 1e-12;
};

/// Hard cap for the automatically chosen Poisson truncation order.
inline constexpr std::size_t kPoissonMaxOrder = 16;

/// Probability that a Poisson(lambda) count exceeds n.
double poisson_tail(double lambda, std::size_t n);

/// Poisson process p_n = exp(-lambda) prod mu(x_i). Without `n_max` the order
/// is the smallest N whose tail mass is below `tail_tol`.
MultiObjectDensity poisson(const FiniteSpace& space, const PoissonSpec& spec,
                           std::optional<std::size_t> n_max = std::nullopt);

/// Bernoulli process: empty with 1-q, one point drawn from f with q.
MultiObjectDensity bernoulli(const FiniteSpace& space, double q, const TestFunction& f);

/// Coefficients of the product of two generating functionals, i.e. the
/// superposition of independent processes:
///   p_n(x) = sum over subsets S of positions p1_|S|(x_S) p2_{n-|S|}(x_{~S}).
/// The result keeps every order that is exactly determined by the operands:
/// an operand with recorded truncation caps the order at its n_max; two exact
/// operands give order n1 + n2. `n_max_cap` truncates further.
MultiObjectDensity superpose(const MultiObjectDensity& a, const MultiObjectDensity& b,
                             std::optional<std::size_t> n_max_cap = std::nullopt);

}  // namespace pgfl
