#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pgfl {

/// Ordered tuple of point indices into a FiniteSpace.
using Tuple = std::vector<std::size_t>;

/// Labeled finite set of points carrying counting measure.
///
/// Copies share the label storage, so passing spaces by value is cheap.
class FiniteSpace {
public:
    explicit FiniteSpace(std::vector<std::string> labels);

    /// Space with labels `<prefix>0 .. <prefix>(d-1)`.
    static FiniteSpace indexed(std::size_t d, std::string_view prefix = "s");

    [[nodiscard]] std::size_t size() const { return labels_->size(); }
    [[nodiscard]] const std::string& label(std::size_t i) const { return labels_->at(i); }
    [[nodiscard]] const std::vector<std::string>& labels() const { return *labels_; }
    [[nodiscard]] std::optional<std::size_t> find(std::string_view label) const;
    /// Throws std::invalid_argument for unknown labels.
    [[nodiscard]] std::size_t index_of(std::string_view label) const;

    friend bool operator==(const FiniteSpace& a, const FiniteSpace& b) {
        return a.labels_ == b.labels_ || *a.labels_ == *b.labels_;
    }

private:
    std::shared_ptr<const std::vector<std::string>> labels_;
};

/// Throws SpaceMismatch when the spaces differ.
void require_same_space(const FiniteSpace& a, const FiniteSpace& b, std::string_view context);

/// d^n, throwing std::length_error past the dense-tensor budget.
std::size_t tuple_count(std::size_t d, std::size_t n);

/// Row-major index of a tuple (first coordinate most significant).
std::size_t encode_tuple(std::span<const std::size_t> tuple, std::size_t d);
Tuple decode_tuple(std::size_t index, std::size_t d, std::size_t n);

/// Advance `tuple` to its row-major successor; false after the last tuple.
bool next_tuple(Tuple& tuple, std::size_t d);

double factorial(std::size_t n);

/// Real-valued function sampled on the points of a space (psi, eta, h).
struct TestFunction {
    std::vector<double> values;

    TestFunction() = default;
    explicit TestFunction(std::vector<double> v) : values(std::move(v)) {}

    static TestFunction constant(std::size_t d, double value);
    /// Dirac increment at `point`, optionally scaled.
    static TestFunction one_hot(std::size_t d, std::size_t point, double scale = 1.0);

    [[nodiscard]] std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    /// Integral against counting measure.
    [[nodiscard]] double sum() const;
};

TestFunction pointwise_product(const TestFunction& a, const TestFunction& b);
/// mu[h] = sum_x mu(x) h(x).
double integrate(const TestFunction& mu, const TestFunction& h);

}  // namespace pgfl
