#include "pgfl/finite_space.hpp"

#include "pgfl/errors.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace pgfl {

namespace {
// Largest dense tensor we are willing to allocate (entries).
constexpr std::size_t kMaxTensorEntries = std::size_t{1} << 26;
}  // namespace

FiniteSpace::FiniteSpace(std::vector<std::string> labels) {
    if (labels.empty()) throw std::invalid_argument("FiniteSpace: at least one label required");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels) {
        if (!seen.insert(l).second) throw std::invalid_argument("FiniteSpace: duplicate label '" + l + "'");
    }
    labels_ = std::make_shared<const std::vector<std::string>>(std::move(labels));
}

FiniteSpace FiniteSpace::indexed(std::size_t d, std::string_view prefix) {
    std::vector<std::string> labels;
    labels.reserve(d);
    for (std::size_t i = 0; i < d; ++i) labels.push_back(std::string(prefix) + std::to_string(i));
    return FiniteSpace(std::move(labels));
}

std::optional<std::size_t> FiniteSpace::find(std::string_view label) const {
    for (std::size_t i = 0; i < labels_->size(); ++i) {
        if ((*labels_)[i] == label) return i;
    }
    return std::nullopt;
}

std::size_t FiniteSpace::index_of(std::string_view label) const {
    if (auto i = find(label)) return *i;
    throw std::invalid_argument("unknown label '" + std::string(label) + "'");
}

void require_same_space(const FiniteSpace& a, const FiniteSpace& b, std::string_view context) {
    if (!(a == b)) throw SpaceMismatch(std::string(context) + ": operands live on different spaces");
}

std::size_t tuple_count(std::size_t d, std::size_t n) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < n; ++i) {
        r *= d;
        if (r > kMaxTensorEntries) throw std::length_error("tensor of order " + std::to_string(n) + " over " +
                                                           std::to_string(d) + " points is too large");
    }
    return r;
}

std::size_t encode_tuple(std::span<const std::size_t> tuple, std::size_t d) {
    std::size_t idx = 0;
    for (auto x : tuple) idx = idx * d + x;
    return idx;
}

Tuple decode_tuple(std::size_t index, std::size_t d, std::size_t n) {
    Tuple t(n);
    for (std::size_t i = n; i-- > 0;) {
        t[i] = index % d;
        index /= d;
    }
    return t;
}

bool next_tuple(Tuple& tuple, std::size_t d) {
    for (std::size_t i = tuple.size(); i-- > 0;) {
        if (++tuple[i] < d) return true;
        tuple[i] = 0;
    }
    return false;
}

double factorial(std::size_t n) {
    double f = 1.0;
    for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

TestFunction TestFunction::constant(std::size_t d, double value) {
    return TestFunction(std::vector<double>(d, value));
}

TestFunction TestFunction::one_hot(std::size_t d, std::size_t point, double scale) {
    if (point >= d) throw std::out_of_range("one_hot: point outside space");
    std::vector<double> v(d, 0.0);
    v[point] = scale;
    return TestFunction(std::move(v));
}

double TestFunction::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

TestFunction pointwise_product(const TestFunction& a, const TestFunction& b) {
    if (a.size() != b.size()) throw SpaceMismatch("pointwise_product: size mismatch");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
    return TestFunction(std::move(v));
}

double integrate(const TestFunction& mu, const TestFunction& h) {
    if (mu.size() != h.size()) throw SpaceMismatch("integrate: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += mu[i] * h[i];
    return s;
}

}  // namespace pgfl
