#include "pgfl/finite_pp.hpp"

#include "pgfl/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pgfl {

namespace {

// sum_tuples t(x_1..x_n) prod psi(x_i), contracting the trailing index first.
double contract(std::span<const double> t, std::size_t d, std::size_t n, const TestFunction& psi) {
    if (n == 0) return t[0];
    std::vector<double> cur(t.begin(), t.end());
    std::size_t len = cur.size();
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t out = len / d;
        for (std::size_t i = 0; i < out; ++i) {
            double s = 0.0;
            const double* row = cur.data() + i * d;
            for (std::size_t j = 0; j < d; ++j) s += row[j] * psi[j];
            cur[i] = s;
        }
        len = out;
    }
    return cur[0];
}

void require_function_on(const MultiObjectDensity& p, const TestFunction& f, const char* what) {
    if (f.size() != p.dim()) {
        throw SpaceMismatch(std::string(what) + ": test function has " + std::to_string(f.size()) +
                            " entries, space has " + std::to_string(p.dim()));
    }
}

}  // namespace

MultiObjectDensity::MultiObjectDensity(FiniteSpace space, std::size_t n_max) : space_(std::move(space)) {
    tensors_.resize(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) tensors_[n].assign(tuple_count(space_.size(), n), 0.0);
}

MultiObjectDensity::MultiObjectDensity(FiniteSpace space, std::vector<std::vector<double>> tensors,
                                       double truncation_mass)
    : space_(std::move(space)), tensors_(std::move(tensors)), truncation_mass_(truncation_mass) {
    if (tensors_.empty()) throw std::invalid_argument("MultiObjectDensity: need at least the order-0 coefficient");
    for (std::size_t n = 0; n < tensors_.size(); ++n) {
        if (tensors_[n].size() != tuple_count(space_.size(), n)) {
            throw std::invalid_argument("MultiObjectDensity: tensor of order " + std::to_string(n) + " has " +
                                        std::to_string(tensors_[n].size()) + " entries");
        }
        for (double v : tensors_[n]) {
            if (!std::isfinite(v)) throw std::invalid_argument("MultiObjectDensity: non-finite coefficient");
        }
    }
}

MultiObjectDensity MultiObjectDensity::tabulate(FiniteSpace space, std::size_t n_max,
                                                const std::function<double(std::span<const std::size_t>)>& fn,
                                                double truncation_mass) {
    const std::size_t d = space.size();
    std::vector<std::vector<double>> tensors(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        tensors[n].resize(tuple_count(d, n));
        Tuple t(n, 0);
        std::size_t idx = 0;
        do {
            tensors[n][idx++] = fn(t);
        } while (next_tuple(t, d));
    }
    return MultiObjectDensity(std::move(space), std::move(tensors), truncation_mass);
}

MultiObjectDensity MultiObjectDensity::unit(FiniteSpace space) {
    return MultiObjectDensity(std::move(space), std::vector<std::vector<double>>{{1.0}});
}

double MultiObjectDensity::entry(std::span<const std::size_t> tuple) const {
    if (tuple.size() > n_max()) return 0.0;
    for (auto x : tuple) {
        if (x >= dim()) throw std::out_of_range("entry: point outside space");
    }
    return tensors_[tuple.size()][encode_tuple(tuple, dim())];
}

double MultiObjectDensity::cardinality_mass(std::size_t n) const {
    if (n > n_max()) return 0.0;
    double s = 0.0;
    for (double v : tensors_[n]) s += v;
    return s / factorial(n);
}

std::vector<double> MultiObjectDensity::cardinality_distribution() const {
    std::vector<double> c(n_max() + 1);
    for (std::size_t n = 0; n <= n_max(); ++n) c[n] = cardinality_mass(n);
    return c;
}

double MultiObjectDensity::total_mass() const {
    double s = 0.0;
    for (std::size_t n = 0; n <= n_max(); ++n) s += cardinality_mass(n);
    return s;
}

double MultiObjectDensity::symmetry_defect() const {
    const std::size_t d = dim();
    double worst = 0.0;
    for (std::size_t n = 2; n <= n_max(); ++n) {
        Tuple t(n, 0);
        std::size_t idx = 0;
        do {
            for (std::size_t k = 0; k + 1 < n; ++k) {
                Tuple s = t;
                std::swap(s[k], s[k + 1]);
                worst = std::max(worst, std::abs(tensors_[n][idx] - tensors_[n][encode_tuple(s, d)]));
            }
            ++idx;
        } while (next_tuple(t, d));
    }
    return worst;
}

bool MultiObjectDensity::all_nonnegative() const {
    for (const auto& t : tensors_) {
        for (double v : t) {
            if (v < 0.0) return false;
        }
    }
    return true;
}

MultiObjectDensity MultiObjectDensity::with_n_max(std::size_t n_max) const {
    std::vector<std::vector<double>> tensors(n_max + 1);
    double dropped = 0.0;
    for (std::size_t n = 0; n <= std::max(n_max, this->n_max()); ++n) {
        if (n <= n_max) {
            tensors[n] = n <= this->n_max() ? tensors_[n] : std::vector<double>(tuple_count(dim(), n), 0.0);
        } else {
            dropped += cardinality_mass(n);
        }
    }
    return MultiObjectDensity(space_, std::move(tensors), truncation_mass_ + dropped);
}

MultiObjectDensity MultiObjectDensity::scaled(double c) const {
    auto tensors = tensors_;
    for (auto& t : tensors) {
        for (double& v : t) v *= c;
    }
    return MultiObjectDensity(space_, std::move(tensors), truncation_mass_ * std::abs(c));
}

MultiObjectDensity linear_combination(double a, const MultiObjectDensity& p, double b, const MultiObjectDensity& q) {
    require_same_space(p.space(), q.space(), "linear_combination");
    const std::size_t n_max = std::max(p.n_max(), q.n_max());
    std::vector<std::vector<double>> tensors(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        tensors[n].assign(tuple_count(p.dim(), n), 0.0);
        if (n <= p.n_max()) {
            for (std::size_t i = 0; i < tensors[n].size(); ++i) tensors[n][i] += a * p.tensor(n)[i];
        }
        if (n <= q.n_max()) {
            for (std::size_t i = 0; i < tensors[n].size(); ++i) tensors[n][i] += b * q.tensor(n)[i];
        }
    }
    return MultiObjectDensity(p.space(), std::move(tensors),
                              std::abs(a) * p.truncation_mass() + std::abs(b) * q.truncation_mass());
}

double max_abs_difference(const MultiObjectDensity& p, const MultiObjectDensity& q) {
    require_same_space(p.space(), q.space(), "max_abs_difference");
    double worst = 0.0;
    for (std::size_t n = 0; n <= std::max(p.n_max(), q.n_max()); ++n) {
        const std::size_t count = tuple_count(p.dim(), n);
        for (std::size_t i = 0; i < count; ++i) {
            const double a = n <= p.n_max() ? p.tensor(n)[i] : 0.0;
            const double b = n <= q.n_max() ? q.tensor(n)[i] : 0.0;
            worst = std::max(worst, std::abs(a - b));
        }
    }
    return worst;
}

double evaluate(const MultiObjectDensity& p, const TestFunction& psi) {
    require_function_on(p, psi, "evaluate");
    double total = 0.0;
    for (std::size_t n = 0; n <= p.n_max(); ++n) {
        total += contract(p.tensor(n), p.dim(), n, psi) / factorial(n);
    }
    return total;
}

MultiObjectDensity differentiate(const MultiObjectDensity& p, std::size_t point) {
    if (point >= p.dim()) throw std::out_of_range("differentiate: point outside space");
    if (p.n_max() == 0) return MultiObjectDensity(p.space(), 0);
    const std::size_t d = p.dim();
    std::vector<std::vector<double>> tensors(p.n_max());
    for (std::size_t n = 0; n < p.n_max(); ++n) {
        const std::size_t len = tuple_count(d, n);
        auto src = p.tensor(n + 1).subspan(point * len, len);
        tensors[n].assign(src.begin(), src.end());
    }
    return MultiObjectDensity(p.space(), std::move(tensors), p.truncation_mass());
}

MultiObjectDensity differentiate(const MultiObjectDensity& p, const TestFunction& direction) {
    require_function_on(p, direction, "differentiate");
    if (p.n_max() == 0) return MultiObjectDensity(p.space(), 0);
    const std::size_t d = p.dim();
    std::vector<std::vector<double>> tensors(p.n_max());
    for (std::size_t n = 0; n < p.n_max(); ++n) {
        const std::size_t len = tuple_count(d, n);
        auto src = p.tensor(n + 1);
        std::vector<double> out(len, 0.0);
        for (std::size_t x = 0; x < d; ++x) {
            const double w = direction[x];
            if (w == 0.0) continue;
            const double* slice = src.data() + x * len;
            for (std::size_t i = 0; i < len; ++i) out[i] += w * slice[i];
        }
        tensors[n] = std::move(out);
    }
    return MultiObjectDensity(p.space(), std::move(tensors), p.truncation_mass());
}

double differential(const MultiObjectDensity& p, const TestFunction& at, std::span<const TestFunction> increments) {
    if (increments.size() > p.n_max()) {
        require_function_on(p, at, "differential");
        return 0.0;
    }
    if (increments.empty()) return evaluate(p, at);
    MultiObjectDensity cur = differentiate(p, increments[0]);
    for (std::size_t i = 1; i < increments.size(); ++i) cur = differentiate(cur, increments[i]);
    return evaluate(cur, at);
}

double janossy(const MultiObjectDensity& p, std::span<const std::size_t> tuple) {
    if (tuple.size() > p.n_max()) throw std::out_of_range("janossy: tuple longer than n_max");
    if (tuple.empty()) return evaluate(p, TestFunction::constant(p.dim(), 0.0));
    MultiObjectDensity cur = differentiate(p, tuple[0]);
    for (std::size_t i = 1; i < tuple.size(); ++i) cur = differentiate(cur, tuple[i]);
    return evaluate(cur, TestFunction::constant(p.dim(), 0.0));
}

double moment(const MultiObjectDensity& p, std::span<const std::size_t> tuple) {
    if (tuple.size() > p.n_max()) throw std::out_of_range("moment: tuple longer than n_max");
    const auto ones = TestFunction::constant(p.dim(), 1.0);
    if (tuple.empty()) return evaluate(p, ones);
    MultiObjectDensity cur = differentiate(p, tuple[0]);
    for (std::size_t i = 1; i < tuple.size(); ++i) cur = differentiate(cur, tuple[i]);
    return evaluate(cur, ones);
}

std::vector<double> intensity(const MultiObjectDensity& p) {
    std::vector<double> m(p.dim(), 0.0);
    if (p.n_max() == 0) return m;
    const auto ones = TestFunction::constant(p.dim(), 1.0);
    for (std::size_t x = 0; x < p.dim(); ++x) m[x] = evaluate(differentiate(p, x), ones);
    return m;
}

double scalar_product(const MultiObjectDensity& a, const MultiObjectDensity& b) {
    require_same_space(a.space(), b.space(), "scalar_product");
    double total = 0.0;
    for (std::size_t n = 0; n <= std::min(a.n_max(), b.n_max()); ++n) {
        auto ta = a.tensor(n);
        auto tb = b.tensor(n);
        double s = 0.0;
        for (std::size_t i = 0; i < ta.size(); ++i) s += ta[i] * tb[i];
        total += s / factorial(n);
    }
    return total;
}

double poisson_tail(double lambda, std::size_t n) {
    if (lambda <= 0.0) return 0.0;
    // Terms e^-l l^k / k! built in log space so large lambda cannot overflow.
    double log_term = -lambda;
    for (std::size_t k = 1; k <= n + 1; ++k) log_term += std::log(lambda) - std::log(static_cast<double>(k));
    double tail = 0.0;
    for (std::size_t k = n + 1;; ++k) {
        const double term = std::exp(log_term);
        tail += term;
        if (static_cast<double>(k) > lambda && (term <= tail * 1e-18 || term == 0.0)) break;
        log_term += std::log(lambda) - std::log(static_cast<double>(k + 1));
    }
    return tail;
}

MultiObjectDensity poisson(const FiniteSpace& space, const PoissonSpec& spec, std::optional<std::size_t> n_max) {
    if (spec.intensity.size() != space.size()) throw SpaceMismatch("poisson: intensity size does not match space");
    double lambda = 0.0;
    for (double v : spec.intensity.values) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("poisson: intensity must be finite and >= 0");
        lambda += v;
    }
    if (spec.tail_tol < 0.0) throw std::invalid_argument("poisson: tail_tol must be >= 0");
    std::size_t order = 0;
    if (n_max) {
        order = *n_max;
    } else {
        while (poisson_tail(lambda, order) >= spec.tail_tol && lambda > 0.0) {
            if (++order > kPoissonMaxOrder) {
                throw std::invalid_argument("poisson: tail tolerance " + std::to_string(spec.tail_tol) +
                                            " unreachable below n_max = " + std::to_string(kPoissonMaxOrder));
            }
        }
    }
    const double base = std::exp(-lambda);
    const auto& mu = spec.intensity;
    return MultiObjectDensity::tabulate(
        space, order,
        [&](std::span<const std::size_t> t) {
            double v = base;
            for (auto x : t) v *= mu[x];
            return v;
        },
        poisson_tail(lambda, order));
}

MultiObjectDensity bernoulli(const FiniteSpace& space, double q, const TestFunction& f) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("bernoulli: existence probability outside [0, 1]");
    if (f.size() != space.size()) throw SpaceMismatch("bernoulli: density size does not match space");
    for (double v : f.values) {
        if (!(v >= 0.0)) throw std::invalid_argument("bernoulli: density entries must be >= 0");
    }
    if (std::abs(f.sum() - 1.0) > 1e-10) throw std::invalid_argument("bernoulli: density not normalized");
    std::vector<std::vector<double>> tensors{{1.0 - q}, std::vector<double>(space.size())};
    for (std::size_t x = 0; x < space.size(); ++x) tensors[1][x] = q * f[x];
    return MultiObjectDensity(space, std::move(tensors));
}

MultiObjectDensity superpose(const MultiObjectDensity& a, const MultiObjectDensity& b,
                             std::optional<std::size_t> n_max_cap) {
    require_same_space(a.space(), b.space(), "superpose");
    const std::size_t na = a.n_max();
    const std::size_t nb = b.n_max();
    std::size_t limit = na + nb;
    if (!a.is_exact()) limit = std::min(limit, na);
    if (!b.is_exact()) limit = std::min(limit, nb);
    if (n_max_cap) limit = std::min(limit, *n_max_cap);

    const std::size_t d = a.dim();
    std::vector<std::vector<double>> tensors(limit + 1);
    Tuple left;
    Tuple right;
    for (std::size_t n = 0; n <= limit; ++n) {
        tensors[n].assign(tuple_count(d, n), 0.0);
        Tuple t(n, 0);
        std::size_t idx = 0;
        do {
            double s = 0.0;
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
                const auto k = static_cast<std::size_t>(std::popcount(mask));
                if (k > na || n - k > nb) continue;
                left.clear();
                right.clear();
                for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1U ? left : right).push_back(t[i]);
                s += a.tensor(k)[encode_tuple(left, d)] * b.tensor(n - k)[encode_tuple(right, d)];
            }
            tensors[n][idx++] = s;
        } while (next_tuple(t, d));
    }

    double dropped = 0.0;
    for (std::size_t i = 0; i <= na; ++i) {
        for (std::size_t j = 0; j <= nb; ++j) {
            if (i + j > limit) dropped += a.cardinality_mass(i) * b.cardinality_mass(j);
        }
    }
    const double ta = a.truncation_mass();
    const double tb = b.truncation_mass();
    const double missing = ta * (b.total_mass() + tb) + tb * a.total_mass() + std::abs(dropped);
    return MultiObjectDensity(a.space(), std::move(tensors), missing);
}

}  // namespace pgfl
