#include "pgfl/prediction.hpp"

#include "pgfl/errors.hpp"
#include "pgfl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pgfl {

TransitionModel::TransitionModel(FiniteSpace space, std::size_t n_max,
                                 std::vector<std::vector<std::vector<double>>> tables,
                                 std::vector<std::vector<double>> dropped)
    : space_(std::move(space)), n_max_(n_max), tables_(std::move(tables)), dropped_(std::move(dropped)) {
    const std::size_t d = space_.size();
    if (tables_.size() != n_max_ + 1) throw std::invalid_argument("TransitionModel: need n_max + 1 target orders");
    for (std::size_t n = 0; n <= n_max_; ++n) {
        if (tables_[n].size() != n_max_ + 1) throw std::invalid_argument("TransitionModel: need n_max + 1 source orders");
        for (std::size_t m = 0; m <= n_max_; ++m) {
            if (tables_[n][m].size() != tuple_count(d, n) * tuple_count(d, m)) {
                throw std::invalid_argument("TransitionModel: table (" + std::to_string(n) + ", " +
                                            std::to_string(m) + ") has the wrong size");
            }
            for (double v : tables_[n][m]) {
                if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("TransitionModel: invalid entry");
            }
        }
    }
    if (dropped_.empty()) {
        for (std::size_t m = 0; m <= n_max_; ++m) dropped_.emplace_back(tuple_count(d, m), 0.0);
    }
    if (dropped_.size() != n_max_ + 1) throw std::invalid_argument("TransitionModel: dropped mass per source order");
}

TransitionModel TransitionModel::identity(const FiniteSpace& space, std::size_t n_max) {
    const std::size_t d = space.size();
    MultiplicativeSpec spec{std::vector<double>(d, 1.0), std::vector<std::vector<double>>(d, std::vector<double>(d, 0.0)),
                            MultiObjectDensity::unit(space)};
    for (std::size_t y = 0; y < d; ++y) spec.motion[y][y] = 1.0;
    return build_multiplicative(spec, n_max);
}

double TransitionModel::probability(std::span<const std::size_t> to, std::span<const std::size_t> from) const {
    if (to.size() > n_max_ || from.size() > n_max_) return 0.0;
    const std::size_t d = space_.size();
    const std::size_t cols = tuple_count(d, from.size());
    return tables_[to.size()][from.size()][encode_tuple(to, d) * cols + encode_tuple(from, d)];
}

double TransitionModel::dropped(std::span<const std::size_t> from) const {
    if (from.size() > n_max_) return 1.0;
    return dropped_[from.size()][encode_tuple(from, space_.size())];
}

MultiObjectDensity TransitionModel::source_functional(std::span<const std::size_t> to) const {
    if (to.size() > n_max_) throw std::out_of_range("source_functional: target tuple longer than n_max");
    const std::size_t d = space_.size();
    const std::size_t row = encode_tuple(to, d);
    std::vector<std::vector<double>> tensors(n_max_ + 1);
    for (std::size_t m = 0; m <= n_max_; ++m) {
        const std::size_t cols = tuple_count(d, m);
        const auto& table = tables_[to.size()][m];
        tensors[m].assign(table.begin() + static_cast<std::ptrdiff_t>(row * cols),
                          table.begin() + static_cast<std::ptrdiff_t>((row + 1) * cols));
    }
    return MultiObjectDensity(space_, std::move(tensors));
}

double TransitionModel::normalization_defect() const {
    const std::size_t d = space_.size();
    double worst = 0.0;
    for (std::size_t m = 0; m <= n_max_; ++m) {
        const std::size_t cols = tuple_count(d, m);
        for (std::size_t y = 0; y < cols; ++y) {
            double total = dropped_[m][y];
            for (std::size_t n = 0; n <= n_max_; ++n) {
                const std::size_t rows = tuple_count(d, n);
                double s = 0.0;
                for (std::size_t x = 0; x < rows; ++x) s += tables_[n][m][x * cols + y];
                total += s / factorial(n);
            }
            worst = std::max(worst, std::abs(total - 1.0));
        }
    }
    return worst;
}

namespace {

// Sums over the ways the sources in `from` either die or occupy a distinct
// target slot of `to`; unoccupied slots are filled by births. Dynamic
// program over the set of occupied slots.
double multiplicative_entry(const MultiplicativeSpec& spec, std::span<const std::size_t> to,
                            std::span<const std::size_t> from) {
    const std::size_t n = to.size();
    const std::size_t states = std::size_t{1} << n;
    std::vector<double> dp(states, 0.0);
    std::vector<double> next(states);
    dp[0] = 1.0;
    for (auto y : from) {
        const double ps = spec.survival[y];
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t mask = 0; mask < states; ++mask) {
            const double v = dp[mask];
            if (v == 0.0) continue;
            next[mask] += (1.0 - ps) * v;
            if (ps == 0.0) continue;
            for (std::size_t a = 0; a < n; ++a) {
                if (mask & (std::size_t{1} << a)) continue;
                const double f = spec.motion[y][to[a]];
                if (f != 0.0) next[mask | (std::size_t{1} << a)] += ps * f * v;
            }
        }
        std::swap(dp, next);
    }
    double total = 0.0;
    Tuple born;
    for (std::size_t mask = 0; mask < states; ++mask) {
        if (dp[mask] == 0.0) continue;
        born.clear();
        for (std::size_t a = 0; a < n; ++a) {
            if (!(mask & (std::size_t{1} << a))) born.push_back(to[a]);
        }
        total += dp[mask] * spec.birth.entry(born);
    }
    return total;
}

void validate(const MultiplicativeSpec& spec) {
    const std::size_t d = spec.birth.dim();
    if (spec.survival.size() != d || spec.motion.size() != d) {
        throw std::invalid_argument("multiplicative transition: survival and motion must cover the space");
    }
    for (std::size_t y = 0; y < d; ++y) {
        if (!(spec.survival[y] >= 0.0 && spec.survival[y] <= 1.0)) {
            throw std::invalid_argument("multiplicative transition: survival probability outside [0, 1]");
        }
        if (spec.motion[y].size() != d) throw std::invalid_argument("multiplicative transition: motion row size");
        double s = 0.0;
        for (double f : spec.motion[y]) {
            if (!(f >= 0.0)) throw std::invalid_argument("multiplicative transition: negative motion entry");
            s += f;
        }
        if (std::abs(s - 1.0) > 1e-10) throw std::invalid_argument("multiplicative transition: motion row not normalized");
    }
    if (!spec.birth.all_nonnegative() ||
        std::abs(spec.birth.total_mass() + spec.birth.truncation_mass() - 1.0) > 1e-9) {
        throw std::invalid_argument("multiplicative transition: birth process not normalized");
    }
}

}  // namespace

TransitionModel build_multiplicative(const MultiplicativeSpec& spec, std::size_t n_max, double tol) {
    validate(spec);
    const FiniteSpace& space = spec.birth.space();
    const std::size_t d = space.size();
    double birth_beyond = spec.birth.truncation_mass();
    for (std::size_t n = n_max + 1; n <= spec.birth.n_max(); ++n) birth_beyond += spec.birth.cardinality_mass(n);
    if (birth_beyond > tol) {
        throw TruncationOverflow("birth process puts " + std::to_string(birth_beyond) + " mass above n_max = " +
                                     std::to_string(n_max),
                                 birth_beyond);
    }

    std::vector<std::vector<std::vector<double>>> tables(n_max + 1, std::vector<std::vector<double>>(n_max + 1));
    std::vector<std::vector<double>> dropped(n_max + 1);
    for (std::size_t m = 0; m <= n_max; ++m) {
        const std::size_t cols = tuple_count(d, m);
        std::vector<double> kept(cols, 0.0);
        for (std::size_t n = 0; n <= n_max; ++n) {
            const std::size_t rows = tuple_count(d, n);
            auto& table = tables[n][m];
            table.assign(rows * cols, 0.0);
            // Entries are symmetric in x and in y: expand sorted pairs only.
            parallel_for(rows, [&](std::size_t x) {
                const Tuple to = decode_tuple(x, d, n);
                if (!std::is_sorted(to.begin(), to.end())) return;
                for (std::size_t y = 0; y < cols; ++y) {
                    const Tuple from = decode_tuple(y, d, m);
                    if (!std::is_sorted(from.begin(), from.end())) continue;
                    table[x * cols + y] = multiplicative_entry(spec, to, from);
                }
            });
            for (std::size_t x = 0; x < rows; ++x) {
                Tuple to = decode_tuple(x, d, n);
                std::sort(to.begin(), to.end());
                const std::size_t xs = encode_tuple(to, d);
                for (std::size_t y = 0; y < cols; ++y) {
                    Tuple from = decode_tuple(y, d, m);
                    std::sort(from.begin(), from.end());
                    const std::size_t ys = encode_tuple(from, d);
                    if (xs != x || ys != y) table[x * cols + y] = table[xs * cols + ys];
                }
            }
            const double inv_fact = 1.0 / factorial(n);
            for (std::size_t x = 0; x < rows; ++x) {
                for (std::size_t y = 0; y < cols; ++y) kept[y] += table[x * cols + y] * inv_fact;
            }
        }
        dropped[m].resize(cols);
        for (std::size_t y = 0; y < cols; ++y) dropped[m][y] = std::max(0.0, 1.0 - kept[y]);
    }
    return TransitionModel(space, n_max, std::move(tables), std::move(dropped));
}

MultiObjectDensity predict(const MultiObjectDensity& posterior, const TransitionModel& model, double tol) {
    require_same_space(posterior.space(), model.space(), "predict");
    const std::size_t d = model.space().size();
    const std::size_t n_max = model.n_max();
    if (posterior.n_max() > n_max) {
        throw std::invalid_argument("predict: posterior order exceeds the transition's n_max");
    }
    std::vector<std::vector<double>> tensors(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        tensors[n].assign(tuple_count(d, n), 0.0);
        parallel_for(tensors[n].size(), [&](std::size_t x) {
            const Tuple to = decode_tuple(x, d, n);
            tensors[n][x] = scalar_product(model.source_functional(to), posterior);
        });
    }
    double lost = 0.0;
    for (std::size_t m = 0; m <= posterior.n_max(); ++m) {
        Tuple from(m, 0);
        std::size_t idx = 0;
        double s = 0.0;
        do {
            s += model.dropped(from) * posterior.tensor(m)[idx++];
        } while (next_tuple(from, d));
        lost += s / factorial(m);
    }
    if (lost > tol) {
        throw TruncationOverflow("predict: " + std::to_string(lost) + " mass pushed beyond n_max = " +
                                     std::to_string(n_max),
                                 lost);
    }
    return MultiObjectDensity(model.space(), std::move(tensors), posterior.truncation_mass() + lost);
}

}  // namespace pgfl
