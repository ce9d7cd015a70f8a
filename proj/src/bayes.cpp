#include "pgfl/bayes.hpp"

#include "pgfl/combinatorics.hpp"
#include "pgfl/errors.hpp"
#include "pgfl/log_sum.hpp"
#include "pgfl/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pgfl {

// ---- Model types ----

ObservationKernel::ObservationKernel(FiniteSpace states, FiniteSpace observations,
                                     std::vector<MultiObjectDensity> per_state)
    : states_(std::move(states)), observations_(std::move(observations)) {
    if (per_state.size() != states_.size()) {
        throw std::invalid_argument("ObservationKernel: need one measurement density per state");
    }
    for (const auto& p : per_state) {
        require_same_space(p.space(), observations_, "ObservationKernel");
        m_max_ = std::max(m_max_, p.n_max());
    }
    for (std::size_t x = 0; x < per_state.size(); ++x) {
        const auto& p = per_state[x];
        const std::string where = "ObservationKernel: state '" + states_.label(x) + "'";
        if (!p.all_nonnegative()) throw std::invalid_argument(where + " has negative entries");
        if (std::abs(p.total_mass() - 1.0) > 1e-10) throw std::invalid_argument(where + " is not normalized");
        if (p.symmetry_defect() > 1e-12) throw std::invalid_argument(where + " is not symmetric");
        per_state_.push_back(p.with_n_max(m_max_));
    }
}

ObservationKernel ObservationKernel::bernoulli_detection(FiniteSpace states, FiniteSpace observations,
                                                         const std::vector<double>& detection,
                                                         const std::vector<std::vector<double>>& likelihood) {
    if (detection.size() != states.size() || likelihood.size() != states.size()) {
        throw std::invalid_argument("bernoulli_detection: one detection probability and likelihood row per state");
    }
    std::vector<MultiObjectDensity> per_state;
    for (std::size_t x = 0; x < states.size(); ++x) {
        if (likelihood[x].size() != observations.size()) {
            throw std::invalid_argument("bernoulli_detection: likelihood row size does not match observation space");
        }
        per_state.push_back(bernoulli(observations, detection[x], TestFunction(likelihood[x])));
    }
    return ObservationKernel(std::move(states), std::move(observations), std::move(per_state));
}

double ObservationKernel::group(std::size_t x, std::span<const std::size_t> z) const {
    if (z.size() > m_max_) return 0.0;
    return per_state_.at(x).entry(z);
}

TestFunction ObservationKernel::missed() const {
    std::vector<double> v(states_.size());
    for (std::size_t x = 0; x < v.size(); ++x) v[x] = per_state_[x].tensor(0)[0];
    return TestFunction(std::move(v));
}

TestFunction ObservationKernel::group_function(std::span<const std::size_t> z) const {
    std::vector<double> v(states_.size());
    for (std::size_t x = 0; x < v.size(); ++x) v[x] = group(x, z);
    return TestFunction(std::move(v));
}

double ObservationKernel::mean_group_size(std::size_t x) const {
    double mean = 0.0;
    for (std::size_t m = 1; m <= m_max_; ++m) mean += static_cast<double>(m) * per_state_.at(x).cardinality_mass(m);
    return mean;
}

ClutterProcess::ClutterProcess(MultiObjectDensity density) : density_(std::move(density)) {
    if (!density_.all_nonnegative()) throw std::invalid_argument("ClutterProcess: negative entries");
    if (std::abs(density_.total_mass() + density_.truncation_mass() - 1.0) > 1e-9) {
        throw std::invalid_argument("ClutterProcess: density not normalized");
    }
}

ClutterProcess ClutterProcess::none(const FiniteSpace& observations) {
    return ClutterProcess(MultiObjectDensity::unit(observations));
}

double ClutterProcess::group(std::span<const std::size_t> z) const { return density_.entry(z); }

MeasurementSet MeasurementSet::canonical() const {
    MeasurementSet c{points};
    std::sort(c.points.begin(), c.points.end());
    return c;
}

// ---- Brute-force oracle ----

namespace {

void check_measurements(const ObservationKernel& kernel, const MeasurementSet& z) {
    for (auto p : z.points) {
        if (p >= kernel.observations().size()) throw std::out_of_range("measurement outside the observation space");
    }
}

std::vector<std::size_t> gather(const MeasurementSet& z, std::span<const std::size_t> idx) {
    std::vector<std::size_t> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(z.points[i]);
    return out;
}

}  // namespace

double joint_likelihood(const ObservationKernel& kernel, const ClutterProcess* clutter,
                        std::span<const std::size_t> states, const MeasurementSet& z) {
    const std::size_t n = states.size();
    const std::size_t m = z.size();
    const std::size_t owners = n + (clutter ? 1 : 0);
    if (m > 0 && owners == 0) return 0.0;
    std::vector<std::size_t> owner(m, 0);
    std::vector<std::vector<std::size_t>> groups(owners);
    double total = 0.0;
    while (true) {
        for (auto& g : groups) g.clear();
        for (std::size_t j = 0; j < m; ++j) groups[owner[j]].push_back(z.points[j]);
        double v = 1.0;
        for (std::size_t i = 0; i < n && v != 0.0; ++i) v *= kernel.group(states[i], groups[i]);
        if (clutter && v != 0.0) v *= clutter->group(groups[n]);
        total += v;
        // Odometer over owner assignments.
        std::size_t j = 0;
        while (j < m && ++owner[j] == owners) owner[j++] = 0;
        if (j == m) break;
    }
    return total;
}

Posterior posterior_direct(const MultiObjectDensity& prior, const ObservationKernel& kernel,
                           const ClutterProcess* clutter, const MeasurementSet& z_in) {
    require_same_space(prior.space(), kernel.states(), "posterior_direct");
    if (clutter) require_same_space(clutter->density().space(), kernel.observations(), "posterior_direct clutter");
    check_measurements(kernel, z_in);
    const MeasurementSet z = z_in.canonical();
    const std::size_t d = prior.dim();

    std::vector<std::vector<double>> weighted(prior.n_max() + 1);
    double denominator = 0.0;
    for (std::size_t n = 0; n <= prior.n_max(); ++n) {
        weighted[n].resize(tuple_count(d, n));
        Tuple t(n, 0);
        std::size_t idx = 0;
        double s = 0.0;
        do {
            const double p = prior.tensor(n)[idx];
            weighted[n][idx] = p == 0.0 ? 0.0 : joint_likelihood(kernel, clutter, t, z) * p;
            s += weighted[n][idx];
            ++idx;
        } while (next_tuple(t, d));
        denominator += s / factorial(n);
    }
    if (!(denominator > 0.0) || !std::isfinite(denominator)) {
        throw ZeroEvidence("posterior_direct: measurement set has zero likelihood under the model");
    }

    std::vector<double> m1(d, 0.0);
    for (std::size_t n = 0; n <= prior.n_max(); ++n) {
        Tuple t(n, 0);
        std::size_t idx = 0;
        const double inv_fact = 1.0 / factorial(n);
        do {
            double& q = weighted[n][idx++];
            q /= denominator;
            for (auto x : t) m1[x] += q * inv_fact;
        } while (next_tuple(t, d));
    }
    return Posterior{MultiObjectDensity(prior.space(), std::move(weighted)), std::move(m1), std::log(denominator)};
}

// ---- Partition-sum updates ----

namespace {

// One (W, pi) term: clutter weight P_kappa(Z \ W) and the block increments
// x -> P(Z_block | x) for each block of pi.
struct Term {
    double weight = 1.0;
    std::vector<TestFunction> increments;
};

template <typename Fn>
void for_each_partition(std::size_t m, std::size_t m_max, const UpdateOptions& options, Fn&& fn) {
    std::optional<std::size_t> cap;
    if (options.prune_blocks) {
        if (m > 0 && m_max == 0) return;
        cap = std::max<std::size_t>(m_max, 1);
    }
    auto stream = partitions(m, cap);
    while (stream.next()) fn(stream.current());
}

std::vector<Term> build_terms(const ObservationKernel& kernel, const ClutterProcess* clutter, const MeasurementSet& z,
                              const UpdateOptions& options) {
    std::vector<Term> terms;
    auto add_partitions = [&](std::span<const std::size_t> kept, double weight) {
        for_each_partition(kept.size(), kernel.m_max(), options, [&](const Partition& pi) {
            Term term{weight, {}};
            term.increments.reserve(pi.size());
            std::vector<std::size_t> block_idx;
            for (const auto& block : pi.blocks) {
                block_idx.clear();
                for (auto b : block) block_idx.push_back(kept[b]);
                term.increments.push_back(kernel.group_function(gather(z, block_idx)));
            }
            terms.push_back(std::move(term));
        });
    };
    if (!clutter) {
        std::vector<std::size_t> all(z.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        add_partitions(all, 1.0);
        return terms;
    }
    auto splits = subsets(z.size());
    while (splits.next()) {
        const auto& split = splits.current();
        const double weight = clutter->group(gather(z, split.dropped));
        if (weight == 0.0) continue;
        add_partitions(split.kept, weight);
    }
    return terms;
}

struct Evidence {
    double value = 0.0;
    double log_value = 0.0;
};

Evidence evidence(const MultiObjectDensity& prior, const TestFunction& missed, const std::vector<Term>& terms,
                  const UpdateOptions& options) {
    Evidence ev;
    if (options.log_domain) {
        LogSumExp acc;
        for (const auto& t : terms) acc.add(t.weight * differential(prior, missed, t.increments));
        ev.log_value = acc.log();
        ev.value = std::exp(ev.log_value);
        if (!std::isfinite(ev.log_value)) throw ZeroEvidence("measurement set has zero likelihood under the model");
    } else {
        for (const auto& t : terms) ev.value += t.weight * differential(prior, missed, t.increments);
        if (!(ev.value > 0.0) || !std::isfinite(ev.value)) {
            throw ZeroEvidence("measurement set has zero likelihood under the model");
        }
        ev.log_value = std::log(ev.value);
    }
    return ev;
}

// Sum over injective placements of the blocks onto positions of `w`, the
// remaining positions taking the missed-detection factor. This is the
// coefficient of the |w|-th variation of a term at Dirac increments.
double assignment_sum(std::span<const std::size_t> w, const TestFunction& missed,
                      std::span<const TestFunction> increments) {
    const std::size_t k = w.size();
    const std::size_t j = increments.size();
    if (j > k) return 0.0;
    const std::size_t states = std::size_t{1} << j;
    std::vector<double> dp(states, 0.0);
    std::vector<double> next(states);
    dp[0] = 1.0;
    for (std::size_t a = 0; a < k; ++a) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t mask = 0; mask < states; ++mask) {
            const double v = dp[mask];
            if (v == 0.0) continue;
            const auto used = static_cast<std::size_t>(std::popcount(mask));
            if (a - used < k - j) next[mask] += v * missed[w[a]];
            for (std::size_t i = 0; i < j; ++i) {
                if (!(mask & (std::size_t{1} << i))) next[mask | (std::size_t{1} << i)] += v * increments[i][w[a]];
            }
        }
        std::swap(dp, next);
    }
    return dp[states - 1];
}

// Fills every tensor from its sorted representative; entries are symmetric.
template <typename Fn>
std::vector<double> symmetric_tensor(std::size_t d, std::size_t k, Fn&& value_at_sorted) {
    const std::size_t count = tuple_count(d, k);
    std::vector<double> out(count, 0.0);
    parallel_for(count, [&](std::size_t i) {
        const Tuple t = decode_tuple(i, d, k);
        if (std::is_sorted(t.begin(), t.end())) out[i] = value_at_sorted(t, i);
    });
    Tuple t(k, 0);
    for (std::size_t i = 0; i < count; ++i, next_tuple(t, d)) {
        if (std::is_sorted(t.begin(), t.end())) continue;
        Tuple s = t;
        std::sort(s.begin(), s.end());
        out[i] = out[encode_tuple(s, d)];
    }
    return out;
}

MultiObjectDensity posterior_density(const MultiObjectDensity& prior, const TestFunction& missed,
                                     const std::vector<Term>& terms, const Evidence& ev,
                                     const UpdateOptions& options) {
    const std::size_t d = prior.dim();
    std::vector<std::vector<double>> tensors(prior.n_max() + 1);
    for (std::size_t k = 0; k <= prior.n_max(); ++k) {
        auto pk = prior.tensor(k);
        tensors[k] = symmetric_tensor(d, k, [&](const Tuple& w, std::size_t idx) {
            const double p = pk[idx];
            if (p == 0.0) return 0.0;
            if (options.log_domain && p > 0.0) {
                LogSumExp acc;
                for (const auto& t : terms) {
                    if (t.increments.size() <= k) acc.add(t.weight * assignment_sum(w, missed, t.increments));
                }
                return std::exp(std::log(p) + acc.log() - ev.log_value);
            }
            double s = 0.0;
            for (const auto& t : terms) {
                if (t.increments.size() <= k) s += t.weight * assignment_sum(w, missed, t.increments);
            }
            return p * s / ev.value;
        });
    }
    MultiObjectDensity posterior(prior.space(), std::move(tensors));
    const double mass = posterior.total_mass();
    if (std::abs(mass - 1.0) > options.truncation_tol) {
        throw TruncationOverflow("posterior mass " + std::to_string(mass) + " departs from 1 beyond tolerance",
                                 std::abs(mass - 1.0));
    }
    return posterior;
}

// First factorial moment: per term, the variation with an appended
// increment P_0 localized at x plus the variations with the i-th block
// increment localized at x.
std::vector<double> intensity_from_terms(const MultiObjectDensity& prior, const TestFunction& missed,
                                         const std::vector<Term>& terms, const Evidence& ev,
                                         const UpdateOptions& options) {
    const std::size_t d = prior.dim();
    const std::size_t n_max = prior.n_max();
    std::vector<double> linear(d, 0.0);
    std::vector<LogSumExp> logs(d);
    auto accumulate = [&](std::size_t x, double v) {
        if (options.log_domain) {
            logs[x].add(v);
        } else {
            linear[x] += v;
        }
    };
    auto along = [&](std::span<const TestFunction> incs, std::optional<std::size_t> skip) {
        MultiObjectDensity cur = prior;
        for (std::size_t i = 0; i < incs.size(); ++i) {
            if (skip && *skip == i) continue;
            cur = differentiate(cur, incs[i]);
        }
        return cur;
    };
    for (const auto& t : terms) {
        const std::size_t j = t.increments.size();
        if (j > n_max) continue;
        std::vector<double> contrib(d, 0.0);
        if (j < n_max) {
            const MultiObjectDensity base = along(t.increments, std::nullopt);
            for (std::size_t x = 0; x < d; ++x) {
                if (missed[x] != 0.0) contrib[x] += missed[x] * evaluate(differentiate(base, x), missed);
            }
        }
        for (std::size_t i = 0; i < j; ++i) {
            const MultiObjectDensity rest = along(t.increments, i);
            for (std::size_t x = 0; x < d; ++x) {
                const double px = t.increments[i][x];
                if (px != 0.0) contrib[x] += px * evaluate(differentiate(rest, x), missed);
            }
        }
        for (std::size_t x = 0; x < d; ++x) accumulate(x, t.weight * contrib[x]);
    }
    std::vector<double> m1(d);
    for (std::size_t x = 0; x < d; ++x) {
        m1[x] = options.log_domain ? std::exp(logs[x].log() - ev.log_value) : linear[x] / ev.value;
    }
    return m1;
}

struct Prepared {
    MeasurementSet z;
    TestFunction missed;
    std::vector<Term> terms;
    Evidence ev;
};

Prepared prepare(const MultiObjectDensity& prior, const ObservationKernel& kernel, const ClutterProcess* clutter,
                 const MeasurementSet& z_in, const UpdateOptions& options, const char* what) {
    require_same_space(prior.space(), kernel.states(), what);
    if (clutter) require_same_space(clutter->density().space(), kernel.observations(), what);
    check_measurements(kernel, z_in);
    Prepared p;
    p.z = z_in.canonical();
    p.missed = kernel.missed();
    p.terms = build_terms(kernel, clutter, p.z, options);
    p.ev = evidence(prior, p.missed, p.terms, options);
    return p;
}

}  // namespace

Posterior posterior_partition(const MultiObjectDensity& prior, const ObservationKernel& kernel,
                              const MeasurementSet& z, const UpdateOptions& options) {
    const auto p = prepare(prior, kernel, nullptr, z, options, "posterior_partition");
    return Posterior{posterior_density(prior, p.missed, p.terms, p.ev, options),
                     intensity_from_terms(prior, p.missed, p.terms, p.ev, options), p.ev.log_value};
}

std::vector<double> posterior_intensity(const MultiObjectDensity& prior, const ObservationKernel& kernel,
                                        const MeasurementSet& z, const UpdateOptions& options) {
    const auto p = prepare(prior, kernel, nullptr, z, options, "posterior_intensity");
    return intensity_from_terms(prior, p.missed, p.terms, p.ev, options);
}

Posterior posterior_partition_clutter(const MultiObjectDensity& prior, const ObservationKernel& kernel,
                                      const ClutterProcess& clutter, const MeasurementSet& z,
                                      const UpdateOptions& options) {
    const auto p = prepare(prior, kernel, &clutter, z, options, "posterior_partition_clutter");
    return Posterior{posterior_density(prior, p.missed, p.terms, p.ev, options),
                     intensity_from_terms(prior, p.missed, p.terms, p.ev, options), p.ev.log_value};
}

std::vector<double> posterior_intensity_clutter(const MultiObjectDensity& prior, const ObservationKernel& kernel,
                                                const ClutterProcess& clutter, const MeasurementSet& z,
                                                const UpdateOptions& options) {
    const auto p = prepare(prior, kernel, &clutter, z, options, "posterior_intensity_clutter");
    return intensity_from_terms(prior, p.missed, p.terms, p.ev, options);
}

std::size_t update_term_count(const ObservationKernel& kernel, const ClutterProcess* clutter,
                              const MeasurementSet& z, const UpdateOptions& options) {
    check_measurements(kernel, z);
    return build_terms(kernel, clutter, z.canonical(), options).size();
}

// ---- Poisson closed forms ----

namespace {

struct PoissonTerms {
    TestFunction missed;
    std::vector<std::vector<TestFunction>> blocks;  // per partition
    std::vector<std::vector<double>> masses;        // mu[P(Z_block | .)] per block
    double log_sum = 0.0;                           // log sum_pi prod mu[P]
    double sum = 0.0;
};

PoissonTerms poisson_terms(const TestFunction& mu, const ObservationKernel& kernel, const MeasurementSet& z_in,
                           const UpdateOptions& options) {
    if (mu.size() != kernel.states().size()) throw SpaceMismatch("poisson_posterior: intensity on the wrong space");
    for (double v : mu.values) {
        if (!(v >= 0.0)) throw std::invalid_argument("poisson_posterior: intensity must be >= 0");
    }
    check_measurements(kernel, z_in);
    const MeasurementSet z = z_in.canonical();
    PoissonTerms pt;
    pt.missed = kernel.missed();
    for (const auto& t : build_terms(kernel, nullptr, z, options)) {
        std::vector<double> masses;
        for (const auto& inc : t.increments) masses.push_back(integrate(mu, inc));
        pt.blocks.push_back(t.increments);
        pt.masses.push_back(std::move(masses));
    }
    LogSumExp acc;
    for (const auto& masses : pt.masses) {
        double prod = 1.0;
        for (double a : masses) prod *= a;
        if (options.log_domain) {
            acc.add(prod);
        } else {
            pt.sum += prod;
        }
    }
    if (options.log_domain) {
        pt.log_sum = acc.log();
        pt.sum = std::exp(pt.log_sum);
        if (!std::isfinite(pt.log_sum)) throw ZeroEvidence("poisson_posterior: measurement set has zero likelihood");
    } else {
        if (!(pt.sum > 0.0)) throw ZeroEvidence("poisson_posterior: measurement set has zero likelihood");
        pt.log_sum = std::log(pt.sum);
    }
    return pt;
}

}  // namespace

Posterior poisson_posterior(const TestFunction& mu, const ObservationKernel& kernel, const MeasurementSet& z,
                            std::size_t n_max, const UpdateOptions& options) {
    const auto pt = poisson_terms(mu, kernel, z, options);
    const std::size_t d = mu.size();
    const double lambda = mu.sum();
    const double mu_missed = integrate(mu, pt.missed);
    std::vector<std::vector<double>> tensors(n_max + 1);
    for (std::size_t k = 0; k <= n_max; ++k) {
        tensors[k] = symmetric_tensor(d, k, [&](const Tuple& w, std::size_t) {
            double weight = 1.0;
            for (auto x : w) weight *= mu[x];
            if (weight == 0.0) return 0.0;
            double s = 0.0;
            for (const auto& blocks : pt.blocks) s += assignment_sum(w, pt.missed, blocks);
            if (s <= 0.0) return 0.0;
            return std::exp(std::log(weight) + std::log(s) - mu_missed - pt.log_sum);
        });
    }
    MultiObjectDensity density(kernel.states(), std::move(tensors));
    const double missing = std::max(0.0, 1.0 - density.total_mass());
    density = MultiObjectDensity(kernel.states(), density.tensors(), missing);
    return Posterior{std::move(density), poisson_posterior_intensity(mu, kernel, z, options),
                     mu_missed - lambda + pt.log_sum};
}

std::vector<double> poisson_posterior_intensity(const TestFunction& mu, const ObservationKernel& kernel,
                                                const MeasurementSet& z, const UpdateOptions& options) {
    const auto pt = poisson_terms(mu, kernel, z, options);
    const std::size_t d = mu.size();
    std::vector<double> m1(d);
    for (std::size_t x = 0; x < d; ++x) {
        if (mu[x] == 0.0) {
            m1[x] = 0.0;
            continue;
        }
        LogSumExp acc;
        double s = 0.0;
        for (std::size_t p = 0; p < pt.blocks.size(); ++p) {
            const auto& masses = pt.masses[p];
            double prod = 1.0;
            for (double a : masses) prod *= a;
            double term = prod * pt.missed[x];
            // prod / mu[P_j] written as the product over the other blocks.
            for (std::size_t j = 0; j < masses.size(); ++j) {
                double others = 1.0;
                for (std::size_t i = 0; i < masses.size(); ++i) {
                    if (i != j) others *= masses[i];
                }
                term += others * pt.blocks[p][j][x];
            }
            if (options.log_domain) {
                acc.add(term);
            } else {
                s += term;
            }
        }
        m1[x] = options.log_domain ? mu[x] * std::exp(acc.log() - pt.log_sum) : mu[x] * s / pt.sum;
    }
    return m1;
}

double poisson_posterior_pgfl(const TestFunction& mu, const ObservationKernel& kernel, const MeasurementSet& z,
                              const TestFunction& eta, const UpdateOptions& options) {
    if (eta.size() != mu.size()) throw SpaceMismatch("poisson_posterior_pgfl: eta on the wrong space");
    const auto pt = poisson_terms(mu, kernel, z, options);
    double exponent = 0.0;
    for (std::size_t x = 0; x < mu.size(); ++x) exponent += mu[x] * (eta[x] - 1.0) * pt.missed[x];
    double numerator = 0.0;
    for (const auto& blocks : pt.blocks) {
        double prod = 1.0;
        for (const auto& inc : blocks) prod *= integrate(mu, pointwise_product(eta, inc));
        numerator += prod;
    }
    return std::exp(exponent) * numerator / pt.sum;
}

}  // namespace pgfl
