#include "pgfl/verify.hpp"

#include "pgfl/combinatorics.hpp"
#include "pgfl/errors.hpp"
#include "pgfl/functional_calculus.hpp"
#include "pgfl/prediction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>

namespace pgfl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Limits {
    std::size_t instances;
    std::size_t max_dim;
    std::size_t max_n;
    std::size_t max_m;
    std::size_t max_group;
};

Limits limits_for(const VerifyOptions& options) {
    Limits l = options.level == VerifyLevel::fast ? Limits{40, 2, 3, 3, 2} : Limits{200, 3, 4, 4, 2};
    if (options.instances > 0) l.instances = options.instances;
    return l;
}

class Tally {
public:
    Tally(int criterion, std::string name, double tolerance) {
        result_.criterion = criterion;
        result_.name = std::move(name);
        result_.tolerance = tolerance;
    }

    void record(double error) {
        if (!std::isfinite(error)) {
            fail("non-finite error");
            return;
        }
        result_.max_error = std::max(result_.max_error, error);
    }
    void fail(const std::string& why) {
        ++result_.failures;
        if (result_.detail.empty()) result_.detail = why;
    }
    void count() { ++result_.instances; }
    void note(std::string detail) { result_.detail = std::move(detail); }

    CheckResult finish(double seconds) {
        result_.seconds = seconds;
        return result_;
    }

private:
    CheckResult result_;
};

double max_abs_difference(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = std::abs(a[i] - b[i]);
        if (!std::isfinite(e)) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, e);
    }
    return worst;
}

double tensor_difference(const MultiObjectDensity& p, const MultiObjectDensity& q) {
    for (const auto& t : p.tensors()) {
        for (double v : t) {
            if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        }
    }
    return pgfl::max_abs_difference(p, q);
}

bool bitwise_equal(const Posterior& a, const Posterior& b) {
    return a.density.tensors() == b.density.tensors() && a.intensity == b.intensity &&
           a.log_evidence == b.log_evidence;
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) { return lo + rng.below(hi - lo + 1); }

}  // namespace

bool SuiteReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

MultiObjectDensity random_density(const FiniteSpace& space, std::size_t n_max, Rng& rng, bool normalize,
                                  double zero_fraction) {
    const std::size_t d = space.size();
    std::vector<std::vector<double>> tensors(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        const std::size_t count = tuple_count(d, n);
        tensors[n].assign(count, 0.0);
        Tuple t(n, 0);
        for (std::size_t i = 0; i < count; ++i, next_tuple(t, d)) {
            if (std::is_sorted(t.begin(), t.end())) {
                const bool zero = rng.uniform() < zero_fraction;
                const double v = rng.uniform();
                tensors[n][i] = zero ? 0.0 : v;
            } else {
                Tuple s = t;
                std::sort(s.begin(), s.end());
                tensors[n][i] = tensors[n][encode_tuple(s, d)];
            }
        }
    }
    // Guarantee some mass.
    if (tensors[0][0] == 0.0) tensors[0][0] = 0.5;
    MultiObjectDensity p(space, std::move(tensors));
    return normalize ? p.scaled(1.0 / p.total_mass()) : p;
}

TestFunction random_function(std::size_t d, Rng& rng, double lo, double hi) {
    std::vector<double> v(d);
    for (auto& x : v) x = lo + (hi - lo) * rng.uniform();
    return TestFunction(std::move(v));
}

ObservationKernel random_kernel(const FiniteSpace& states, const FiniteSpace& observations, std::size_t m_max,
                                Rng& rng) {
    std::vector<MultiObjectDensity> per_state;
    for (std::size_t x = 0; x < states.size(); ++x) {
        const std::size_t order = x == 0 ? m_max : pick(rng, 0, m_max);
        per_state.push_back(random_density(observations, order, rng, true, 0.1));
    }
    return ObservationKernel(states, observations, std::move(per_state));
}

MeasurementSet random_measurements(std::size_t dz, std::size_t m, Rng& rng) {
    MeasurementSet z;
    for (std::size_t i = 0; i < m; ++i) z.points.push_back(rng.below(dz));
    return z;
}

MeasurementSet shuffled(const MeasurementSet& z, Rng& rng) {
    MeasurementSet out = z;
    for (std::size_t i = out.points.size(); i > 1; --i) std::swap(out.points[i - 1], out.points[rng.below(i)]);
    return out;
}

// ---- Partition-sum updates against the brute-force posterior ----

std::vector<CheckResult> check_partition_update(const VerifyOptions& options) {
    const Limits lim = limits_for(options);
    Rng rng(options.seed);

    enum Kind { kNone, kPoissonClutter, kExplicitClutter };
    Tally direct[3] = {{1, "partition posterior = brute-force posterior", 1e-10},
                       {2, "clutter posterior = brute-force (Poisson clutter)", 1e-10},
                       {2, "clutter posterior = brute-force (explicit clutter)", 1e-10}};
    Tally evidence(1, "log evidence = brute-force log evidence", 1e-10);
    Tally closed_vs_partition(3, "intensity formula = moment of partition posterior", 1e-9);
    Tally closed_vs_direct(3, "intensity formula = moment of brute-force posterior", 1e-9);
    Tally normalization(7, "posterior mass = 1", 1e-10);
    Tally permutation(7, "measurement permutation leaves results bitwise equal", 0.0);
    Tally pruning(7, "block-size pruning leaves results unchanged", 0.0);
    Tally log_domain(7, "log-domain update = linear-domain update", 1e-10);

    const auto start = Clock::now();
    double kind_seconds[3] = {0.0, 0.0, 0.0};
    for (int kind = kNone; kind <= kExplicitClutter; ++kind) {
        const auto kind_start = Clock::now();
        std::size_t done = 0;
        std::size_t attempts = 0;
        while (done < lim.instances && attempts < 50 * lim.instances) {
            ++attempts;
            const auto states = FiniteSpace::indexed(pick(rng, 1, lim.max_dim), "x");
            const auto obs = FiniteSpace::indexed(pick(rng, 1, lim.max_dim), "z");
            const std::size_t n_max = pick(rng, 1, lim.max_n);
            const std::size_t m = pick(rng, 0, lim.max_m);
            const auto prior = random_density(states, n_max, rng);
            const auto kernel = random_kernel(states, obs, pick(rng, 1, lim.max_group), rng);
            const auto z = random_measurements(obs.size(), m, rng);
            std::optional<ClutterProcess> clutter;
            if (kind == kPoissonClutter) {
                clutter.emplace(poisson(obs, {random_function(obs.size(), rng, 0.05, 0.5), 1e-12}, m));
            } else if (kind == kExplicitClutter) {
                clutter.emplace(random_density(obs, pick(rng, 0, m), rng, true, 0.1));
            }
            const ClutterProcess* cp = clutter ? &*clutter : nullptr;

            std::optional<Posterior> truth;
            try {
                truth = posterior_direct(prior, kernel, cp, z);
            } catch (const ZeroEvidence&) {
            }
            auto update = [&](const UpdateOptions& opts) {
                return cp ? posterior_partition_clutter(prior, kernel, *cp, z, opts)
                          : posterior_partition(prior, kernel, z, opts);
            };
            auto closed_intensity = [&](const MeasurementSet& zz) {
                return cp ? posterior_intensity_clutter(prior, kernel, *cp, zz) : posterior_intensity(prior, kernel, zz);
            };
            if (!truth) {
                // The partition sum must reject the same inputs.
                try {
                    update({});
                    direct[kind].fail("partition update accepted a zero-likelihood measurement set");
                } catch (const ZeroEvidence&) {
                }
                continue;
            }
            ++done;
            Posterior post = update({});
            direct[kind].count();
            direct[kind].record(tensor_difference(post.density, truth->density));
            if (kind == kNone) {
                evidence.count();
                evidence.record(std::abs(post.log_evidence - truth->log_evidence));
            }

            const auto formula = closed_intensity(z);
            closed_vs_partition.count();
            closed_vs_partition.record(max_abs_difference(formula, intensity(post.density)));
            closed_vs_partition.record(max_abs_difference(post.intensity, intensity(post.density)));
            closed_vs_direct.count();
            closed_vs_direct.record(max_abs_difference(formula, intensity(truth->density)));

            normalization.count();
            normalization.record(std::abs(post.density.total_mass() - 1.0));
            normalization.record(std::abs(truth->density.total_mass() - 1.0));

            const MeasurementSet permuted = shuffled(z, rng);
            permutation.count();
            const Posterior post_permuted = cp ? posterior_partition_clutter(prior, kernel, *cp, permuted)
                                               : posterior_partition(prior, kernel, permuted);
            if (!bitwise_equal(post, post_permuted)) permutation.fail("permuted measurements changed the posterior");

            UpdateOptions unpruned;
            unpruned.prune_blocks = false;
            const Posterior full = update(unpruned);
            pruning.count();
            pruning.record(tensor_difference(post.density, full.density));
            pruning.record(max_abs_difference(post.intensity, full.intensity));
            pruning.record(std::abs(post.log_evidence - full.log_evidence));

            UpdateOptions logs;
            logs.log_domain = true;
            const Posterior post_log = update(logs);
            log_domain.count();
            log_domain.record(tensor_difference(post.density, post_log.density));
            log_domain.record(max_abs_difference(post.intensity, post_log.intensity));
            log_domain.record(std::abs(post.log_evidence - post_log.log_evidence));
        }
        if (done < lim.instances) direct[kind].fail("too few instances with positive likelihood");
        kind_seconds[kind] = seconds_since(kind_start);
    }
    const double total = seconds_since(start);
    return {direct[0].finish(kind_seconds[0]),
            evidence.finish(kind_seconds[0]),
            direct[1].finish(kind_seconds[1]),
            direct[2].finish(kind_seconds[2]),
            closed_vs_partition.finish(total),
            closed_vs_direct.finish(total),
            normalization.finish(total),
            permutation.finish(total),
            pruning.finish(total),
            log_domain.finish(total)};
}

// ---- Poisson prior closed forms against the generic update ----

std::vector<CheckResult> check_poisson_closed_forms(const VerifyOptions& options) {
    const Limits lim = limits_for(options);
    const std::size_t instances = std::max<std::size_t>(lim.instances / 4, 10);
    Rng rng(options.seed + 1);

    Tally pgfl_eval(4, "Poisson posterior p.g.fl. = generic posterior p.g.fl.", 1e-10);
    Tally intensities(4, "Poisson posterior intensity = generic intensity", 1e-10);
    Tally tensors(4, "Poisson posterior tensors = generic tensors", 1e-10);
    Tally evidence(4, "Poisson log evidence = generic log evidence", 1e-10);
    Tally empty(4, "empty measurement set: intensity = mu * P_0", 1e-10);

    const auto start = Clock::now();
    std::size_t done = 0;
    std::size_t attempts = 0;
    while (done < instances && attempts < 50 * instances) {
        ++attempts;
        const auto states = FiniteSpace::indexed(pick(rng, 1, lim.max_dim), "x");
        const auto obs = FiniteSpace::indexed(pick(rng, 1, lim.max_dim), "z");
        const auto kernel = random_kernel(states, obs, pick(rng, 1, lim.max_group), rng);
        const auto mu = random_function(states.size(), rng, 0.01, 0.06);
        const std::size_t m = pick(rng, 0, lim.max_m);
        const auto z = random_measurements(obs.size(), m, rng);
        // Posterior cardinality exceeds m / m_max by a Poisson(mu[P_0]) count; the
        // margin keeps the truncated generic path far below the tolerance.
        const std::size_t n_max = m + 7;
        const auto prior = poisson(states, {mu, 0.0}, n_max);

        std::optional<Posterior> generic;
        try {
            generic = posterior_partition(prior, kernel, z);
        } catch (const ZeroEvidence&) {
            continue;
        }
        ++done;
        const Posterior closed = poisson_posterior(mu, kernel, z, n_max);

        pgfl_eval.count();
        for (int k = 0; k < 3; ++k) {
            const auto eta = random_function(states.size(), rng, 0.0, 1.0);
            pgfl_eval.record(std::abs(poisson_posterior_pgfl(mu, kernel, z, eta) - evaluate(generic->density, eta)));
        }
        intensities.count();
        intensities.record(max_abs_difference(poisson_posterior_intensity(mu, kernel, z), generic->intensity));
        intensities.record(max_abs_difference(closed.intensity, posterior_intensity(prior, kernel, z)));
        tensors.count();
        tensors.record(tensor_difference(closed.density, generic->density));
        evidence.count();
        evidence.record(std::abs(closed.log_evidence - generic->log_evidence));

        const auto p0 = kernel.missed();
        std::vector<double> expected(states.size());
        for (std::size_t x = 0; x < expected.size(); ++x) expected[x] = mu[x] * p0[x];
        empty.count();
        empty.record(max_abs_difference(poisson_posterior_intensity(mu, kernel, {}), expected));
        empty.record(max_abs_difference(posterior_intensity(prior, kernel, {}), expected));
    }
    if (done < instances) pgfl_eval.fail("too few instances with positive likelihood");
    const double s = seconds_since(start);
    return {pgfl_eval.finish(s), intensities.finish(s), tensors.finish(s), evidence.finish(s), empty.finish(s)};
}

// ---- Single-measurement kernels reduce to the PHD corrector ----

CheckResult check_phd_recovery(const VerifyOptions& options) {
    const Limits lim = limits_for(options);
    const std::size_t instances = std::max<std::size_t>(lim.instances / 4, 10);
    Rng rng(options.seed + 2);
    Tally tally(5, "posterior intensity = PHD corrector formula", 1e-10);

    const auto start = Clock::now();
    for (std::size_t i = 0; i < instances; ++i) {
        const auto states = FiniteSpace::indexed(pick(rng, 1, lim.max_dim), "x");
        const auto obs = FiniteSpace::indexed(pick(rng, 1, lim.max_dim), "z");
        const std::size_t dx = states.size();
        const std::size_t dz = obs.size();
        const auto detection = random_function(dx, rng, 0.3, 0.95).values;
        std::vector<std::vector<double>> likelihood(dx);
        for (auto& row : likelihood) {
            row = random_function(dz, rng, 0.05, 1.0).values;
            const double s = std::accumulate(row.begin(), row.end(), 0.0);
            for (auto& v : row) v /= s;
        }
        const auto kernel = ObservationKernel::bernoulli_detection(states, obs, detection, likelihood);
        const auto mu = random_function(dx, rng, 0.01, 0.06);
        const auto kappa = random_function(dz, rng, 0.05, 0.5);
        const std::size_t m = pick(rng, 0, lim.max_m);
        const auto z = random_measurements(dz, m, rng);
        const auto prior = poisson(states, {mu, 0.0}, m + 7);
        const ClutterProcess clutter(poisson(obs, {kappa, 0.0}, m));

        std::vector<double> expected(dx);
        for (std::size_t x = 0; x < dx; ++x) expected[x] = (1.0 - detection[x]) * mu[x];
        for (auto zi : z.points) {
            double denom = kappa[zi];
            for (std::size_t x = 0; x < dx; ++x) denom += detection[x] * likelihood[x][zi] * mu[x];
            for (std::size_t x = 0; x < dx; ++x) expected[x] += detection[x] * likelihood[x][zi] * mu[x] / denom;
        }
        tally.count();
        tally.record(max_abs_difference(posterior_intensity_clutter(prior, kernel, clutter, z), expected));
        tally.record(max_abs_difference(posterior_partition_clutter(prior, kernel, clutter, z).intensity, expected));
    }
    return tally.finish(seconds_since(start));
}

// ---- Functional calculus rules ----

std::vector<CheckResult> check_functional_calculus(const VerifyOptions& options) {
    const Limits lim = limits_for(options);
    const std::size_t instances = std::max<std::size_t>(lim.instances / 4, 10);
    Rng rng(options.seed + 3);

    Tally chain(6, "composite variations (partition sum) = symbolic composition", 1e-9);
    Tally product(6, "product rule = numeric differential", 1e-8);
    Tally recursion(6, "variation of a variation = numeric differential", 1e-8);
    Tally janossy_check(6, "Janossy densities = numeric variations at 0", 1e-8);

    auto increments = [&](std::size_t d, std::size_t n) {
        IncrementList out;
        for (std::size_t i = 0; i < n; ++i) out.push_back(random_function(d, rng, -1.0, 1.0));
        return out;
    };

    const auto start = Clock::now();
    for (std::size_t i = 0; i < instances; ++i) {
        const auto in_space = FiniteSpace::indexed(pick(rng, 1, lim.max_dim), "y");
        const auto out_space = FiniteSpace::indexed(pick(rng, 1, lim.max_dim), "x");
        const std::size_t di = in_space.size();

        // Composition of an outer tensor functional with a tensor mapping.
        const auto outer = random_density(out_space, pick(rng, 1, 3), rng, true, 0.0);
        std::vector<MultiObjectDensity> inner;
        for (std::size_t x = 0; x < out_space.size(); ++x) {
            inner.push_back(random_density(in_space, pick(rng, 0, 2), rng, true, 0.0));
        }
        MultiObjectDensity composed(in_space, 0);
        for (std::size_t n = 0; n <= outer.n_max(); ++n) {
            Tuple t(n, 0);
            std::size_t idx = 0;
            do {
                const double c = outer.tensor(n)[idx++] / factorial(n);
                if (c == 0.0) continue;
                MultiObjectDensity term = MultiObjectDensity::unit(in_space);
                for (auto x : t) term = superpose(term, inner[x]);
                composed = linear_combination(1.0, composed, c, term);
            } while (next_tuple(t, out_space.size()));
        }
        const auto y = random_function(di, rng, 0.0, 1.0);
        const auto f_outer = tensor_functional(outer);
        const auto g_inner = tensor_mapping(inner);
        for (std::size_t n = 0; n <= 4; ++n) {
            const auto incs = increments(di, n);
            chain.record(std::abs(faa_di_bruno(f_outer, g_inner, y, incs) - differential(composed, y, incs)));
        }
        chain.count();

        // Product rule against finite differences.
        const auto f = tensor_functional(random_density(in_space, pick(rng, 1, 3), rng));
        const auto g = tensor_functional(random_density(in_space, pick(rng, 1, 3), rng));
        const auto fg = product_black_box(f, g);
        for (std::size_t n = 1; n <= 4; ++n) {
            const auto incs = increments(di, n);
            product.record(std::abs(leibniz(f, g, y, incs) - numeric_differential(fg, y, incs)));
        }
        product.count();

        // Variation of f'(g(y); h_1(y), ..) along eta, h_i fixed or inner variations.
        const auto h_space = out_space;
        const auto f_out = tensor_functional(random_density(h_space, pick(rng, 1, 3), rng));
        std::vector<InnerIncrement> incs;
        const std::size_t k = pick(rng, 0, 3);
        for (std::size_t j = 0; j < k; ++j) {
            if (rng.uniform() < 0.5) {
                incs.push_back(InnerIncrement::fixed(random_function(h_space.size(), rng, -1.0, 1.0)));
            } else {
                incs.push_back(InnerIncrement::inner_variation(increments(di, pick(rng, 1, 2))));
            }
        }
        BlackBoxFunctional outer_variation{di, [&](const TestFunction& at) {
                                               IncrementList values;
                                               for (const auto& inc : incs) values.push_back(inc.value(g_inner, at));
                                               return f_out.variation(g_inner(at), values);
                                           }};
        const auto eta = random_function(di, rng, -1.0, 1.0);
        const TestFunction etas[] = {eta};
        recursion.record(std::abs(differential_of_variation(f_out, g_inner, y, incs, eta) -
                                  numeric_differential(outer_variation, y, etas)));
        recursion.count();

        // Janossy densities are variations at the zero function.
        const auto p = random_density(in_space, pick(rng, 1, 4), rng);
        const auto bb = tensor_functional(p).black_box();
        const auto zero = TestFunction::constant(di, 0.0);
        for (std::size_t n = 0; n <= std::min<std::size_t>(p.n_max(), 4); ++n) {
            Tuple t(n, 0);
            do {
                IncrementList dirac;
                for (auto x : t) dirac.push_back(TestFunction::one_hot(di, x));
                janossy_check.record(std::abs(numeric_differential(bb, zero, dirac) - janossy(p, t)));
            } while (next_tuple(t, di));
        }
        janossy_check.count();
    }
    const double s = seconds_since(start);
    return {chain.finish(s), product.finish(s), recursion.finish(s), janossy_check.finish(s)};
}

// ---- Prediction ----

std::vector<CheckResult> check_prediction(const VerifyOptions& options) {
    const Limits lim = limits_for(options);
    const std::size_t instances = std::max<std::size_t>(lim.instances / 8, 8);
    Rng rng(options.seed + 4);

    Tally tables(8, "transition tables sum to 1 over targets", 1e-9);
    Tally mass(8, "predicted process has mass 1", 1e-9);
    Tally poisson_io(8, "Poisson in: predicted intensity = b + sum p_S f mu", 1e-9);

    auto random_motion = [&](std::size_t d) {
        std::vector<std::vector<double>> motion(d);
        for (auto& row : motion) {
            row = random_function(d, rng, 0.0, 1.0).values;
            const double s = std::accumulate(row.begin(), row.end(), 0.0);
            for (auto& v : row) v /= s;
        }
        return motion;
    };

    const auto start = Clock::now();
    for (std::size_t i = 0; i < instances; ++i) {
        const auto space = FiniteSpace::indexed(pick(rng, 1, lim.max_dim), "x");
        const std::size_t d = space.size();
        const std::size_t n_post = pick(rng, 1, 3);
        const std::size_t n_birth = pick(rng, 0, 2);
        const auto posterior = random_density(space, n_post, rng);
        MultiplicativeSpec spec{random_function(d, rng, 0.2, 0.95).values, random_motion(d),
                                random_density(space, n_birth, rng)};
        const auto model = build_multiplicative(spec, n_post + n_birth);
        tables.count();
        tables.record(model.normalization_defect());
        mass.count();
        mass.record(std::abs(predict(posterior, model).total_mass() - 1.0));
    }

    const std::size_t poisson_instances = std::max<std::size_t>(instances / 2, 4);
    for (std::size_t i = 0; i < poisson_instances; ++i) {
        const auto space = FiniteSpace::indexed(2, "x");
        const auto mu = random_function(2, rng, 0.0, 0.03);
        const auto b = random_function(2, rng, 0.0, 0.02);
        MultiplicativeSpec spec{random_function(2, rng, 0.2, 0.95).values, random_motion(2),
                                poisson(space, {b, 0.0}, 5)};
        const auto model = build_multiplicative(spec, 8);
        const auto predicted = predict(poisson(space, {mu, 0.0}, 5), model);
        std::vector<double> expected = b.values;
        for (std::size_t x = 0; x < 2; ++x) {
            for (std::size_t y = 0; y < 2; ++y) expected[x] += spec.survival[y] * spec.motion[y][x] * mu[y];
        }
        poisson_io.count();
        poisson_io.record(max_abs_difference(intensity(predicted), expected));
    }
    const double s = seconds_since(start);
    return {tables.finish(s), mass.finish(s), poisson_io.finish(s)};
}

// ---- One large clutter-aware update ----

CheckResult check_large_update(const VerifyOptions& options) {
    Rng rng(options.seed + 5);
    Tally tally(9, "m=8, m_max=2 clutter update wall time [s]", 1.0);
    const auto states = FiniteSpace::indexed(3, "x");
    const auto obs = FiniteSpace::indexed(3, "z");
    const std::size_t m = 8;
    const auto prior = random_density(states, 4, rng, true, 0.0);
    const auto kernel = random_kernel(states, obs, 2, rng);
    const ClutterProcess clutter(poisson(obs, {random_function(3, rng, 0.2, 0.6), 0.0}, m));
    const auto z = random_measurements(3, m, rng);

    const auto start = Clock::now();
    const Posterior post = posterior_partition_clutter(prior, kernel, clutter, z);
    const double elapsed = seconds_since(start);
    tally.count();
    tally.record(elapsed);
    if (std::abs(post.density.total_mass() - 1.0) > 1e-10) tally.fail("posterior not normalized");

    std::size_t pruned_partitions = 0;
    for (auto stream = partitions(m, 2); stream.next();) ++pruned_partitions;
    const std::size_t terms = update_term_count(kernel, &clutter, z);
    char buf[160];
    std::snprintf(buf, sizeof buf, "partitions %zu of Bell(8)=%llu; clutter terms %zu of Bell(9)=%llu",
                  pruned_partitions, static_cast<unsigned long long>(bell(8)), terms,
                  static_cast<unsigned long long>(bell(9)));
    tally.note(buf);
    if (pruned_partitions >= bell(8) / 4) tally.fail("pruning ineffective");
    return tally.finish(elapsed);
}

SuiteReport run_suite(const VerifyOptions& options) {
    SuiteReport report;
    const auto start = Clock::now();
    auto append = [&](std::vector<CheckResult> more) {
        for (auto& c : more) report.checks.push_back(std::move(c));
    };
    append(check_partition_update(options));
    append(check_poisson_closed_forms(options));
    report.checks.push_back(check_phd_recovery(options));
    append(check_functional_calculus(options));
    append(check_prediction(options));
    report.checks.push_back(check_large_update(options));
    std::stable_sort(report.checks.begin(), report.checks.end(),
                     [](const CheckResult& a, const CheckResult& b) { return a.criterion < b.criterion; });
    report.seconds = seconds_since(start);
    return report;
}

void print_report(std::ostream& out, const SuiteReport& report) {
    char line[512];
    for (const auto& c : report.checks) {
        std::snprintf(line, sizeof line, "%s [%d] %-62s max_err=%.3e tol=%.1e n=%zu %.2fs", c.passed() ? "PASS" : "FAIL",
                      c.criterion, c.name.c_str(), c.max_error, c.tolerance, c.instances, c.seconds);
        out << line;
        if (!c.detail.empty()) out << "  (" << c.detail << ')';
        out << '\n';
    }
    std::snprintf(line, sizeof line, "%s: %zu checks in %.2fs", report.passed() ? "ALL PASS" : "FAILURES",
                  report.checks.size(), report.seconds);
    out << line << '\n';
}

}  // namespace pgfl
