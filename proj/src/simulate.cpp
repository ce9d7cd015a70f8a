#include "pgfl/simulate.hpp"

#include "pgfl/errors.hpp"
#include "pgfl/serialization.hpp"

#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pgfl {

std::size_t Rng::categorical(std::span<const double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw std::invalid_argument("categorical: weights sum to zero");
    const double u = uniform() * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last = i;
        if (u < acc) return i;
    }
    return last;
}

Tuple sample_configuration(const MultiObjectDensity& p, Rng& rng) {
    const double total = p.total_mass();
    if (!(total > 0.0)) throw std::invalid_argument("sample_configuration: process has no mass");
    const double u = rng.uniform() * total;
    const std::size_t d = p.dim();
    double acc = 0.0;
    Tuple last;
    for (std::size_t n = 0; n <= p.n_max(); ++n) {
        const double inv_fact = 1.0 / factorial(n);
        Tuple t(n, 0);
        std::size_t idx = 0;
        do {
            const double w = p.tensor(n)[idx++] * inv_fact;
            if (w <= 0.0) continue;
            acc += w;
            last = t;
            if (u < acc) return t;
        } while (next_tuple(t, d));
    }
    return last;
}

namespace {

Tuple evolve(const ScenarioConfig& config, const Tuple& current, Rng& rng) {
    if (!config.transition) return current;
    const auto& spec = *config.transition;
    Tuple next;
    for (auto y : current) {
        if (rng.uniform() < spec.survival[y]) next.push_back(rng.categorical(spec.motion[y]));
    }
    for (auto x : sample_configuration(spec.birth, rng)) next.push_back(x);
    return next;
}

MeasurementSet measure(const ScenarioConfig& config, const ClutterProcess& clutter, const Tuple& truth, Rng& rng) {
    MeasurementSet z;
    for (auto x : truth) {
        for (auto p : sample_configuration(config.kernel.conditional(x), rng)) z.points.push_back(p);
    }
    for (auto p : sample_configuration(clutter.density(), rng)) z.points.push_back(p);
    return z;
}

Simulation simulate_with_seed(const ScenarioConfig& config, std::uint64_t seed) {
    Rng rng(seed);
    const ClutterProcess clutter = config.clutter_or_none();
    Simulation sim;
    sim.truth.push_back(sample_configuration(config.prior, rng));
    for (std::size_t t = 1; t <= config.steps; ++t) {
        sim.truth.push_back(evolve(config, sim.truth.back(), rng));
        sim.measurements.push_back(measure(config, clutter, sim.truth.back(), rng));
    }
    return sim;
}

RunRecord make_record(std::size_t step, MeasurementSet z, double log_evidence, std::vector<double> intensity,
                      const MultiObjectDensity& density) {
    RunRecord r{step, std::move(z), log_evidence, std::move(intensity), density.cardinality_distribution(), 0};
    for (std::size_t n = 1; n < r.cardinality.size(); ++n) {
        if (r.cardinality[n] > r.cardinality[r.map_cardinality]) r.map_cardinality = n;
    }
    return r;
}

nlohmann::json labels_of(const FiniteSpace& space, std::span<const std::size_t> points) {
    auto j = nlohmann::json::array();
    for (auto p : points) j.push_back(space.label(p));
    return j;
}

}  // namespace

Simulation simulate(const ScenarioConfig& config) { return simulate_with_seed(config, config.seed); }

RunResult run(const ScenarioConfig& config, const RunOptions& options) {
    const std::uint64_t seed = options.seed.value_or(config.seed);
    UpdateOptions update;
    update.log_domain = options.log_domain.value_or(config.log_domain);
    update.truncation_tol = config.truncation_tol;

    RunResult result;
    result.simulation = simulate_with_seed(config, seed);
    std::optional<TransitionModel> model;
    if (config.transition) model = build_multiplicative(*config.transition, config.n_max, config.truncation_tol);
    const ClutterProcess clutter = config.clutter_or_none();

    MultiObjectDensity current = config.prior;
    result.records.push_back(make_record(0, {}, 0.0, intensity(current), current));
    for (std::size_t t = 1; t <= config.steps; ++t) {
        const MeasurementSet& z = result.simulation.measurements[t - 1];
        try {
            const MultiObjectDensity predicted = model ? predict(current, *model, config.truncation_tol) : current;
            Posterior post = posterior_partition_clutter(predicted, config.kernel, clutter, z, update);
            result.records.push_back(make_record(t, z, post.log_evidence, std::move(post.intensity), post.density));
            current = std::move(post.density);
        } catch (const ZeroEvidence& e) {
            result.status = RunStatus::zero_evidence;
            result.failed_step = t;
            result.error = e.what();
            break;
        } catch (const TruncationOverflow& e) {
            result.status = RunStatus::truncation_overflow;
            result.failed_step = t;
            result.error = e.what();
            break;
        }
    }
    return result;
}

std::string records_csv(const ScenarioConfig& config, const std::vector<RunRecord>& records) {
    std::ostringstream out;
    out << "step,log_evidence";
    for (const auto& l : config.states.labels()) out << ",intensity_" << l;
    for (std::size_t n = 0; n <= config.n_max; ++n) out << ",card_" << n;
    out << '\n';
    for (const auto& r : records) {
        out << r.step << ',' << format_double(r.log_evidence);
        for (double v : r.intensity) out << ',' << format_double(v);
        for (std::size_t n = 0; n <= config.n_max; ++n) {
            out << ',' << format_double(n < r.cardinality.size() ? r.cardinality[n] : 0.0);
        }
        out << '\n';
    }
    return out.str();
}

std::string summary_json(const ScenarioConfig& config, const RunResult& result, std::uint64_t seed) {
    nlohmann::json j;
    j["version"] = kConfigVersion;
    j["seed"] = seed;
    j["steps"] = config.steps;
    j["state_labels"] = config.states.labels();
    j["observation_labels"] = config.observations.labels();
    auto records = nlohmann::json::array();
    for (const auto& r : result.records) {
        nlohmann::json rec;
        rec["step"] = r.step;
        rec["measurements"] = labels_of(config.observations, r.measurements.points);
        rec["truth"] = labels_of(config.states, result.simulation.truth.at(r.step));
        rec["log_evidence"] = r.log_evidence;
        rec["map_cardinality"] = r.map_cardinality;
        rec["expected_cardinality"] = std::accumulate(r.intensity.begin(), r.intensity.end(), 0.0);
        records.push_back(std::move(rec));
    }
    j["records"] = std::move(records);
    if (result.failed_step) {
        j["status"] = result.status == RunStatus::zero_evidence ? "zero_evidence" : "truncation_overflow";
        j["failed_step"] = *result.failed_step;
        j["failed_measurements"] =
            labels_of(config.observations, result.simulation.measurements.at(*result.failed_step - 1).points);
        j["error"] = result.error;
    } else {
        j["status"] = "ok";
    }
    return j.dump(2) + "\n";
}

void write_run_outputs(const std::filesystem::path& out_dir, const ScenarioConfig& config, const RunResult& result,
                       std::uint64_t seed) {
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir / "run.csv", std::ios::binary);
    csv << records_csv(config, result.records);
    std::ofstream summary(out_dir / "summary.json", std::ios::binary);
    summary << summary_json(config, result, seed);
    if (!csv || !summary) throw Error("failed to write outputs to '" + out_dir.string() + "'");
}

}  // namespace pgfl
