#include "pgfl/config.hpp"

#include "pgfl/errors.hpp"
#include "pgfl/serialization.hpp"

#include <fstream>
#include <sstream>

namespace pgfl {

namespace {

using nlohmann::json;

std::vector<double> vector_of(const json& j, std::size_t size, const std::string& what) {
    auto v = j.get<std::vector<double>>();
    if (v.size() != size) {
        throw ConfigError(what + ": expected " + std::to_string(size) + " entries, got " + std::to_string(v.size()));
    }
    return v;
}

MultiObjectDensity density_spec(const json& j, const FiniteSpace& space, std::optional<std::size_t> order,
                                double tail_tol, const std::string& what) {
    const std::string type = j.at("type").get<std::string>();
    MultiObjectDensity p = MultiObjectDensity::unit(space);
    if (type == "poisson") {
        PoissonSpec spec{TestFunction(vector_of(j.at("intensity"), space.size(), what + ".intensity")), tail_tol};
        std::optional<std::size_t> n = order;
        if (j.contains("n_max")) n = j.at("n_max").get<std::size_t>();
        p = poisson(space, spec, n);
    } else if (type == "bernoulli") {
        p = bernoulli(space, j.at("existence").get<double>(),
                      TestFunction(vector_of(j.at("density"), space.size(), what + ".density")));
    } else if (type == "explicit") {
        p = MultiObjectDensity(space, j.at("tensors").get<std::vector<std::vector<double>>>());
    } else if (type != "empty") {
        throw ConfigError(what + ": unknown type '" + type + "'");
    }
    if (!p.all_nonnegative()) throw ConfigError(what + ": negative entries");
    if (p.symmetry_defect() > 1e-12) throw ConfigError(what + ": tensors are not symmetric");
    if (p.truncation_mass() > tail_tol) {
        throw ConfigError(what + ": truncation drops " + format_double(p.truncation_mass()) +
                          " mass, above the tail tolerance; raise n_max or lower the intensity");
    }
    if (std::abs(p.total_mass() + p.truncation_mass() - 1.0) > 1e-10) throw ConfigError(what + ": not normalized");
    return p;
}

ObservationKernel kernel_spec(const json& j, const FiniteSpace& states, const FiniteSpace& obs) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "bernoulli_detection") {
        auto detection = vector_of(j.at("detection"), states.size(), "kernel.detection");
        auto likelihood = j.at("likelihood").get<std::vector<std::vector<double>>>();
        return ObservationKernel::bernoulli_detection(states, obs, detection, likelihood);
    }
    if (type == "explicit") {
        auto tables = j.at("tables").get<std::vector<std::vector<std::vector<double>>>>();
        if (tables.size() != states.size()) throw ConfigError("kernel.tables: one entry per state required");
        std::vector<MultiObjectDensity> per_state;
        for (auto& t : tables) per_state.emplace_back(obs, std::move(t));
        return ObservationKernel(states, obs, std::move(per_state));
    }
    throw ConfigError("kernel: unknown type '" + type + "'");
}

}  // namespace

ClutterProcess ScenarioConfig::clutter_or_none() const {
    return clutter ? *clutter : ClutterProcess::none(observations);
}

ScenarioConfig load_config(const json& doc) {
    try {
        const int version = doc.value("version", kConfigVersion);
        if (version != kConfigVersion) throw ConfigError("unsupported config version " + std::to_string(version));
        FiniteSpace states(doc.at("state_labels").get<std::vector<std::string>>());
        FiniteSpace obs(doc.at("observation_labels").get<std::vector<std::string>>());
        const auto n_max = doc.at("n_max").get<std::size_t>();

        double tail_tol = 1e-9;
        double truncation_tol = 1e-9;
        if (doc.contains("tolerances")) {
            tail_tol = doc["tolerances"].value("tail", tail_tol);
            truncation_tol = doc["tolerances"].value("truncation", truncation_tol);
        }

        auto prior = density_spec(doc.at("prior"), states, n_max, tail_tol, "prior");
        if (prior.n_max() > n_max) throw ConfigError("prior: order exceeds n_max");
        prior = prior.with_n_max(n_max);

        auto kernel = kernel_spec(doc.at("kernel"), states, obs);
        if (doc.contains("m_max") && doc["m_max"].get<std::size_t>() != kernel.m_max()) {
            throw ConfigError("m_max does not match the kernel tables");
        }

        std::optional<ClutterProcess> clutter;
        if (doc.contains("clutter") && !doc["clutter"].is_null()) {
            clutter.emplace(density_spec(doc["clutter"], obs, std::nullopt, tail_tol, "clutter"));
        }

        std::optional<MultiplicativeSpec> transition;
        if (doc.contains("transition") && !doc["transition"].is_null()) {
            const auto& t = doc["transition"];
            MultiplicativeSpec spec{vector_of(t.at("survival"), states.size(), "transition.survival"),
                                    t.at("motion").get<std::vector<std::vector<double>>>(),
                                    t.contains("birth") ? density_spec(t["birth"], states, n_max, tail_tol, "birth")
                                                        : MultiObjectDensity::unit(states)};
            // Surface spec violations now rather than at the first step.
            (void)build_multiplicative(spec, std::min<std::size_t>(n_max, 1), 1.0);
            transition = std::move(spec);
        }

        return ScenarioConfig{std::move(states),
                              std::move(obs),
                              n_max,
                              std::move(prior),
                              std::move(kernel),
                              std::move(clutter),
                              std::move(transition),
                              doc.value("steps", std::size_t{0}),
                              doc.value("seed", std::uint64_t{0}),
                              tail_tol,
                              truncation_tol,
                              doc.value("log_domain", false)};
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const SpaceMismatch& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ScenarioConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
    return load_config(doc);
}

MeasurementSet parse_measurements(const FiniteSpace& observations, const std::string& list) {
    MeasurementSet z;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        item = item.substr(b, item.find_last_not_of(" \t") - b + 1);
        if (auto idx = observations.find(item)) {
            z.points.push_back(*idx);
        } else {
            throw ConfigError("unknown measurement label '" + item + "'");
        }
    }
    return z;
}

}  // namespace pgfl
