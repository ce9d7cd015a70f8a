#include "pgfl/serialization.hpp"

#include "pgfl/errors.hpp"

#include <cstdio>

namespace pgfl {

nlohmann::json to_json(const MultiObjectDensity& p) {
    nlohmann::json j;
    j["labels"] = p.space().labels();
    j["n_max"] = p.n_max();
    j["truncation_mass"] = p.truncation_mass();
    j["tensors"] = p.tensors();
    return j;
}

MultiObjectDensity density_from_json(const nlohmann::json& j) {
    try {
        FiniteSpace space(j.at("labels").get<std::vector<std::string>>());
        auto tensors = j.at("tensors").get<std::vector<std::vector<double>>>();
        if (j.contains("n_max") && j.at("n_max").get<std::size_t>() + 1 != tensors.size()) {
            throw ConfigError("density: n_max does not match the number of tensors");
        }
        return MultiObjectDensity(std::move(space), std::move(tensors), j.value("truncation_mass", 0.0));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("density: ") + e.what());
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace pgfl
