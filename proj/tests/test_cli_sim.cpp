#include "pgfl/config.hpp"
#include "pgfl/errors.hpp"
#include "pgfl/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace pgfl;
using nlohmann::json;

namespace {

json base_config() {
    return json::parse(R"({
      "version": 1,
      "state_labels": ["a", "b"],
      "observation_labels": ["u", "v", "w"],
      "n_max": 7,
      "prior": {"type": "poisson", "intensity": [0.3, 0.2]},
      "kernel": {"type": "bernoulli_detection", "detection": [0.9, 0.7],
                 "likelihood": [[0.6, 0.3, 0.1], [0.1, 0.2, 0.7]]},
      "clutter": {"type": "poisson", "intensity": [0.1, 0.1, 0.1]},
      "transition": {"survival": [0.9, 0.8], "motion": [[0.9, 0.1], [0.2, 0.8]],
                     "birth": {"type": "poisson", "intensity": [0.05, 0.05]}},
      "steps": 5,
      "seed": 3,
      "tolerances": {"tail": 1e-6, "truncation": 1e-6}
    })");
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Config, LoadsShippedScenarios) {
    for (const char* name : {"phd_demo.json", "extended_targets.json"}) {
        const auto cfg = load_config_file(std::filesystem::path(PGFL_SOURCE_DIR) / "scenarios" / name);
        EXPECT_GT(cfg.steps, 0u) << name;
        EXPECT_TRUE(cfg.clutter.has_value()) << name;
    }
}

TEST(Config, RejectsInvalidDocuments) {
    auto bad = base_config();
    bad["version"] = 2;
    EXPECT_THROW(load_config(bad), ConfigError);
    bad = base_config();
    bad["kernel"]["likelihood"][0] = {0.6, 0.6, 0.1};
    EXPECT_THROW(load_config(bad), ConfigError);
    bad = base_config();
    bad["prior"]["intensity"] = {3.0, 3.0};
    EXPECT_THROW(load_config(bad), ConfigError);
    bad = base_config();
    bad["transition"]["motion"][0] = {0.5, 0.1};
    EXPECT_THROW(load_config(bad), ConfigError);
    bad = base_config();
    bad["m_max"] = 2;
    EXPECT_THROW(load_config(bad), ConfigError);
    bad = base_config();
    bad.erase("state_labels");
    EXPECT_THROW(load_config(bad), ConfigError);
    EXPECT_THROW(load_config_file("/nonexistent/config.json"), ConfigError);
}

TEST(Config, ParsesMeasurements) {
    const auto cfg = load_config(base_config());
    EXPECT_EQ(parse_measurements(cfg.observations, "w, u,w").points, (std::vector<std::size_t>{2, 0, 2}));
    EXPECT_TRUE(parse_measurements(cfg.observations, "").points.empty());
    EXPECT_THROW(parse_measurements(cfg.observations, "u,x"), ConfigError);
}

TEST(Simulate, DeterministicGivenSeed) {
    auto cfg = load_config(base_config());
    const auto a = simulate(cfg);
    const auto b = simulate(cfg);
    EXPECT_EQ(a.truth, b.truth);
    ASSERT_EQ(a.measurements.size(), cfg.steps);
    for (std::size_t t = 0; t < cfg.steps; ++t) EXPECT_EQ(a.measurements[t].points, b.measurements[t].points);
}

TEST(Simulate, MissedDetectionsOnlyLeaveClutter) {
    auto doc = base_config();
    doc["kernel"] = json::parse(R"({"type": "explicit", "tables": [[[1.0]], [[1.0]]]})");
    doc.erase("clutter");
    doc["steps"] = 200;
    const auto sim = simulate(load_config(doc));
    for (const auto& z : sim.measurements) EXPECT_TRUE(z.points.empty());
}

TEST(Simulate, EmpiricalMeanMeasurementCount) {
    // Fresh Poisson objects each step: E|Z| = sum_x E[group size | x] b(x) + clutter mean.
    auto doc = base_config();
    doc["transition"]["survival"] = {0.0, 0.0};
    doc["transition"]["birth"]["intensity"] = {0.6, 0.4};
    doc["n_max"] = 10;
    doc["kernel"] = json::parse(R"({"type": "explicit", "tables": [
        [[0.2], [0.3, 0.1, 0.1], [0.1, 0.1, 0.0, 0.1, 0.3, 0.0, 0.0, 0.0, 0.0]],
        [[0.5], [0.1, 0.1, 0.2], [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.2]]]})");
    doc["steps"] = 10000;
    const auto cfg = load_config(doc);
    const auto sim = simulate(cfg);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& z : sim.measurements) {
        const double n = static_cast<double>(z.size());
        sum += n;
        sum_sq += n * n;
    }
    const double steps = static_cast<double>(sim.measurements.size());
    const double mean = sum / steps;
    const double se = std::sqrt((sum_sq / steps - mean * mean) / steps);
    const double expected = cfg.kernel.mean_group_size(0) * 0.6 + cfg.kernel.mean_group_size(1) * 0.4 + 0.3;
    EXPECT_NEAR(mean, expected, 3.0 * se);
}

TEST(Run, ByteIdenticalOutputs) {
    const auto cfg = load_config(base_config());
    const auto a = run(cfg);
    const auto b = run(cfg);
    EXPECT_EQ(records_csv(cfg, a.records), records_csv(cfg, b.records));
    EXPECT_EQ(summary_json(cfg, a, cfg.seed), summary_json(cfg, b, cfg.seed));

    const auto dir = std::filesystem::temp_directory_path() / "pgfl_run_test";
    write_run_outputs(dir / "one", cfg, a, cfg.seed);
    write_run_outputs(dir / "two", cfg, b, cfg.seed);
    EXPECT_EQ(slurp(dir / "one" / "run.csv"), slurp(dir / "two" / "run.csv"));
    EXPECT_EQ(slurp(dir / "one" / "summary.json"), slurp(dir / "two" / "summary.json"));
    std::filesystem::remove_all(dir);
}

TEST(Run, CsvLayoutAndCardinality) {
    const auto cfg = load_config(base_config());
    const auto result = run(cfg);
    ASSERT_EQ(result.status, RunStatus::ok);
    ASSERT_EQ(result.records.size(), cfg.steps + 1);
    const auto csv = records_csv(cfg, result.records);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "step,log_evidence,intensity_a,intensity_b,card_0,card_1,card_2,card_3,card_4,card_5,card_6,card_7");
    for (const auto& r : result.records) {
        double s = 0.0;
        for (double c : r.cardinality) s += c;
        EXPECT_NEAR(s, 1.0, 1e-6);  // the prior keeps its truncated tail
        if (r.step > 0) {
            EXPECT_NEAR(s, 1.0, 1e-9);
        }
    }
}

TEST(Run, ClutterDisabledEqualsEmptyClutter) {
    auto without = base_config();
    without.erase("clutter");
    auto empty = base_config();
    empty["clutter"] = json::parse(R"({"type": "empty"})");
    const auto a_cfg = load_config(without);
    const auto b_cfg = load_config(empty);
    const auto a = run(a_cfg);
    const auto b = run(b_cfg);
    EXPECT_EQ(records_csv(a_cfg, a.records), records_csv(b_cfg, b.records));
    EXPECT_EQ(summary_json(a_cfg, a, 3), summary_json(b_cfg, b, 3));
}

TEST(Run, ZeroStepsRecordsPriorOnly) {
    auto doc = base_config();
    doc["steps"] = 0;
    const auto cfg = load_config(doc);
    const auto result = run(cfg);
    ASSERT_EQ(result.records.size(), 1u);
    EXPECT_EQ(result.records[0].step, 0u);
    EXPECT_NEAR(result.records[0].intensity[0], 0.3, 1e-6);
}

TEST(Run, NoObjectsMeansZeroIntensity) {
    auto doc = base_config();
    doc["prior"]["intensity"] = {0.0, 0.0};
    doc.erase("transition");
    doc["steps"] = 20;
    const auto cfg = load_config(doc);
    const auto result = run(cfg);
    ASSERT_EQ(result.status, RunStatus::ok);
    for (const auto& r : result.records) {
        for (double v : r.intensity) EXPECT_EQ(v, 0.0);
    }
}

TEST(Run, SeedOverrideAndLogDomain) {
    const auto cfg = load_config(base_config());
    RunOptions options;
    options.seed = cfg.seed;
    options.log_domain = true;
    const auto a = run(cfg);
    const auto b = run(cfg, options);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_NEAR(a.records[i].log_evidence, b.records[i].log_evidence, 1e-12);
        for (std::size_t x = 0; x < 2; ++x) EXPECT_NEAR(a.records[i].intensity[x], b.records[i].intensity[x], 1e-12);
    }
}

TEST(Run, TruncationOverflowIsReported) {
    auto doc = base_config();
    doc["n_max"] = 1;
    doc["prior"] = json::parse(R"({"type": "bernoulli", "existence": 1.0, "density": [1.0, 0.0]})");
    doc["transition"] = json::parse(R"({"survival": [1.0, 1.0], "motion": [[1.0, 0.0], [0.0, 1.0]],
        "birth": {"type": "bernoulli", "existence": 1.0, "density": [0.0, 1.0]}})");
    const auto cfg = load_config(doc);
    const auto result = run(cfg);
    EXPECT_EQ(result.status, RunStatus::truncation_overflow);
    EXPECT_EQ(result.failed_step, 1u);
    EXPECT_EQ(result.records.size(), 1u);
    const auto summary = json::parse(summary_json(cfg, result, cfg.seed));
    EXPECT_EQ(summary["status"], "truncation_overflow");
    EXPECT_EQ(summary["failed_step"], 1);
}
