#include "pgfl/bayes.hpp"
#include "pgfl/combinatorics.hpp"
#include "pgfl/config.hpp"
#include "pgfl/errors.hpp"
#include "pgfl/serialization.hpp"
#include "pgfl/simulate.hpp"
#include "pgfl/verify.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitError = 1;
constexpr int kExitZeroEvidence = 2;

int run_command(const std::string& config_path, const std::string& out_dir, bool log_domain,
                std::optional<std::uint64_t> seed) {
    const auto config = pgfl::load_config_file(config_path);
    pgfl::RunOptions options;
    options.seed = seed;
    if (log_domain) options.log_domain = true;
    const auto result = pgfl::run(config, options);
    pgfl::write_run_outputs(out_dir, config, result, seed.value_or(config.seed));
    if (result.failed_step) {
        std::cerr << "stopped at step " << *result.failed_step << ": " << result.error << '\n';
        return result.status == pgfl::RunStatus::zero_evidence ? kExitZeroEvidence : kExitError;
    }
    return 0;
}

int update_command(const std::string& config_path, const std::string& measurements) {
    const auto config = pgfl::load_config_file(config_path);
    const auto z = pgfl::parse_measurements(config.observations, measurements);
    pgfl::UpdateOptions options;
    options.log_domain = config.log_domain;
    options.truncation_tol = config.truncation_tol;
    const auto post = pgfl::posterior_partition_clutter(config.prior, config.kernel, config.clutter_or_none(), z,
                                                        options);
    nlohmann::json out;
    out["log_evidence"] = post.log_evidence;
    nlohmann::json intensity = nlohmann::json::object();
    for (std::size_t x = 0; x < config.states.size(); ++x) intensity[config.states.label(x)] = post.intensity[x];
    out["intensity"] = std::move(intensity);
    out["cardinality"] = post.density.cardinality_distribution();
    out["posterior"] = pgfl::to_json(post.density);
    std::cout << out.dump(2) << '\n';
    return 0;
}

int verify_command(const std::string& level, std::uint64_t seed) {
    pgfl::VerifyOptions options;
    options.level = level == "full" ? pgfl::VerifyLevel::full : pgfl::VerifyLevel::fast;
    options.seed = seed;
    const auto report = pgfl::run_suite(options);
    pgfl::print_report(std::cout, report);
    return report.passed() ? 0 : kExitError;
}

int partitions_command(std::size_t m, std::optional<std::size_t> max_block) {
    std::size_t count = 0;
    for (auto stream = pgfl::partitions(m, max_block); stream.next(); ++count) {
        for (const auto& block : stream.current().blocks) {
            std::cout << '{';
            for (std::size_t i = 0; i < block.size(); ++i) std::cout << (i ? "," : "") << block[i];
            std::cout << '}';
        }
        std::cout << '\n';
    }
    std::cout << "count " << count << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-object Bayes filtering on finite spaces via p.g.fl. partition sums"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "simulate a scenario and filter it");
    std::string config_path;
    std::string out_dir;
    bool log_domain = false;
    std::optional<std::uint64_t> seed;
    run->add_option("--config", config_path, "scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--out-dir", out_dir, "directory for run.csv and summary.json")->required();
    run->add_flag("--log-domain", log_domain, "accumulate partition sums in log space");
    run->add_option("--seed", seed, "override the config seed");

    auto* update = app.add_subcommand("update", "one Bayes update of the configured prior");
    std::string measurements;
    update->add_option("--config", config_path, "scenario JSON")->required()->check(CLI::ExistingFile);
    update->add_option("--measurements", measurements, "comma-separated observation labels")->required();

    auto* verify = app.add_subcommand("verify", "run the oracle property suite");
    std::string level = "fast";
    std::uint64_t verify_seed = pgfl::VerifyOptions{}.seed;
    verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    verify->add_option("--seed", verify_seed, "seed for the random instances");

    auto* parts = app.add_subcommand("partitions", "list set partitions of {0..m-1}");
    std::size_t m = 0;
    std::optional<std::size_t> max_block;
    parts->add_option("--m", m, "set size")->required()->check(CLI::Range(0, 20));
    parts->add_option("--max-block", max_block, "largest block size")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_command(config_path, out_dir, log_domain, seed);
        if (*update) return update_command(config_path, measurements);
        if (*verify) return verify_command(level, verify_seed);
        if (*parts) return partitions_command(m, max_block);
    } catch (const pgfl::ZeroEvidence& e) {
        std::cerr << "zero evidence: " << e.what() << '\n';
        return kExitZeroEvidence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
