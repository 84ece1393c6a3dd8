#include "osmd/runner.hpp"
#include "osmd/suites.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <thread>

namespace {

int default_workers() {
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void report(const osmd::RunConfig& config, const osmd::ExperimentResult& result, const std::filesystem::path& dir) {
    for (const auto& algo : result.algorithms) {
        const auto stats = osmd::summarize(algo.traces);
        if (stats.empty()) continue;
        std::printf("%-24s eta %-12.6g final mean regret %.6g (std %.4g, %d runs)\n", algo.name.c_str(), algo.eta.eta,
                    stats.back().mean, stats.back().std, stats.back().runs);
    }
    std::printf("%s: results in %s\n", config.experiment.c_str(), dir.string().c_str());
}

int run_and_write(const osmd::RunConfig& config, int workers) {
    const auto result = osmd::execute(config, workers);
    report(config, result, osmd::write_results(config, result));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online stochastic mirror descent and modified Thompson sampling experiments"};
    app.require_subcommand(1);
    int workers = default_workers();
    app.add_option("--workers", workers, "Worker threads for independent runs")->check(CLI::PositiveNumber);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
    run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    int repeats = 100, horizon = 100000;
    std::uint64_t seed = 0;
    std::string out = "results";
    auto* fig1 = app.add_subcommand("fig1", "Plain vs shifted 1/2-Tsallis INF on five Bernoulli arms");
    fig1->add_option("--repeats", repeats, "Independent runs")->check(CLI::PositiveNumber);
    fig1->add_option("--horizon", horizon, "Rounds per run")->check(CLI::PositiveNumber);
    fig1->add_option("--seed", seed, "Master seed");
    fig1->add_option("--out", out, "Output directory");
    fig1->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep", "Run every variant of a sweep config");
    sweep->add_option("--config", config_path, "Sweep config file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    std::string suite;
    auto* check = app.add_subcommand("check", "Run an inequality suite");
    check->add_option("--suite", suite, "unbiased, exp3, lemma4, graph, lp, bayes or all")->required();
    check->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_and_write(osmd::load_run_config(config_path), workers);
        if (fig1->parsed()) return run_and_write(osmd::fig1_config(repeats, horizon, seed, out), workers);
        if (sweep->parsed()) {
            for (const auto& config : osmd::load_sweep_config(config_path)) run_and_write(config, workers);
            return 0;
        }
        if (check->parsed()) {
            bool ok = true;
            for (const auto& result : osmd::run_suite(suite, workers)) {
                for (const auto& c : result.checks)
                    std::printf("%s [%s] %s: %s\n", c.passed ? "PASS" : "FAIL", result.suite.c_str(), c.name.c_str(),
                                c.detail.c_str());
                std::printf("suite %s %s in %.2f s\n", result.suite.c_str(), result.passed() ? "passed" : "FAILED",
                            result.seconds);
                ok = ok && result.passed();
            }
            return ok ? 0 : 1;
        }
    } catch (const osmd::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
