// Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

#include "CLI11.hpp"
#include "json.hpp"
#include "osmd/runner.hpp"
#include "osmd/suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

using namespace osmd;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& criterion, bool passed, const std::string& detail) {
    if (!passed) ++failures;
    std::printf("%s  %s: %s\n", passed ? "PASS" : "FAIL", criterion.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buffer[256];
    std::snprintf(buffer, sizeof buffer, pattern, a, b, c, d);
    return buffer;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int shell(const std::string& command) {
    std::fflush(stdout);
    return std::system(command.c_str());
}

void suite_criterion(const std::string& criterion, const std::string& suite, double limit_seconds, int workers) {
    const auto results = run_suite(suite, workers);
    const SuiteResult& result = results.front();
    std::string failed;
    for (const auto& check : result.checks) {
        std::printf("      %s %s: %s\n", check.passed ? "ok  " : "FAIL", check.name.c_str(), check.detail.c_str());
        if (!check.passed) failed += (failed.empty() ? "" : "; ") + check.name;
    }
    const bool in_time = result.seconds < limit_seconds;
    std::string detail = std::to_string(result.checks.size()) + " checks, " +
                         fmt("%.1f s (limit %.0f s)", result.seconds, limit_seconds);
    if (!failed.empty()) detail += ", failed: " + failed;
    if (!in_time) detail += ", over the time limit";
    report(criterion, result.passed() && in_time, detail);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::string cli;
    fs::path out = "acceptance_out";
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    app.add_option("--cli", cli, "Path to the osmd executable")->required();
    app.add_option("--out", out, "Scratch directory for CLI outputs");
    app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    fs::remove_all(out);
    fs::create_directories(out);

    suite_criterion("unbiasedness suite, four estimators, bias <= 1e-12, < 10 s", "unbiased", 10.0, workers);
    suite_criterion("exponential-weights oracle, 1000 rounds to 1e-9, < 5 s", "exp3", 5.0, workers);
    suite_criterion("shifted stability grid <= sqrt(k)/2 + 12 k eta and plain <= k, < 2 min", "lemma4", 120.0,
                    workers);

    {
        const auto start = Clock::now();
        const fs::path dir = out / "fig1";
        const int status = shell("\"" + cli + "\" fig1 --workers " + std::to_string(workers) + " --out \"" +
                                 dir.string() + "\" > \"" + (out / "fig1.log").string() + "\" 2>&1");
        const double elapsed = seconds_since(start);
        const fs::path summary_path = dir / "fig1" / "summary.json";
        if (status != 0 || !fs::exists(summary_path)) {
            report("shifted INF regret + 3 stderr <= sqrt(2kn) + 48k = 1240, <= 15 min", false,
                   "fig1 run failed with status " + std::to_string(status));
            report("final mean regret ratio INF / INF+shift in [1.5, 2.5]", false, "fig1 run failed");
        } else {
            const auto summary = nlohmann::json::parse(read_file(summary_path));
            const int k = 5, n = summary["horizon"].get<int>();
            const double bound = std::sqrt(2.0 * k * n) + 48.0 * k;
            nlohmann::json shifted, plain;
            for (const auto& algo : summary["algorithms"]) {
                if (algo["name"] == "INF+shift") shifted = algo;
                if (algo["name"] == "INF") plain = algo;
            }
            const double mean = shifted["final"]["mean"].get<double>();
            const double stderr_ = shifted["final"]["stderr"].get<double>();
            report("shifted INF regret + 3 stderr <= sqrt(2kn) + 48k = 1240, <= 15 min",
                   summary["repeats"] == 100 && n == 100000 && mean + 3.0 * stderr_ <= bound && elapsed <= 900.0,
                   fmt("mean %.2f + 3 x %.2f = %.2f vs %.2f", mean, stderr_, mean + 3.0 * stderr_, bound) +
                       fmt(", %.1f s", elapsed));
            const double ratio = summary["final_mean_ratio"]["value"].get<double>();
            report("final mean regret ratio INF / INF+shift in [1.5, 2.5]", ratio >= 1.5 && ratio <= 2.5,
                   fmt("INF %.2f / INF+shift %.2f = %.3f", plain["final"]["mean"].get<double>(), mean, ratio));

            // The shifted algorithm also beats exponential weights with importance weighting.
            const auto exp3_start = Clock::now();
            RunConfig exp3 = fig1_config(100, n, summary["seed"].get<std::uint64_t>());
            exp3.algorithms = {{"exp3", Potential::negentropy(), EstimatorSpec::importance_weighted(k), std::nullopt}};
            exp3.ratio.reset();
            const auto result = execute(exp3, workers);
            double exp3_mean = 0.0;
            for (const auto& trace : result.algorithms.front().traces) exp3_mean += trace.checkpoints.back().cum_regret;
            exp3_mean /= static_cast<double>(result.algorithms.front().traces.size());
            report("shifted INF below negentropy with importance weighting on the same losses", mean < exp3_mean,
                   fmt("INF+shift %.2f vs exp3 %.2f, %.1f s", mean, exp3_mean, seconds_since(exp3_start)));
        }
    }

    suite_criterion("graph suite: neighbourhood inequality, stability bound, sublinear regret, < 10 min", "graph",
                    600.0, workers);
    suite_criterion("lp suite: clip identity, diameter, stability <= 2, Rademacher regret, < 10 min", "lp", 600.0,
                    workers);
    suite_criterion("Bayesian enumeration suite, < 5 min", "bayes", 300.0, workers);

    {
        bool identical = true;
        std::string detail;
        for (int w : {1, 8}) {
            const fs::path dir = out / ("determinism_w" + std::to_string(w));
            const int status = shell("\"" + cli + "\" fig1 --repeats 4 --horizon 1000 --seed 7 --workers " +
                                     std::to_string(w) + " --out \"" + dir.string() + "\" > /dev/null 2>&1");
            if (status != 0) {
                identical = false;
                detail = "fig1 with " + std::to_string(w) + " workers failed";
            }
        }
        if (identical) {
            for (const char* name : {"INF.csv", "INF+shift.csv"}) {
                const auto a = read_file(out / "determinism_w1" / "fig1" / name);
                const auto b = read_file(out / "determinism_w8" / "fig1" / name);
                if (a.empty() || a != b) identical = false;
            }
            detail = identical ? "INF.csv and INF+shift.csv byte-identical" : "CSV bytes differ";
        }
        report("fig1 --repeats 4 --horizon 1000 --seed 7 identical with 1 and 8 workers", identical, detail);
    }

    std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
