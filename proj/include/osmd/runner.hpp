#pragma once

#include "osmd/engine.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace osmd {

/// Configuration rejected by validation; `fields` lists "path: reason" for
/// every offending field.
class ConfigError : public DomainError {
public:
    explicit ConfigError(std::vector<std::string> fields);
    const std::vector<std::string>& fields() const { return fields_; }

private:
    std::vector<std::string> fields_;
};

struct AlgorithmConfig {
    std::string name;
    Potential potential;
    EstimatorSpec estimator;
    std::optional<double> eta;  // nullopt: auto
};

struct RunConfig {
    std::string experiment;
    std::vector<AlgorithmConfig> algorithms;
    ProblemInstance instance;
    int repeats = 1;
    std::uint64_t seed = 0;
    std::filesystem::path output = "results";
    std::vector<int> checkpoints;  // empty: geometric
    /// Report mean_final(first) / mean_final(second) in the summary.
    std::optional<std::pair<std::string, std::string>> ratio;
    /// Validated input document with defaults filled in (JSON text).
    std::string document;
};

/// Parses and validates a run configuration. Relative paths inside the
/// document (edge lists, loss CSVs) resolve against `base_dir`.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// A sweep document is a run configuration plus
/// "sweep": [{"label": ..., "override": {...}}, ...]; each override is merged
/// into the base document (JSON merge patch) and runs as experiment
/// "<experiment>/<label>".
std::vector<RunConfig> parse_sweep_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
std::vector<RunConfig> load_sweep_config(const std::filesystem::path& path);

/// Figure-1 preset: k = 5, means (0.45, 0.55, 0.55, 0.55, 0.55), ½-Tsallis
/// with plain ("INF") and shifted ("INF+shift") importance weighting, auto η.
RunConfig fig1_config(int repeats = 100, int horizon = 100000, std::uint64_t seed = 0,
                      const std::filesystem::path& output = "results");

struct AlgorithmResult {
    std::string name;
    EtaResolution eta;
    std::vector<RegretTrace> traces;  // indexed by run id
};

struct ExperimentResult {
    std::string experiment;
    std::vector<AlgorithmResult> algorithms;
};

/// Runs every algorithm for `repeats` runs on `workers` threads. Run r of
/// every algorithm uses the streams of (seed, r), so results do not depend on
/// the worker count.
ExperimentResult execute(const RunConfig& config, int workers = 1);

struct CheckpointStats {
    int t;
    double mean;
    double std;  // sample standard deviation (n − 1)
    int runs;
};

/// Per-checkpoint mean and standard deviation across runs.
std::vector<CheckpointStats> summarize(const std::vector<RegretTrace>& traces);

/// CSV with header run_id,t,cum_regret and one row per checkpoint.
void write_trace_csv(const std::vector<RegretTrace>& traces, const std::filesystem::path& path);

std::string summary_json(const RunConfig& config, const ExperimentResult& result);

/// The input document with every auto η replaced by its resolved value.
std::string resolved_config_json(const RunConfig& config, const ExperimentResult& result);

/// Writes <output>/<experiment>/<algo>.csv, summary.json and
/// config.resolved.json; returns the experiment directory.
std::filesystem::path write_results(const RunConfig& config, const ExperimentResult& result);

}  // namespace osmd
