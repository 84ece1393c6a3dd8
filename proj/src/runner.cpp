#include "osmd/runner.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace osmd {

using nlohmann::json;

namespace {

std::string join_fields(const std::vector<std::string>& fields) {
    std::string out = "invalid configuration:";
    for (const auto& f : fields) out += "\n  " + f;
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Collects every problem instead of stopping at the first.
class Checker {
public:
    void fail(const std::string& path, const std::string& reason) { errors_.push_back(path + ": " + reason); }
    bool ok() const { return errors_.empty(); }
    const std::vector<std::string>& errors() const { return errors_; }

    void only(const json& node, const std::string& path, const std::set<std::string>& allowed) {
        if (!node.is_object()) return;
        for (const auto& item : node.items())
            if (!allowed.count(item.key())) fail(path + "." + item.key(), "unknown field");
    }

    const json* object(const json& node, const std::string& key, const std::string& path, bool required = true) {
        if (!node.contains(key)) {
            if (required) fail(path + "." + key, "missing");
            return nullptr;
        }
        if (!node[key].is_object()) {
            fail(path + "." + key, "must be an object");
            return nullptr;
        }
        return &node[key];
    }

    std::optional<std::string> string(const json& node, const std::string& key, const std::string& path,
                                      bool required = true) {
        if (!node.contains(key)) {
            if (required) fail(path + "." + key, "missing");
            return std::nullopt;
        }
        if (!node[key].is_string()) {
            fail(path + "." + key, "must be a string");
            return std::nullopt;
        }
        return node[key].get<std::string>();
    }

    std::optional<double> number(const json& node, const std::string& key, const std::string& path, bool required,
                                 double lo, double hi) {
        if (!node.contains(key)) {
            if (required) fail(path + "." + key, "missing");
            return std::nullopt;
        }
        if (!node[key].is_number()) {
            fail(path + "." + key, "must be a number");
            return std::nullopt;
        }
        const double v = node[key].get<double>();
        if (!(v >= lo && v <= hi)) {
            std::ostringstream os;
            os << "must lie in [" << lo << ", " << hi << "], got " << v;
            fail(path + "." + key, os.str());
            return std::nullopt;
        }
        return v;
    }

    std::optional<long long> integer(const json& node, const std::string& key, const std::string& path, bool required,
                                     long long lo, long long hi) {
        if (!node.contains(key)) {
            if (required) fail(path + "." + key, "missing");
            return std::nullopt;
        }
        if (!node[key].is_number_integer()) {
            fail(path + "." + key, "must be an integer");
            return std::nullopt;
        }
        const auto v = node[key].get<long long>();
        if (v < lo || v > hi) {
            fail(path + "." + key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
                                       std::to_string(v));
            return std::nullopt;
        }
        return v;
    }

private:
    std::vector<std::string> errors_;
};

constexpr long long kMaxInt = std::numeric_limits<int>::max();

std::shared_ptr<const GraphSpec> parse_graph(Checker& check, const json& node, const std::string& path,
                                             const std::filesystem::path& base_dir) {
    check.only(node, path, {"kind", "k", "self_loops", "edge_probability", "self_loop_probability", "seed", "path"});
    const auto kind = check.string(node, "kind", path);
    if (!kind) return nullptr;
    try {
        if (*kind == "edge_list") {
            const auto file = check.string(node, "path", path);
            if (!file) return nullptr;
            std::filesystem::path p = *file;
            if (p.is_relative()) p = base_dir / p;
            return std::make_shared<const GraphSpec>(GraphSpec::load(p));
        }
        const auto k = check.integer(node, "k", path, true, 1, 4096);
        if (!k) return nullptr;
        const int n = static_cast<int>(*k);
        if (*kind == "bandit") return std::make_shared<const GraphSpec>(GraphSpec::bandit(n));
        if (*kind == "complete" || *kind == "full_information")
            return std::make_shared<const GraphSpec>(GraphSpec::complete(n));
        if (*kind == "empty") return std::make_shared<const GraphSpec>(GraphSpec::empty(n));
        if (*kind == "cycle") {
            bool loops = true;
            if (node.contains("self_loops")) {
                if (!node["self_loops"].is_boolean()) {
                    check.fail(path + ".self_loops", "must be a boolean");
                    return nullptr;
                }
                loops = node["self_loops"].get<bool>();
            }
            return std::make_shared<const GraphSpec>(GraphSpec::cycle(n, loops));
        }
        if (*kind == "erdos_renyi" || *kind == "random_strongly_observable") {
            const auto pe = check.number(node, "edge_probability", path, true, 0.0, 1.0);
            const auto pl = check.number(node, "self_loop_probability", path, false, 0.0, 1.0);
            const auto seed = check.integer(node, "seed", path, false, 0, std::numeric_limits<long long>::max());
            if (!pe) return nullptr;
            const double loops = pl.value_or(1.0);
            const auto s = static_cast<std::uint64_t>(seed.value_or(0));
            if (*kind == "erdos_renyi") return std::make_shared<const GraphSpec>(GraphSpec::erdos_renyi(n, *pe, loops, s));
            return std::make_shared<const GraphSpec>(GraphSpec::random_strongly_observable(n, *pe, loops, s));
        }
        check.fail(path + ".kind", "unknown graph kind \"" + *kind + "\"");
    } catch (const DomainError& e) {
        check.fail(path, e.what());
    }
    return nullptr;
}

std::optional<LossSource> parse_losses(Checker& check, const json& node, const std::string& path, int dim,
                                       const std::filesystem::path& base_dir) {
    check.only(node, path, {"kind", "means", "csv", "values"});
    const auto kind = check.string(node, "kind", path);
    if (!kind) return std::nullopt;
    if (*kind == "rademacher") return RademacherLosses{};
    if (*kind == "bernoulli") {
        if (!node.contains("means") || !node["means"].is_array()) {
            check.fail(path + ".means", "must be an array of numbers");
            return std::nullopt;
        }
        std::vector<double> means;
        for (const auto& v : node["means"]) {
            if (!v.is_number()) {
                check.fail(path + ".means", "must be an array of numbers");
                return std::nullopt;
            }
            means.push_back(v.get<double>());
        }
        if (dim > 0 && static_cast<int>(means.size()) != dim) {
            check.fail(path + ".means", "has " + std::to_string(means.size()) + " entries, the instance has " +
                                            std::to_string(dim) + " coordinates");
            return std::nullopt;
        }
        for (double m : means)
            if (!(m >= 0.0 && m <= 1.0)) {
                check.fail(path + ".means", "entries must lie in [0, 1]");
                return std::nullopt;
            }
        return BernoulliLosses{Eigen::Map<const Vector>(means.data(), static_cast<Eigen::Index>(means.size()))};
    }
    if (*kind == "fixed") {
        try {
            if (node.contains("csv")) {
                std::filesystem::path p = node["csv"].get<std::string>();
                if (p.is_relative()) p = base_dir / p;
                return FixedSequence{load_loss_csv(p)};
            }
            if (node.contains("values")) {
                FixedSequence seq;
                for (const auto& row : node["values"]) {
                    const auto values = row.get<std::vector<double>>();
                    seq.losses.push_back(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
                }
                return seq;
            }
        } catch (const std::exception& e) {
            check.fail(path, e.what());
            return std::nullopt;
        }
        check.fail(path, "fixed losses need \"csv\" or \"values\"");
        return std::nullopt;
    }
    check.fail(path + ".kind", "unknown loss kind \"" + *kind + "\"");
    return std::nullopt;
}

std::optional<Potential> parse_potential(Checker& check, const json& node, const std::string& path,
                                         const ProblemInstance* instance) {
    check.only(node, path, {"kind", "alpha", "p", "d"});
    const auto kind = check.string(node, "kind", path);
    if (!kind) return std::nullopt;
    if (*kind == "negentropy") return Potential::negentropy();
    if (*kind == "tsallis_half") return Potential::tsallis_half();
    if (*kind == "tsallis_alpha") {
        const auto alpha = check.number(node, "alpha", path, true, 1e-9, 1.0 - 1e-9);
        if (!alpha) return std::nullopt;
        return Potential::tsallis_alpha(*alpha);
    }
    if (*kind == "graph_tsallis") {
        if (!instance) return std::nullopt;
        if (instance->dim < 2) {
            check.fail(path + ".kind", "graph_tsallis needs at least two vertices");
            return std::nullopt;
        }
        return Potential::graph_tsallis(instance->dim);
    }
    if (*kind == "clipped_lp") {
        const auto p = check.number(node, "p", path, false, 1.0, 2.0);
        const auto d = check.integer(node, "d", path, false, 1, kMaxInt);
        if (!check.ok() || (!instance && (!p || !d))) return std::nullopt;
        return Potential::clipped_lp(p ? *p : instance->p, static_cast<int>(d ? *d : instance->dim));
    }
    check.fail(path + ".kind", "unknown potential kind \"" + *kind + "\"");
    return std::nullopt;
}

std::optional<EstimatorSpec> parse_estimator(Checker& check, const json& node, const std::string& path,
                                             const ProblemInstance* instance) {
    check.only(node, path, {"kind"});
    const auto kind = check.string(node, "kind", path);
    if (!kind) return std::nullopt;
    static const std::set<std::string> known{"importance_weighted", "shifted", "shifted_importance_weighted",
                                             "graph_hybrid", "full_information"};
    if (!known.count(*kind)) {
        check.fail(path + ".kind", "unknown estimator kind \"" + *kind + "\"");
        return std::nullopt;
    }
    if (!instance) return std::nullopt;
    const int k = instance->dim;
    if (*kind == "importance_weighted") return EstimatorSpec::importance_weighted(k);
    if (*kind == "shifted" || *kind == "shifted_importance_weighted")
        return EstimatorSpec{EstimatorKind::ShiftedImportanceWeighted, k, 0.0, nullptr};
    if (*kind == "graph_hybrid") {
        if (!instance->graph) {
            check.fail(path + ".kind", "graph_hybrid needs a graph_bandit instance");
            return std::nullopt;
        }
        return EstimatorSpec::graph_hybrid(instance->graph);
    }
    return EstimatorSpec::full_information(k);
}

std::optional<ProblemInstance> parse_instance(Checker& check, const json& node, const std::string& path, int horizon,
                                              const std::filesystem::path& base_dir) {
    check.only(node, path, {"kind", "k", "graph", "p", "d", "losses"});
    const auto kind = check.string(node, "kind", path);
    if (!kind) return std::nullopt;
    int dim = 0;
    std::shared_ptr<const GraphSpec> graph;
    double p = 2.0;
    if (*kind == "k_armed") {
        const auto k = check.integer(node, "k", path, true, 1, 4096);
        if (k) dim = static_cast<int>(*k);
    } else if (*kind == "graph_bandit") {
        if (const json* g = check.object(node, "graph", path)) graph = parse_graph(check, *g, path + ".graph", base_dir);
        if (graph) dim = graph->k();
    } else if (*kind == "lp_full_info") {
        const auto pv = check.number(node, "p", path, true, 1.0, 2.0);
        const auto d = check.integer(node, "d", path, true, 1, 4096);
        if (pv) p = *pv;
        if (d) dim = static_cast<int>(*d);
    } else {
        check.fail(path + ".kind", "unknown instance kind \"" + *kind + "\"");
        return std::nullopt;
    }
    const json* losses = check.object(node, "losses", path);
    if (!losses || dim == 0) return std::nullopt;
    auto source = parse_losses(check, *losses, path + ".losses", dim, base_dir);
    if (!source || !check.ok()) return std::nullopt;
    try {
        if (*kind == "k_armed") return ProblemInstance::k_armed(dim, std::move(*source), horizon);
        if (*kind == "graph_bandit") return ProblemInstance::graph_bandit(graph, std::move(*source), horizon);
        return ProblemInstance::lp_full_info(p, dim, std::move(*source), horizon);
    } catch (const DomainError& e) {
        check.fail(path, e.what());
    }
    return std::nullopt;
}

RunConfig parse_document(json doc, const std::filesystem::path& base_dir) {
    Checker check;
    if (!doc.is_object()) throw ConfigError({"$: configuration must be a JSON object"});
    check.only(doc, "$", {"experiment", "algorithms", "instance", "horizon", "repeats", "seed", "output", "checkpoints",
                          "ratio", "sweep"});
    RunConfig config;
    if (auto name = check.string(doc, "experiment", "$")) {
        if (name->empty()) check.fail("$.experiment", "must not be empty");
        config.experiment = *name;
    }
    const auto horizon = check.integer(doc, "horizon", "$", true, 1, kMaxInt);
    if (const auto repeats = check.integer(doc, "repeats", "$", false, 1, 1000000)) config.repeats = static_cast<int>(*repeats);
    if (const auto seed = check.integer(doc, "seed", "$", false, 0, std::numeric_limits<long long>::max()))
        config.seed = static_cast<std::uint64_t>(*seed);
    if (auto out = check.string(doc, "output", "$", false)) config.output = *out;

    const int n = static_cast<int>(horizon.value_or(1));
    std::optional<ProblemInstance> instance;
    if (const json* node = check.object(doc, "instance", "$")) instance = parse_instance(check, *node, "$.instance", n, base_dir);

    if (doc.contains("checkpoints")) {
        const auto& cp = doc["checkpoints"];
        if (cp.is_string() && cp.get<std::string>() == "geometric") {
        } else if (cp.is_array()) {
            int last = 0;
            for (const auto& v : cp) {
                if (!v.is_number_integer() || v.get<int>() <= last || v.get<int>() > n) {
                    check.fail("$.checkpoints", "must be strictly increasing integers in [1, horizon]");
                    break;
                }
                last = v.get<int>();
                config.checkpoints.push_back(last);
            }
        } else {
            check.fail("$.checkpoints", "must be \"geometric\" or an array of rounds");
        }
    }

    if (!doc.contains("algorithms") || !doc["algorithms"].is_array() || doc["algorithms"].empty()) {
        check.fail("$.algorithms", "must be a non-empty array");
    } else {
        const ProblemInstance* known_instance = instance ? &*instance : nullptr;
        std::set<std::string> names;
        for (std::size_t i = 0; i < doc["algorithms"].size(); ++i) {
            json& node = doc["algorithms"][i];
            const std::string path = "$.algorithms[" + std::to_string(i) + "]";
            if (!node.is_object()) {
                check.fail(path, "must be an object");
                continue;
            }
            check.only(node, path, {"name", "potential", "estimator", "eta", "eta_source"});
            if (node.contains("eta_source")) {
                const json& source = node["eta_source"];
                if (!source.is_string() || (source != "auto" && source != "auto-calibrated" && source != "fixed"))
                    check.fail(path + ".eta_source", "must be \"auto\", \"auto-calibrated\" or \"fixed\"");
            }
            AlgorithmConfig algo{"", Potential::negentropy(), EstimatorSpec::importance_weighted(1), std::nullopt};
            if (auto name = check.string(node, "name", path)) {
                if (name->empty() || name->find('/') != std::string::npos)
                    check.fail(path + ".name", "must be a non-empty file name");
                else if (!names.insert(*name).second)
                    check.fail(path + ".name", "duplicate algorithm name \"" + *name + "\"");
                algo.name = *name;
            }
            std::optional<Potential> potential;
            std::optional<EstimatorSpec> estimator;
            if (const json* pn = check.object(node, "potential", path))
                potential = parse_potential(check, *pn, path + ".potential", known_instance);
            if (const json* en = check.object(node, "estimator", path))
                estimator = parse_estimator(check, *en, path + ".estimator", known_instance);
            if (!node.contains("eta")) node["eta"] = "auto";
            if (node["eta"].is_string() && node["eta"].get<std::string>() == "auto") {
            } else if (node["eta"].is_number() && node["eta"].get<double>() > 0.0) {
                algo.eta = node["eta"].get<double>();
            } else {
                check.fail(path + ".eta", "must be \"auto\" or a positive number");
            }
            if (!potential || !estimator) continue;
            algo.potential = *potential;
            algo.estimator = *estimator;
            try {
                OsmdConfig probe{algo.potential, algo.estimator, *instance, algo.eta, 0, 0, config.checkpoints};
                validate(probe);
                if (!algo.eta) (void)stability_constants(algo.potential, algo.estimator, *instance);
            } catch (const DomainError& e) {
                check.fail(path, e.what());
            }
            config.algorithms.push_back(std::move(algo));
        }
    }

    if (doc.contains("ratio")) {
        const auto& r = doc["ratio"];
        if (!r.is_array() || r.size() != 2 || !r[0].is_string() || !r[1].is_string()) {
            check.fail("$.ratio", "must be [numerator, denominator] algorithm names");
        } else {
            config.ratio = {r[0].get<std::string>(), r[1].get<std::string>()};
            for (const auto& name : {config.ratio->first, config.ratio->second})
                if (std::none_of(config.algorithms.begin(), config.algorithms.end(),
                                 [&](const AlgorithmConfig& a) { return a.name == name; }))
                    check.fail("$.ratio", "names an unknown algorithm \"" + name + "\"");
        }
    }

    if (!check.ok()) throw ConfigError(check.errors());
    config.instance = *instance;
    doc.erase("sweep");
    doc["repeats"] = config.repeats;
    doc["seed"] = config.seed;
    doc["output"] = config.output.string();
    if (!doc.contains("checkpoints")) doc["checkpoints"] = "geometric";
    config.document = doc.dump();
    return config;
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("$: not valid JSON: ") + e.what()});
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> fields) : DomainError(join_fields(fields)), fields_(std::move(fields)) {}

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    return parse_document(parse_text(json_text), base_dir);
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(read_file(path), path.parent_path());
}

std::vector<RunConfig> parse_sweep_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json doc = parse_text(json_text);
    if (!doc.is_object() || !doc.contains("sweep") || !doc["sweep"].is_array() || doc["sweep"].empty())
        throw ConfigError({"$.sweep: must be a non-empty array of {\"label\", \"override\"}"});
    json base = doc;
    base.erase("sweep");
    std::vector<RunConfig> out;
    std::vector<std::string> errors;
    std::set<std::string> labels;
    for (std::size_t i = 0; i < doc["sweep"].size(); ++i) {
        const auto& entry = doc["sweep"][i];
        const std::string path = "$.sweep[" + std::to_string(i) + "]";
        if (!entry.is_object() || !entry.contains("label") || !entry["label"].is_string()) {
            errors.push_back(path + ".label: missing");
            continue;
        }
        const auto label = entry["label"].get<std::string>();
        if (!labels.insert(label).second) {
            errors.push_back(path + ".label: duplicate \"" + label + "\"");
            continue;
        }
        json variant = base;
        if (entry.contains("override")) variant.merge_patch(entry["override"]);
        variant["experiment"] = base.value("experiment", std::string("sweep")) + "/" + label;
        try {
            out.push_back(parse_document(variant, base_dir));
        } catch (const ConfigError& e) {
            for (const auto& f : e.fields()) errors.push_back(path + " " + f);
        }
    }
    if (!errors.empty()) throw ConfigError(errors);
    return out;
}

std::vector<RunConfig> load_sweep_config(const std::filesystem::path& path) {
    return parse_sweep_config(read_file(path), path.parent_path());
}

RunConfig fig1_config(int repeats, int horizon, std::uint64_t seed, const std::filesystem::path& output) {
    json doc = {
        {"experiment", "fig1"},
        {"horizon", horizon},
        {"repeats", repeats},
        {"seed", seed},
        {"output", output.string()},
        {"instance",
         {{"kind", "k_armed"}, {"k", 5}, {"losses", {{"kind", "bernoulli"}, {"means", {0.45, 0.55, 0.55, 0.55, 0.55}}}}}},
        {"algorithms",
         {{{"name", "INF"}, {"potential", {{"kind", "tsallis_half"}}}, {"estimator", {{"kind", "importance_weighted"}}},
           {"eta", "auto"}},
          {{"name", "INF+shift"}, {"potential", {{"kind", "tsallis_half"}}}, {"estimator", {{"kind", "shifted"}}},
           {"eta", "auto"}}}},
        {"ratio", {"INF", "INF+shift"}},
    };
    return parse_document(doc, {});
}

ExperimentResult execute(const RunConfig& config, int workers) {
    require(workers >= 1, "execute: workers must be positive");
    ExperimentResult result{config.experiment, {}};
    for (const auto& algo : config.algorithms) {
        OsmdConfig base{algo.potential, algo.estimator, config.instance, algo.eta, config.seed, 0, config.checkpoints};
        AlgorithmResult entry{algo.name, resolve_eta(base), {}};
        base.eta = entry.eta.eta;
        entry.traces.resize(static_cast<std::size_t>(config.repeats));

        std::atomic<int> next{0};
        std::vector<std::string> failures(static_cast<std::size_t>(config.repeats));
        auto work = [&]() {
            for (int r = next++; r < config.repeats; r = next++) {
                OsmdConfig run_config = base;
                run_config.run_id = static_cast<std::uint64_t>(r);
                try {
                    entry.traces[static_cast<std::size_t>(r)] = run(run_config);
                } catch (const std::exception& e) {
                    failures[static_cast<std::size_t>(r)] = e.what();
                }
            }
        };
        const int threads = std::min(workers, config.repeats);
        std::vector<std::thread> pool;
        for (int i = 1; i < threads; ++i) pool.emplace_back(work);
        work();
        for (auto& thread : pool) thread.join();
        for (const auto& failure : failures)
            if (!failure.empty()) throw SolverError(algo.name + ": " + failure);
        result.algorithms.push_back(std::move(entry));
    }
    return result;
}

std::vector<CheckpointStats> summarize(const std::vector<RegretTrace>& traces) {
    std::vector<CheckpointStats> out;
    if (traces.empty()) return out;
    const auto& grid = traces.front().checkpoints;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        double sum = 0.0;
        for (const auto& trace : traces) {
            require(trace.checkpoints.size() == grid.size() && trace.checkpoints[c].t == grid[c].t,
                    "summarize: runs do not share the checkpoint grid");
            sum += trace.checkpoints[c].cum_regret;
        }
        const double runs = static_cast<double>(traces.size());
        const double mean = sum / runs;
        double squares = 0.0;
        for (const auto& trace : traces) {
            const double d = trace.checkpoints[c].cum_regret - mean;
            squares += d * d;
        }
        const double sd = traces.size() > 1 ? std::sqrt(squares / (runs - 1.0)) : 0.0;
        out.push_back({grid[c].t, mean, sd, static_cast<int>(traces.size())});
    }
    return out;
}

void write_trace_csv(const std::vector<RegretTrace>& traces, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "run_id,t,cum_regret\n";
    char buffer[64];
    for (const auto& trace : traces)
        for (const auto& cp : trace.checkpoints) {
            std::snprintf(buffer, sizeof buffer, "%.17g", cp.cum_regret);
            out << trace.run_id << ',' << cp.t << ',' << buffer << '\n';
        }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

namespace {

json eta_json(const EtaResolution& eta) {
    json out = {{"eta", eta.eta}, {"source", eta.automatic ? (eta.calibrated ? "auto-calibrated" : "auto") : "fixed"}};
    if (eta.automatic) {
        out["diameter"] = eta.diameter;
        out["stability_constants"] = {{"a", eta.constants.a}, {"b", eta.constants.b}};
        out["implied_bound"] = eta.implied_bound;
    }
    return out;
}

}  // namespace

std::string summary_json(const RunConfig& config, const ExperimentResult& result) {
    json doc = {{"experiment", result.experiment},
                {"horizon", config.instance.horizon},
                {"repeats", config.repeats},
                {"seed", config.seed},
                {"std_ddof", 1},
                {"error_bar_sigmas", 3}};
    json algorithms = json::array();
    std::map<std::string, double> final_means;
    for (const auto& algo : result.algorithms) {
        json checkpoints = json::array();
        const auto stats = summarize(algo.traces);
        for (const auto& s : stats) checkpoints.push_back({{"t", s.t}, {"mean", s.mean}, {"std", s.std}, {"runs", s.runs}});
        json entry = {{"name", algo.name}, {"csv", algo.name + ".csv"}, {"eta", eta_json(algo.eta)}, {"checkpoints", checkpoints}};
        if (!stats.empty()) {
            const auto& last = stats.back();
            entry["final"] = {{"t", last.t},
                              {"mean", last.mean},
                              {"std", last.std},
                              {"stderr", last.std / std::sqrt(static_cast<double>(last.runs))}};
            final_means[algo.name] = last.mean;
        }
        algorithms.push_back(entry);
    }
    doc["algorithms"] = algorithms;
    if (config.ratio && final_means.count(config.ratio->first) && final_means.count(config.ratio->second)) {
        const double num = final_means[config.ratio->first];
        const double den = final_means[config.ratio->second];
        doc["final_mean_ratio"] = {{"numerator", config.ratio->first}, {"denominator", config.ratio->second},
                                   {"value", num / den}};
    }
    return doc.dump(2) + "\n";
}

std::string resolved_config_json(const RunConfig& config, const ExperimentResult& result) {
    json doc = json::parse(config.document);
    for (auto& node : doc["algorithms"]) {
        const auto name = node["name"].get<std::string>();
        for (const auto& algo : result.algorithms)
            if (algo.name == name) {
                node["eta"] = algo.eta.eta;
                node["eta_source"] = eta_json(algo.eta)["source"];
            }
    }
    if (config.checkpoints.empty()) doc["checkpoints"] = geometric_checkpoints(config.instance.horizon);
    return doc.dump(2) + "\n";
}

std::filesystem::path write_results(const RunConfig& config, const ExperimentResult& result) {
    const auto dir = config.output / config.experiment;
    std::filesystem::create_directories(dir);
    for (const auto& algo : result.algorithms) write_trace_csv(algo.traces, dir / (algo.name + ".csv"));
    auto write = [&](const std::filesystem::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << text;
    };
    write(dir / "summary.json", summary_json(config, result));
    write(dir / "config.resolved.json", resolved_config_json(config, result));
    return dir;
}

}  // namespace osmd
