#include "osmd/engine.hpp"

#include <algorithm>
#include <sstream>

namespace osmd {

void validate(const OsmdConfig& config) {
    const auto& instance = config.instance;
    const auto& estimator = config.estimator;
    const auto& F = config.potential;
    require(instance.dim >= 1, "config: instance has no coordinates");
    require(instance.horizon >= 1, "config: horizon must be positive");
    require(estimator.k == instance.dim, "config: estimator dimension " + std::to_string(estimator.k) +
                                             " does not match the instance dimension " + std::to_string(instance.dim));
    if (config.eta) require(*config.eta > 0.0, "config: eta must be positive");
    switch (instance.kind) {
        case InstanceKind::KArmedBandit:
            require(estimator.kind == EstimatorKind::ImportanceWeighted ||
                        estimator.kind == EstimatorKind::ShiftedImportanceWeighted,
                    "config: k-armed bandit feedback needs an importance-weighted estimator, got " + estimator.name());
            require(F.positive_domain(), "config: " + F.name() + " cannot be used on the simplex");
            break;
        case InstanceKind::GraphBandit:
            require(estimator.kind == EstimatorKind::GraphHybrid,
                    "config: graph feedback needs the graph_hybrid estimator, got " + estimator.name());
            require(estimator.graph && estimator.graph->edges() == instance.graph->edges(),
                    "config: estimator and instance use different graphs");
            require(is_strongly_observable(*instance.graph), "config: feedback graph is not strongly observable");
            require(F.positive_domain(), "config: " + F.name() + " cannot be used on the simplex");
            break;
        case InstanceKind::LpFullInfo:
            require(estimator.kind == EstimatorKind::FullInformation,
                    "config: the lp ball needs the full_information estimator, got " + estimator.name());
            require(F.kind() == PotentialKind::ClippedLp && F.p() == instance.p && F.clip() == instance.dim,
                    "config: the lp ball needs the clipped lp potential with matching p and d");
            break;
    }
}

EtaResolution resolve_eta(const OsmdConfig& config) {
    if (config.eta) return {*config.eta, false};
    EtaResolution out{0.0, true};
    out.diameter = diameter_upper_bound(config.potential, config.instance.geometry());
    out.constants = stability_constants(config.potential, config.estimator, config.instance);
    if (config.instance.kind == InstanceKind::GraphBandit) {
        out.constants = {calibrated_stability(config.potential, config.estimator), 0.0};
        out.calibrated = true;
    }
    const auto tuned = tune_eta(out.diameter, out.constants, config.instance.horizon);
    out.eta = tuned.eta;
    out.implied_bound = tuned.implied_bound;
    return out;
}

Vector ActionDistribution::mean() const {
    Vector out = Vector::Zero(support.front().size());
    for (std::size_t i = 0; i < support.size(); ++i) out += probabilities[static_cast<Eigen::Index>(i)] * support[i];
    return out;
}

ActionDistribution sampling_scheme(const VectorRef& x, const Geometry& geometry) {
    ActionDistribution out;
    if (std::holds_alternative<Simplex>(geometry)) {
        const auto k = x.size();
        for (Eigen::Index i = 0; i < k; ++i) out.support.push_back(Vector::Unit(k, i));
        out.probabilities = x;
        return out;
    }
    out.support.push_back(x);
    out.probabilities = Vector::Ones(1);
    return out;
}

namespace {

std::size_t sample_arm(const Vector& x, double u) {
    double acc = 0.0;
    std::size_t last = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0) continue;
        last = static_cast<std::size_t>(i);
        acc += x[i];
        if (u < acc) return last;
    }
    return last;
}

}  // namespace

RegretTrace run(const OsmdConfig& config, const RoundCallback& on_round) {
    validate(config);
    const auto& instance = config.instance;
    const int n = instance.horizon;
    const Geometry geometry = instance.geometry();
    const double eta = resolve_eta(config).eta;

    EstimatorSpec estimator = config.estimator;
    if (estimator.kind == EstimatorKind::ShiftedImportanceWeighted) estimator.eta = eta;

    auto loss_stream = make_stream(config.seed, config.run_id, StreamPurpose::Losses);
    auto action_stream = make_stream(config.seed, config.run_id, StreamPurpose::Actions);
    const std::vector<Vector> losses = draw_losses(instance, loss_stream);

    Vector cumulative = Vector::Zero(instance.dim);
    for (const auto& loss : losses) cumulative += loss;
    const Vector comparator = best_action(instance, cumulative);

    std::vector<int> schedule = config.checkpoints.empty() ? geometric_checkpoints(n) : config.checkpoints;
    require(std::is_sorted(schedule.begin(), schedule.end()) &&
                std::adjacent_find(schedule.begin(), schedule.end()) == schedule.end(),
            "config: checkpoints must be strictly increasing");

    RegretTrace trace;
    trace.run_id = config.run_id;
    trace.eta = eta;

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector x = minimizer(config.potential, geometry);
    double regret = 0.0;
    std::size_t next = 0;
    for (int t = 1; t <= n; ++t) {
        const Vector& loss = losses[static_cast<std::size_t>(t - 1)];
        std::size_t action = 0;
        Observation observed;
        if (instance.finite_actions()) {
            action = sample_arm(x, unit(action_stream));
            regret += loss[static_cast<Eigen::Index>(action)] - comparator.dot(loss);
            observed = signal(instance, action, loss);
        } else {
            regret += (x - comparator).dot(loss);
            observed = signal(instance, x, loss);
        }
        const Vector loss_estimate = estimate(estimator, x, action, observed);
        if (on_round) on_round(RoundRecord{t, x, action, loss, loss_estimate});
        try {
            x = constrained_step(MirrorStepRequest{config.potential, geometry, x, loss_estimate, eta});
        } catch (const SolverError& e) {
            std::ostringstream os;
            os << "round " << t << " of run " << config.run_id << ": " << e.what();
            throw SolverError(os.str());
        }
        while (next < schedule.size() && schedule[next] == t) {
            trace.checkpoints.push_back({t, regret});
            ++next;
        }
    }
    trace.final_iterate = x;
    return trace;
}

}  // namespace osmd
