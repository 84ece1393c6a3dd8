#include "osmd/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace osmd {

EstimatorSpec EstimatorSpec::importance_weighted(int k) {
    require(k >= 1, "importance_weighted: k must be positive");
    return {EstimatorKind::ImportanceWeighted, k, 0.0, nullptr};
}

EstimatorSpec EstimatorSpec::shifted(int k, double eta) {
    require(k >= 1, "shifted: k must be positive");
    require(eta > 0.0, "shifted: eta must be positive");
    return {EstimatorKind::ShiftedImportanceWeighted, k, eta, nullptr};
}

EstimatorSpec EstimatorSpec::graph_hybrid(std::shared_ptr<const GraphSpec> graph) {
    require(graph != nullptr, "graph_hybrid: missing graph");
    const int k = graph->k();
    return {EstimatorKind::GraphHybrid, k, 0.0, std::move(graph)};
}

EstimatorSpec EstimatorSpec::full_information(int k) {
    require(k >= 1, "full_information: dimension must be positive");
    return {EstimatorKind::FullInformation, k, 0.0, nullptr};
}

std::string EstimatorSpec::name() const {
    switch (kind) {
        case EstimatorKind::ImportanceWeighted: return "importance_weighted";
        case EstimatorKind::ShiftedImportanceWeighted: return "shifted_importance_weighted";
        case EstimatorKind::GraphHybrid: return "graph_hybrid";
        case EstimatorKind::FullInformation: return "full_information";
    }
    return "unknown";
}

Vector shift_constants(const EstimatorSpec& spec, const VectorRef& x) {
    const double threshold = spec.eta * spec.eta;
    return x.unaryExpr([&](double xi) { return xi < threshold ? 0.0 : 0.5; });
}

std::vector<int> hybrid_set(const EstimatorSpec& spec, const VectorRef& x) {
    require(spec.kind == EstimatorKind::GraphHybrid, "hybrid_set: estimator is not graph_hybrid");
    std::vector<int> out;
    for (int i = 0; i < spec.k; ++i)
        if (!spec.graph->has_self_loop(i) && x[i] > 0.5) out.push_back(i);
    return out;
}

namespace {

double bandit_loss(const Observation& signal) {
    const auto* own = std::get_if<double>(&signal);
    if (!own) throw DomainError("estimate: bandit estimator needs the played action's loss as its observation");
    return *own;
}

const double* find_revealed(const std::vector<RevealedLoss>& revealed, int vertex) {
    for (const auto& r : revealed)
        if (r.vertex == vertex) return &r.loss;
    return nullptr;
}

Vector graph_estimate(const EstimatorSpec& spec, const VectorRef& x, int action, const Observation& signal) {
    const auto* revealed = std::get_if<std::vector<RevealedLoss>>(&signal);
    if (!revealed) throw DomainError("estimate: graph estimator needs a set of revealed losses");
    const GraphSpec& graph = *spec.graph;
    Vector out = Vector::Zero(spec.k);
    for (int i = 0; i < spec.k; ++i) {
        const bool complementary = !graph.has_self_loop(i) && x[i] > 0.5;
        if (complementary) {
            if (action == i) {
                out[i] = 1.0;
                continue;
            }
            const double* loss = find_revealed(*revealed, i);
            if (!loss) throw DomainError("estimate: vertex " + std::to_string(i) + " was not revealed by action " +
                                         std::to_string(action) + " (graph is not strongly observable)");
            const double rest = x.head(i).sum() + x.tail(spec.k - i - 1).sum();
            out[i] = (*loss - 1.0) / rest + 1.0;
            continue;
        }
        const auto& from = graph.revealers(i);
        if (from.empty()) throw DomainError("estimate: vertex " + std::to_string(i) + " has no revealers");
        if (!std::binary_search(from.begin(), from.end(), action)) continue;
        const double* loss = find_revealed(*revealed, i);
        if (!loss) throw DomainError("estimate: observation is missing vertex " + std::to_string(i));
        double mass = 0.0;
        for (int b : from) mass += x[b];
        out[i] = *loss / mass;
    }
    return out;
}

}  // namespace

Vector estimate(const EstimatorSpec& spec, const VectorRef& x, std::size_t action, const Observation& signal) {
    require(x.size() == spec.k, "estimate: x has the wrong dimension");
    require(action < static_cast<std::size_t>(spec.k) || spec.kind == EstimatorKind::FullInformation,
            "estimate: action index out of range");
    const auto a = static_cast<Eigen::Index>(action);
    switch (spec.kind) {
        case EstimatorKind::ImportanceWeighted: {
            Vector out = Vector::Zero(spec.k);
            out[a] = bandit_loss(signal) / x[a];
            return out;
        }
        case EstimatorKind::ShiftedImportanceWeighted: {
            Vector out = shift_constants(spec, x);
            out[a] += (bandit_loss(signal) - out[a]) / x[a];
            return out;
        }
        case EstimatorKind::GraphHybrid:
            return graph_estimate(spec, x, static_cast<int>(action), signal);
        case EstimatorKind::FullInformation: {
            const auto* full = std::get_if<Vector>(&signal);
            if (!full || full->size() != spec.k)
                throw DomainError("estimate: full-information estimator needs the whole loss vector");
            return *full;
        }
    }
    return {};
}

Observation matching_signal(const EstimatorSpec& spec, std::size_t action, const VectorRef& loss) {
    require(loss.size() == spec.k, "matching_signal: loss has the wrong dimension");
    const auto a = static_cast<Eigen::Index>(action);
    switch (spec.kind) {
        case EstimatorKind::ImportanceWeighted:
        case EstimatorKind::ShiftedImportanceWeighted:
            return loss[a];
        case EstimatorKind::GraphHybrid: {
            std::vector<RevealedLoss> revealed;
            for (int j : spec.graph->observes(static_cast<int>(action))) revealed.push_back({j, loss[j]});
            return revealed;
        }
        case EstimatorKind::FullInformation:
            return Vector(loss);
    }
    return {};
}

double check_unbiased(const EstimatorSpec& spec, const VectorRef& x, const VectorRef& loss) {
    require(x.size() == spec.k && loss.size() == spec.k, "check_unbiased: dimension mismatch");
    Vector mean = Vector::Zero(spec.k);
    for (int a = 0; a < spec.k; ++a) {
        if (x[a] == 0.0) continue;
        mean += x[a] * estimate(spec, x, static_cast<std::size_t>(a), matching_signal(spec, a, loss));
    }
    return (mean - loss).cwiseAbs().maxCoeff();
}

}  // namespace osmd
