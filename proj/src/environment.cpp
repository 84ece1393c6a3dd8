#include "osmd/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace osmd {

bool same_observation(const Observation& a, const Observation& b) {
    if (a.index() != b.index()) return false;
    if (const auto* va = std::get_if<Vector>(&a)) {
        const auto& vb = std::get<Vector>(b);
        return va->size() == vb.size() && *va == vb;
    }
    return a == b;
}

namespace {

ProblemInstance checked(ProblemInstance instance) {
    if (const auto* fixed = std::get_if<FixedSequence>(&instance.source)) {
        require(fixed->losses.size() >= static_cast<std::size_t>(instance.horizon),
                "fixed loss sequence is shorter than the horizon");
        for (const auto& loss : fixed->losses) require_loss_in_space(instance, loss);
    } else if (const auto* bernoulli = std::get_if<BernoulliLosses>(&instance.source)) {
        require(bernoulli->means.size() == instance.dim, "Bernoulli means have the wrong dimension");
        require(bernoulli->means.minCoeff() >= 0.0 && bernoulli->means.maxCoeff() <= 1.0,
                "Bernoulli means must lie in [0, 1]");
    }
    return instance;
}

}  // namespace

ProblemInstance ProblemInstance::k_armed(int k, LossSource source, int horizon) {
    require(k >= 1, "k_armed: k must be positive");
    require(horizon >= 1, "k_armed: horizon must be positive");
    return checked({InstanceKind::KArmedBandit, k, nullptr, 2.0, std::move(source), horizon});
}

ProblemInstance ProblemInstance::graph_bandit(std::shared_ptr<const GraphSpec> graph, LossSource source, int horizon) {
    require(graph != nullptr, "graph_bandit: missing graph");
    require(horizon >= 1, "graph_bandit: horizon must be positive");
    const int k = graph->k();
    return checked({InstanceKind::GraphBandit, k, std::move(graph), 2.0, std::move(source), horizon});
}

ProblemInstance ProblemInstance::lp_full_info(double p, int d, LossSource source, int horizon) {
    require(p >= 1.0 && p <= 2.0, "lp_full_info: p must lie in [1, 2]");
    require(d >= 1, "lp_full_info: d must be positive");
    require(horizon >= 1, "lp_full_info: horizon must be positive");
    return checked({InstanceKind::LpFullInfo, d, nullptr, p, std::move(source), horizon});
}

Geometry ProblemInstance::geometry() const {
    if (finite_actions()) return Simplex{dim};
    return LpBall{p, dim};
}

void require_loss_in_space(const ProblemInstance& instance, const VectorRef& loss) {
    require(loss.size() == instance.dim, "loss vector has the wrong dimension");
    if (instance.finite_actions()) {
        require(loss.minCoeff() >= 0.0 && loss.maxCoeff() <= 1.0, "loss vector is outside [0,1]^k");
    } else {
        require(lp_norm(loss, conjugate_exponent(instance.p)) <= 1.0 + 1e-12, "loss vector is outside the unit l_q ball");
    }
}

Observation signal(const ProblemInstance& instance, std::size_t arm, const VectorRef& loss) {
    require(instance.finite_actions(), "signal: instance has a continuous action set");
    require(arm < static_cast<std::size_t>(instance.dim), "signal: action index out of range");
    require_loss_in_space(instance, loss);
    const auto a = static_cast<Eigen::Index>(arm);
    if (instance.kind == InstanceKind::KArmedBandit) return loss[a];
    std::vector<RevealedLoss> revealed;
    for (int j : instance.graph->observes(static_cast<int>(arm))) revealed.push_back({j, loss[j]});
    return revealed;
}

Observation signal(const ProblemInstance& instance, const VectorRef& point, const VectorRef& loss) {
    require(instance.kind == InstanceKind::LpFullInfo, "signal: point actions need the full-information ball");
    require(point.size() == instance.dim, "signal: action has the wrong dimension");
    require_loss_in_space(instance, loss);
    return Vector(loss);
}

namespace {

double sphere_scale(const ProblemInstance& instance) {
    const double q = conjugate_exponent(instance.p);
    return std::isinf(q) ? 1.0 : std::pow(static_cast<double>(instance.dim), -1.0 / q);
}

}  // namespace

Vector draw_loss(const ProblemInstance& instance, int t, std::mt19937_64& rng) {
    require(t >= 1 && t <= instance.horizon, "draw_loss: round outside the horizon");
    return std::visit(
        [&](const auto& source) -> Vector {
            using S = std::decay_t<decltype(source)>;
            if constexpr (std::is_same_v<S, FixedSequence>) {
                require(static_cast<std::size_t>(t) <= source.losses.size(), "draw_loss: fixed sequence exhausted");
                return source.losses[t - 1];
            } else if constexpr (std::is_same_v<S, BernoulliLosses>) {
                std::uniform_real_distribution<double> unit(0.0, 1.0);
                const double high = instance.finite_actions() ? 1.0 : sphere_scale(instance);
                const double low = instance.finite_actions() ? 0.0 : -high;
                Vector loss(source.means.size());
                for (Eigen::Index i = 0; i < loss.size(); ++i) loss[i] = unit(rng) < source.means[i] ? high : low;
                return loss;
            } else {
                const double scale = sphere_scale(instance);
                std::bernoulli_distribution coin(0.5);
                Vector loss(instance.dim);
                for (Eigen::Index i = 0; i < loss.size(); ++i) loss[i] = coin(rng) ? scale : -scale;
                return loss;
            }
        },
        instance.source);
}

std::vector<Vector> draw_losses(const ProblemInstance& instance, std::mt19937_64& rng) {
    std::vector<Vector> losses;
    losses.reserve(instance.horizon);
    for (int t = 1; t <= instance.horizon; ++t) losses.push_back(draw_loss(instance, t, rng));
    return losses;
}

Vector best_action(const ProblemInstance& instance, const VectorRef& cumulative) {
    require(cumulative.size() == instance.dim, "best_action: dimension mismatch");
    Vector a = Vector::Zero(instance.dim);
    if (instance.finite_actions()) {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < cumulative.size(); ++i)
            if (cumulative[i] < cumulative[best]) best = i;
        a[best] = 1.0;
        return a;
    }
    const double q = conjugate_exponent(instance.p);
    const double norm = lp_norm(cumulative, q);
    if (norm == 0.0) return a;
    if (std::isinf(q)) {
        Eigen::Index j = 0;
        cumulative.cwiseAbs().maxCoeff(&j);
        a[j] = cumulative[j] > 0.0 ? -1.0 : 1.0;
        return a;
    }
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double c = cumulative[i];
        if (c == 0.0) continue;
        a[i] = -(c > 0.0 ? 1.0 : -1.0) * std::pow(std::abs(c) / norm, q - 1.0);
    }
    return a;
}

double comparator_loss(const ProblemInstance& instance, const VectorRef& cumulative) {
    require(cumulative.size() == instance.dim, "comparator_loss: dimension mismatch");
    if (instance.finite_actions()) return cumulative.minCoeff();
    return -lp_norm(cumulative, conjugate_exponent(instance.p));
}

double regret(const ProblemInstance& instance, const std::vector<std::size_t>& arms, const std::vector<Vector>& losses) {
    require(arms.size() == losses.size(), "regret: actions and losses differ in length");
    require(instance.finite_actions(), "regret: index actions need a finite action set");
    if (losses.empty()) return 0.0;
    Vector cumulative = Vector::Zero(instance.dim);
    double incurred = 0.0;
    for (std::size_t t = 0; t < arms.size(); ++t) {
        require(arms[t] < static_cast<std::size_t>(instance.dim), "regret: action index out of range");
        incurred += losses[t][static_cast<Eigen::Index>(arms[t])];
        cumulative += losses[t];
    }
    return incurred - comparator_loss(instance, cumulative);
}

double regret(const ProblemInstance& instance, const std::vector<Vector>& actions, const std::vector<Vector>& losses) {
    require(actions.size() == losses.size(), "regret: actions and losses differ in length");
    if (losses.empty()) return 0.0;
    Vector cumulative = Vector::Zero(instance.dim);
    double incurred = 0.0;
    for (std::size_t t = 0; t < actions.size(); ++t) {
        incurred += actions[t].dot(losses[t]);
        cumulative += losses[t];
    }
    return incurred - comparator_loss(instance, cumulative);
}

std::vector<Vector> load_loss_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open loss file " + path.string());
    std::vector<Vector> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> values;
        std::stringstream cells(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw DomainError("loss file " + path.string() + ": non-numeric row " + std::to_string(rows.size() + 1));
        }
        first = false;
        if (!rows.empty() && static_cast<std::size_t>(rows.front().size()) != values.size())
            throw DomainError("loss file " + path.string() + ": ragged row " + std::to_string(rows.size() + 1));
        rows.push_back(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
    }
    return rows;
}

std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t run, StreamPurpose purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32),
                      static_cast<std::uint32_t>(purpose)};
    return std::mt19937_64(seq);
}

}  // namespace osmd
