#include "osmd/analysis.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace osmd {

namespace {

EstimatorSpec coupled(const EstimatorSpec& estimator, double eta) {
    EstimatorSpec out = estimator;
    if (out.kind == EstimatorKind::ShiftedImportanceWeighted) out.eta = eta;
    return out;
}

void check_simplex_context(const Potential& F, const EstimatorSpec& estimator, const VectorRef& x,
                           const VectorRef& loss, double eta) {
    require(eta > 0.0, "stability: eta must be positive");
    require(x.size() == estimator.k && loss.size() == estimator.k, "stability: dimension mismatch");
    require(F.positive_domain(), "stability: " + F.name() + " is not a simplex potential");
    require_interior(F, x);
}

double chord_value(const Potential& F, const VectorRef& x, const VectorRef& y, const VectorRef& e, double s) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (e[i] == 0.0) continue;
        const double z = x[i] + s * (y[i] - x[i]);
        sum += e[i] * e[i] / F.d2h(z);
    }
    return sum;
}

}  // namespace

double stability_exact(const Potential& F, const EstimatorSpec& estimator, const VectorRef& x, const VectorRef& loss,
                       double eta) {
    check_simplex_context(F, estimator, x, loss, eta);
    const EstimatorSpec spec = coupled(estimator, eta);
    const Geometry geometry = Simplex{static_cast<int>(x.size())};
    double total = 0.0;
    for (Eigen::Index a = 0; a < x.size(); ++a) {
        const Vector e = estimate(spec, x, static_cast<std::size_t>(a), matching_signal(spec, a, loss));
        const MirrorStepRequest request{F, geometry, x, e, eta};
        const Vector f = constrained_step(request);
        total += x[a] * ((x - f).dot(e) - bregman(F, f, x) / eta);
    }
    return 2.0 / eta * total;
}

double stability_exact_full_info(const Potential& F, const LpBall& ball, const VectorRef& x, const VectorRef& loss,
                                 double eta) {
    require(eta > 0.0, "stability: eta must be positive");
    require(x.size() == ball.d && loss.size() == ball.d, "stability: dimension mismatch");
    const MirrorStepRequest request{F, ball, x, loss, eta};
    const Vector f = constrained_step(request);
    return 2.0 / eta * ((x - f).dot(loss) - bregman(F, f, x) / eta);
}

double chord_supremum(const Potential& F, const VectorRef& x, const VectorRef& y, const VectorRef& e) {
    require(x.size() == y.size() && x.size() == e.size(), "chord_supremum: dimension mismatch");
    constexpr int samples = 1001;
    double best = -1.0;
    int best_index = 0;
    for (int j = 0; j < samples; ++j) {
        const double value = chord_value(F, x, y, e, static_cast<double>(j) / (samples - 1));
        if (value > best) {
            best = value;
            best_index = j;
        }
    }
    double lo = std::max(0, best_index - 1) / double(samples - 1);
    double hi = std::min(samples - 1, best_index + 1) / double(samples - 1);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - ratio * (hi - lo);
    double b = lo + ratio * (hi - lo);
    double fa = chord_value(F, x, y, e, a);
    double fb = chord_value(F, x, y, e, b);
    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
        if (fa > fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = chord_value(F, x, y, e, a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = chord_value(F, x, y, e, b);
        }
        best = std::max({best, fa, fb});
    }
    return best;
}

std::optional<double> stability_lemma_bound(const Potential& F, const EstimatorSpec& estimator, const VectorRef& x,
                                            const VectorRef& loss, double eta, double shift, ChordEnd end) {
    check_simplex_context(F, estimator, x, loss, eta);
    const EstimatorSpec spec = coupled(estimator, eta);
    const Geometry geometry = Simplex{static_cast<int>(x.size())};
    double total = 0.0;
    for (Eigen::Index a = 0; a < x.size(); ++a) {
        const Vector e =
            (estimate(spec, x, static_cast<std::size_t>(a), matching_signal(spec, a, loss)).array() + shift).matrix();
        const MirrorStepRequest request{F, geometry, x, e, eta};
        Vector y;
        if (end == ChordEnd::Unconstrained) {
            auto g = unconstrained_step(request);
            if (!g) return std::nullopt;
            y = std::move(*g);
        } else {
            y = constrained_step(request);
        }
        total += x[a] * chord_supremum(F, x, y, e);
    }
    return total;
}

std::optional<double> stability_lemma_bound_full_info(const Potential& F, const LpBall& ball, const VectorRef& x,
                                                      const VectorRef& loss, double eta, ChordEnd end) {
    require(eta > 0.0, "stability: eta must be positive");
    require(x.size() == ball.d && loss.size() == ball.d, "stability: dimension mismatch");
    const MirrorStepRequest request{F, ball, x, loss, eta};
    Vector y;
    if (end == ChordEnd::Unconstrained) {
        auto g = unconstrained_step(request);
        if (!g) return std::nullopt;
        y = std::move(*g);
    } else {
        y = constrained_step(request);
    }
    return chord_supremum(F, x, y, loss);
}

StabilityReport stability_report(const Potential& F, const EstimatorSpec& estimator, const VectorRef& x,
                                 const VectorRef& loss, double eta, std::optional<double> shift) {
    StabilityReport report;
    report.potential = F.name();
    report.estimator = estimator.name();
    report.x = x;
    report.loss = loss;
    report.eta = eta;
    report.exact = stability_exact(F, estimator, x, loss, eta);
    report.lemma1_bound = stability_lemma_bound(F, estimator, x, loss, eta, 0.0, ChordEnd::Unconstrained);
    if (shift) {
        report.shift = *shift;
        report.lemma2_shifted_bound = stability_lemma_bound(F, estimator, x, loss, eta, *shift);
    }
    return report;
}

std::string context_hash(const StabilityReport& report) {
    std::uint64_t hash = 1469598103934665603ULL;
    auto mix = [&](const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            hash ^= bytes[i];
            hash *= 1099511628211ULL;
        }
    };
    mix(report.potential.data(), report.potential.size());
    mix(report.estimator.data(), report.estimator.size());
    mix(&report.eta, sizeof report.eta);
    mix(report.x.data(), sizeof(double) * static_cast<std::size_t>(report.x.size()));
    mix(report.loss.data(), sizeof(double) * static_cast<std::size_t>(report.loss.size()));
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << hash;
    return os.str();
}

std::string to_json(const StabilityReport& report) {
    nlohmann::json doc;
    doc["context_hash"] = context_hash(report);
    doc["context"] = {{"potential", report.potential},
                      {"estimator", report.estimator},
                      {"eta", report.eta},
                      {"x", std::vector<double>(report.x.data(), report.x.data() + report.x.size())},
                      {"loss", std::vector<double>(report.loss.data(), report.loss.data() + report.loss.size())}};
    doc["exact"] = report.exact;
    doc["bounds"] = nlohmann::json::object();
    doc["margins"] = nlohmann::json::object();
    if (report.lemma1_bound) {
        doc["bounds"]["lemma1"] = *report.lemma1_bound;
        doc["margins"]["lemma1"] = *report.lemma1_bound - report.exact;
    }
    if (report.lemma2_shifted_bound) {
        doc["bounds"]["lemma2_shifted"] = *report.lemma2_shifted_bound;
        doc["shift"] = report.shift;
        doc["margins"]["lemma2_shifted"] = *report.lemma2_shifted_bound - report.exact;
    }
    return doc.dump(2);
}

StabilityConstants stability_constants(const Potential& F, const EstimatorSpec& estimator,
                                       const ProblemInstance& instance) {
    const double k = instance.dim;
    const auto unsupported = [&]() -> DomainError {
        return DomainError("no stability constants for potential " + F.name() + " with estimator " + estimator.name() +
                           "; give eta explicitly");
    };
    switch (instance.kind) {
        case InstanceKind::KArmedBandit:
            if (F.kind() == PotentialKind::Negentropy && estimator.kind == EstimatorKind::ImportanceWeighted)
                return {k, 0.0};
            if (F.kind() == PotentialKind::TsallisHalf && estimator.kind == EstimatorKind::ImportanceWeighted)
                return {2.0 * std::sqrt(k), 0.0};
            if (F.kind() == PotentialKind::TsallisHalf && estimator.kind == EstimatorKind::ShiftedImportanceWeighted)
                return {std::sqrt(k) / 2.0, 12.0 * k};
            throw unsupported();
        case InstanceKind::GraphBandit: {
            if (F.kind() != PotentialKind::TsallisAlpha || estimator.kind != EstimatorKind::GraphHybrid) throw unsupported();
            const double alpha = independence_number(*instance.graph).value;
            const double log_k = std::log(k);
            return {8.0 * alpha * (std::log(4.0 * k / alpha) + log_k * log_k) + 9.0, 0.0};
        }
        case InstanceKind::LpFullInfo:
            if (F.kind() == PotentialKind::ClippedLp && estimator.kind == EstimatorKind::FullInformation)
                return {2.0, 0.0};
            throw unsupported();
    }
    throw unsupported();
}

double calibrated_stability(const Potential& F, const EstimatorSpec& estimator, std::uint64_t seed) {
    const int k = estimator.k;
    require(k >= 2, "calibrated_stability: needs at least two actions");
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vector> iterates{Vector::Constant(k, 1.0 / k)};
    for (int i = 0; i < k; ++i)
        for (double weight : {0.5, 0.9, 0.999}) {
            Vector x = Vector::Constant(k, (1.0 - weight) / (k - 1));
            x[i] = weight;
            iterates.push_back(x);
        }
    for (double concentration : {0.3, 1.0})
        for (int draw = 0; draw < 100; ++draw) {
            std::gamma_distribution<double> gamma(concentration, 1.0);
            Vector x(k);
            for (int i = 0; i < k; ++i) x[i] = gamma(gen) + 1e-9;
            iterates.push_back(x / x.sum());
        }
    double worst = 0.0;
    for (const auto& x : iterates) {
        Vector binary(k), uniform(k);
        for (int i = 0; i < k; ++i) {
            binary[i] = unit(gen) < 0.5 ? 1.0 : 0.0;
            uniform[i] = unit(gen);
        }
        for (const Vector& loss : {Vector(Vector::Ones(k)), binary, uniform})
            for (double eta : {1e-3, 1e-2, 0.1, 0.5, 1.0})
                worst = std::max(worst, stability_exact(F, estimator, x, loss, eta));
    }
    return worst;
}

TunedEta tune_eta(double diam, const StabilityConstants& constants, int n) {
    require(diam > 0.0, "tune_eta: diameter must be positive");
    require(constants.a > 0.0, "tune_eta: stability constant a must be positive");
    require(constants.b >= 0.0, "tune_eta: stability constant b must be nonnegative");
    require(n >= 1, "tune_eta: horizon must be positive");
    const double eta = std::sqrt(2.0 * diam / (n * constants.a));
    const double bound = std::sqrt(2.0 * constants.a * diam * n) + constants.b * diam / constants.a;
    return {eta, bound};
}

double bandit_stability_sup(const Potential& F, const EstimatorSpec& estimator) {
    require(estimator.kind == EstimatorKind::ImportanceWeighted,
            "bandit_stability_sup: only the importance-weighted estimator has a learning-rate free bound");
    const double k = estimator.k;
    if (F.kind() == PotentialKind::Negentropy) return k;
    if (F.kind() == PotentialKind::TsallisHalf) return 2.0 * std::sqrt(k);
    throw DomainError("bandit_stability_sup: no bound for potential " + F.name());
}

double bregman_on_support(const Potential& F, const VectorRef& x, const VectorRef& y) {
    require(x.size() == y.size(), "bregman_on_support: dimension mismatch");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) {
            require(x[i] == 0.0, "bregman_on_support: x leaves the support of y");
            continue;
        }
        sum += bregman_term(F, x[i], y[i]);
    }
    return sum;
}

namespace {

struct Face {
    std::vector<Eigen::Index> index;
    Vector x;
};

Face support_face(const VectorRef& x) {
    Face face;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x[i] > 0.0) face.index.push_back(i);
    face.x.resize(static_cast<Eigen::Index>(face.index.size()));
    for (std::size_t j = 0; j < face.index.size(); ++j) face.x[static_cast<Eigen::Index>(j)] = x[face.index[j]];
    return face;
}

}  // namespace

double stability_exact_on_support(const Potential& F, const EstimatorSpec& estimator, const VectorRef& x,
                                  const VectorRef& loss, double eta) {
    require(estimator.kind == EstimatorKind::ImportanceWeighted ||
                estimator.kind == EstimatorKind::ShiftedImportanceWeighted,
            "stability_exact_on_support: needs a bandit estimator");
    const Face face = support_face(x);
    const auto m = static_cast<int>(face.index.size());
    require(m >= 1, "stability_exact_on_support: empty support");
    if (m == 1) return 0.0;
    Vector face_loss(m);
    for (int j = 0; j < m; ++j) face_loss[j] = loss[face.index[static_cast<std::size_t>(j)]];
    EstimatorSpec spec = estimator;
    spec.k = m;
    return stability_exact(F, spec, face.x, face_loss, eta);
}

RoundInformation information_ratio(const MtsEnumeration& enumeration, std::size_t node, const Potential& F,
                                   double stability_sup) {
    require(node < enumeration.nodes.size(), "information_ratio: node index out of range");
    require(stability_sup > 0.0, "information_ratio: stability bound must be positive");
    const MtsNode& current = enumeration.nodes[node];
    require(current.t <= enumeration.horizon, "information_ratio: leaf node has no round to play");
    RoundInformation info;
    info.node = node;
    info.t = current.t;
    info.expected_regret = current.expected_regret;
    for (const auto& branch : current.branches)
        info.expected_divergence +=
            branch.probability * bregman_on_support(F, enumeration.nodes[branch.child].x, current.x);
    const double squared = info.expected_regret * info.expected_regret;
    if (info.expected_divergence > 0.0) {
        info.ratio = squared / info.expected_divergence;
    } else {
        info.degenerate = std::abs(info.expected_regret) > 1e-15;
        info.ratio = info.degenerate ? std::numeric_limits<double>::infinity() : 0.0;
    }
    info.adaptive_eta = std::sqrt(2.0 * info.expected_divergence / stability_sup);
    info.adaptive_bound = std::sqrt(2.0 * stability_sup * info.expected_divergence);
    return info;
}

std::vector<RoundInformation> information_ratios(const MtsEnumeration& enumeration, const Potential& F,
                                                 double stability_sup) {
    std::vector<RoundInformation> out;
    for (std::size_t i = 0; i < enumeration.nodes.size(); ++i)
        if (enumeration.nodes[i].t <= enumeration.horizon && enumeration.nodes[i].reach > 0.0)
            out.push_back(information_ratio(enumeration, i, F, stability_sup));
    return out;
}

double martingale_defect(const MtsEnumeration& enumeration) {
    double worst = 0.0;
    for (const auto& node : enumeration.nodes) {
        if (node.t > enumeration.horizon) continue;
        Vector mean = Vector::Zero(node.x.size());
        for (const auto& branch : node.branches) mean += branch.probability * enumeration.nodes[branch.child].x;
        worst = std::max(worst, (mean - node.x).cwiseAbs().maxCoeff());
    }
    return worst;
}

TelescopingCheck telescoping(const MtsEnumeration& enumeration, const Potential& F) {
    TelescopingCheck check{0.0, 0.0, diameter_upper_bound(F, Simplex{enumeration.k})};
    double final_value = 0.0;
    for (const auto& node : enumeration.nodes) {
        if (node.t > enumeration.horizon) {
            final_value += node.reach * value(F, node.x);
            continue;
        }
        for (const auto& branch : node.branches)
            check.divergence_sum +=
                node.reach * branch.probability * bregman_on_support(F, enumeration.nodes[branch.child].x, node.x);
    }
    check.potential_gap = final_value - value(F, enumeration.nodes.front().x);
    return check;
}

BayesBoundCheck mts_stability_bound(const MtsEnumeration& enumeration, const AtomicPrior& prior,
                                    const Potential& F, const EstimatorSpec& estimator, double eta) {
    require(eta > 0.0, "mts_stability_bound: eta must be positive");
    BayesBoundCheck check{eta, enumeration.bayes_regret, 0.0, diameter_upper_bound(F, Simplex{enumeration.k}), 0.0};
    for (const auto& node : enumeration.nodes) {
        if (node.t > enumeration.horizon || node.reach == 0.0) continue;
        for (std::size_t j = 0; j < prior.size(); ++j) {
            const double w = node.posterior[static_cast<Eigen::Index>(j)];
            if (w == 0.0) continue;
            const Vector& loss = prior.sequences[j][static_cast<std::size_t>(node.t - 1)];
            check.stability_sum += node.reach * w * stability_exact_on_support(F, estimator, node.x, loss, eta);
        }
    }
    check.bound = check.diameter / eta + eta / 2.0 * check.stability_sum;
    return check;
}

double bayes_regret_bound(double diameter, double stability_sup, int n) {
    require(diameter > 0.0 && stability_sup > 0.0 && n >= 1, "bayes_regret_bound: inputs must be positive");
    return std::sqrt(2.0 * diameter * stability_sup * n);
}

}  // namespace osmd
