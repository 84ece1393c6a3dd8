#include "osmd/suites.hpp"

#include "osmd/analysis.hpp"
#include "osmd/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

namespace osmd {

namespace {

using Clock = std::chrono::steady_clock;

std::string format(const char* pattern, double a, double b) {
    char buffer[256];
    std::snprintf(buffer, sizeof buffer, pattern, a, b);
    return buffer;
}

/// Tracks the worst value/threshold pair seen for one inequality.
class Worst {
public:
    explicit Worst(std::string name) : name_(std::move(name)) {}

    void add(double value, double bound) {
        ++count_;
        if (!std::isfinite(value) || value > bound) passed_ = false;
        if (!std::isfinite(value) || value - bound > gap_) {
            gap_ = std::isfinite(value) ? value - bound : HUGE_VAL;
            value_ = value;
            bound_ = bound;
        }
    }

    SuiteCheck check() const {
        char buffer[256];
        std::snprintf(buffer, sizeof buffer, "%d cases, worst %.6g vs bound %.6g (margin %.3g)", count_, value_, bound_,
                      bound_ - value_);
        return {name_, passed_ && count_ > 0, buffer};
    }

private:
    std::string name_;
    int count_ = 0;
    bool passed_ = true;
    double gap_ = -HUGE_VAL;
    double value_ = 0.0;
    double bound_ = 0.0;
};

Vector dirichlet(int k, double concentration, std::mt19937_64& gen) {
    std::gamma_distribution<double> gamma(concentration, 1.0);
    Vector x(k);
    for (int i = 0; i < k; ++i) x[i] = gamma(gen);
    if (!(x.sum() > 0.0)) x.setOnes();
    return x / x.sum();
}

/// Interior simplex point. Mixes flat, sparse and near-vertex shapes so that
/// tiny coordinates and a dominant coordinate both occur.
Vector random_iterate(int k, std::mt19937_64& gen) {
    std::uniform_int_distribution<int> shape(0, 3);
    Vector x;
    switch (shape(gen)) {
        case 0: x = dirichlet(k, 1.0, gen); break;
        case 1: x = dirichlet(k, 0.2, gen); break;
        case 2: x = dirichlet(k, 5.0, gen); break;
        default: {
            x = 1e-4 * dirichlet(k, 1.0, gen);
            x[std::uniform_int_distribution<int>(0, k - 1)(gen)] += 1.0;
        }
    }
    x = x.cwiseMax(1e-9);
    return x / x.sum();
}

Vector random_loss(int k, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector loss(k);
    const bool binary = unit(gen) < 0.5;
    for (int i = 0; i < k; ++i) loss[i] = binary ? (unit(gen) < 0.5 ? 0.0 : 1.0) : unit(gen);
    return loss;
}

double log_uniform(double lo, double hi, std::mt19937_64& gen) {
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(gen));
}

double mean_final(const AlgorithmResult& result) {
    double sum = 0.0;
    for (const auto& trace : result.traces) sum += trace.checkpoints.back().cum_regret;
    return sum / static_cast<double>(result.traces.size());
}

/// Realised regret of the player who always plays the uniform mixture, on
/// the same loss draws as the runs of `config`.
double uniform_player_regret(const RunConfig& config) {
    double sum = 0.0;
    for (int r = 0; r < config.repeats; ++r) {
        auto stream = make_stream(config.seed, static_cast<std::uint64_t>(r), StreamPurpose::Losses);
        const auto losses = draw_losses(config.instance, stream);
        Vector total = Vector::Zero(config.instance.dim);
        for (const auto& loss : losses) total += loss;
        sum += total.mean() - total.minCoeff();
    }
    return sum / config.repeats;
}

}  // namespace

bool SuiteResult::passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"unbiased", "exp3", "lemma4", "graph", "lp", "bayes"};
    return names;
}

SuiteResult unbiased_suite() {
    const auto start = Clock::now();
    SuiteResult result{"unbiased", {}, 0.0};
    std::mt19937_64 gen(101);
    std::uniform_int_distribution<int> dim(2, 10);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    constexpr int kContexts = 1000;
    constexpr double kTolerance = 1e-12;

    Worst iw("importance weighted"), shifted("shifted importance weighted"), hybrid("graph hybrid"),
        full("full information");
    for (int c = 0; c < kContexts; ++c) {
        const int k = dim(gen);
        const Vector x = random_iterate(k, gen);
        const Vector loss = random_loss(k, gen);
        iw.add(check_unbiased(EstimatorSpec::importance_weighted(k), x, loss), kTolerance);
        full.add(check_unbiased(EstimatorSpec::full_information(k), x, loss), kTolerance);
        shifted.add(check_unbiased(EstimatorSpec::shifted(k, log_uniform(1e-3, 0.5, gen)), x, loss), kTolerance);
        auto graph = std::make_shared<const GraphSpec>(
            GraphSpec::random_strongly_observable(k, unit(gen), unit(gen), gen()));
        hybrid.add(check_unbiased(EstimatorSpec::graph_hybrid(graph), x, loss), kTolerance);
    }
    result.checks = {iw.check(), shifted.check(), hybrid.check(), full.check()};
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

SuiteResult exp3_suite() {
    const auto start = Clock::now();
    SuiteResult result{"exp3", {}, 0.0};
    std::mt19937_64 gen(202);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    constexpr int kInstances = 10;
    constexpr int kRounds = 100;

    Worst deviation("mirror step vs exponential weights closed form");
    for (int instance = 0; instance < kInstances; ++instance) {
        const int k = std::uniform_int_distribution<int>(2, 10)(gen);
        const double eta = log_uniform(0.01, 0.5, gen);
        const auto F = Potential::negentropy();
        const auto estimator = EstimatorSpec::importance_weighted(k);
        Vector x = Vector::Constant(k, 1.0 / k);
        Vector cumulative = Vector::Zero(k);
        for (int t = 0; t < kRounds; ++t) {
            const Vector loss = random_loss(k, gen);
            std::discrete_distribution<int> pick(x.data(), x.data() + k);
            const auto arm = static_cast<std::size_t>(pick(gen));
            const Vector estimate_t = estimate(estimator, x, arm, matching_signal(estimator, arm, loss));
            cumulative += estimate_t;
            x = constrained_step({F, Simplex{k}, x, estimate_t, eta});
            const Vector logits = -eta * cumulative;
            const Vector weights = (logits.array() - logits.maxCoeff()).exp().matrix();
            deviation.add((x - weights / weights.sum()).cwiseAbs().maxCoeff(), 1e-9);
        }
    }
    result.checks = {deviation.check()};
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

SuiteResult lemma4_suite() {
    const auto start = Clock::now();
    SuiteResult result{"lemma4", {}, 0.0};
    std::mt19937_64 gen(303);
    constexpr int kContexts = 1000;
    for (int k : {2, 5, 10}) {
        for (double eta : {0.01, 0.1, 0.4}) {
            char label[96];
            std::snprintf(label, sizeof label, "k=%d eta=%g", k, eta);
            Worst shifted(std::string("shifted 1/2-Tsallis <= sqrt(k)/2 + 12 k eta, ") + label);
            Worst plain(std::string("negentropy importance weighted <= k, ") + label);
            const double shifted_bound = std::sqrt(static_cast<double>(k)) / 2.0 + 12.0 * k * eta;
            for (int c = 0; c < kContexts; ++c) {
                Vector x = random_iterate(k, gen);
                if (c % 4 == 3) {
                    // Push one coordinate under η² so the unshifted branch is exercised.
                    const int i = std::uniform_int_distribution<int>(0, k - 1)(gen);
                    x[i] = 0.5 * eta * eta * std::uniform_real_distribution<double>(0.01, 1.0)(gen);
                    x /= x.sum();
                }
                const Vector loss = random_loss(k, gen);
                shifted.add(stability_exact(Potential::tsallis_half(), EstimatorSpec::shifted(k, eta), x, loss, eta),
                            shifted_bound);
                plain.add(stability_exact(Potential::negentropy(), EstimatorSpec::importance_weighted(k), x, loss, eta),
                          static_cast<double>(k));
            }
            result.checks.push_back(shifted.check());
            result.checks.push_back(plain.check());
        }
    }
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

SuiteResult graph_suite(int workers) {
    const auto start = Clock::now();
    SuiteResult result{"graph", {}, 0.0};
    std::mt19937_64 gen(404);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Worst neighbourhood("sum_i p_i / P(revealers of i) <= 4 a log(4k / (a min p)), 1000 random (graph, p), k <= 10");
    int approximate = 0;
    for (int c = 0; c < 1000; ++c) {
        const int k = std::uniform_int_distribution<int>(2, 10)(gen);
        const auto graph = GraphSpec::erdos_renyi(k, unit(gen), 1.0, gen());
        if (!independence_number(graph).exact) ++approximate;
        Vector p = dirichlet(k, c % 2 == 0 ? 1.0 : 0.1, gen).cwiseMax(2e-6);
        p /= p.sum();
        neighbourhood.add(lemma5_lhs(graph, p), lemma5_rhs(graph, p));
    }
    result.checks.push_back(neighbourhood.check());
    result.checks.push_back({"independence numbers exact", approximate == 0,
                             std::to_string(approximate) + " approximate values"});

    Worst stability("alpha-Tsallis graph stability <= 8 a (log(4k/a) + log^2 k) + 9, 200 graphs, 8 <= k <= 10");
    for (int g = 0; g < 200; ++g) {
        const int k = std::uniform_int_distribution<int>(8, 10)(gen);
        auto graph =
            std::make_shared<const GraphSpec>(GraphSpec::random_strongly_observable(k, unit(gen), unit(gen), gen()));
        const double alpha = independence_number(*graph).value;
        const double log_k = std::log(static_cast<double>(k));
        const double bound = 8.0 * alpha * (std::log(4.0 * k / alpha) + log_k * log_k) + 9.0;
        const auto F = Potential::graph_tsallis(k);
        const auto estimator = EstimatorSpec::graph_hybrid(graph);
        for (int c = 0; c < 5; ++c)
            stability.add(stability_exact(F, estimator, random_iterate(k, gen), random_loss(k, gen),
                                          log_uniform(1e-3, 1.0, gen)),
                          bound);
    }
    result.checks.push_back(stability.check());

    constexpr int kArms = 10;
    Vector means = Vector::Constant(kArms, 0.55);
    means[0] = 0.45;
    const std::vector<std::pair<std::string, GraphSpec>> graphs{
        {"bandit", GraphSpec::bandit(kArms)},
        {"cycle with self-loops", GraphSpec::cycle(kArms, true)},
        {"random strongly observable", GraphSpec::random_strongly_observable(kArms, 0.3, 0.5, 7)},
        {"complete", GraphSpec::complete(kArms)},
    };
    for (const auto& [label, spec] : graphs) {
        auto graph = std::make_shared<const GraphSpec>(spec);
        RunConfig config;
        config.experiment = "graph";
        config.instance = ProblemInstance::graph_bandit(graph, BernoulliLosses{means}, 10000);
        config.repeats = 20;
        config.algorithms.push_back(
            {"graph-osmd", Potential::graph_tsallis(kArms), EstimatorSpec::graph_hybrid(graph), std::nullopt});
        const auto run = execute(config, workers);
        const double regret = mean_final(run.algorithms.front());
        const double baseline = uniform_player_regret(config);
        char detail[160];
        std::snprintf(detail, sizeof detail, "mean final regret %.4g vs half the uniform player's %.4g (eta %.4g)",
                      regret, 0.5 * baseline, run.algorithms.front().eta.eta);
        result.checks.push_back({"graph bandit regret sublinear, " + label + " graph, k=10 n=1e4 20 seeds",
                                 regret < 0.5 * baseline, detail});
    }
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

SuiteResult lp_suite(int workers) {
    const auto start = Clock::now();
    SuiteResult result{"lp", {}, 0.0};
    std::mt19937_64 gen(505);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::vector<double> exponents{1.0, 1.01, 1.1, 1.5, 1.9, 2.0};
    const std::vector<int> dims{2, 10, 100};

    Worst clip("h'' = min{|x|^(p-2), d}");
    Worst knot("h, h', h'' continuous at the knot");
    Worst diameter("sampled diameter <= min{2/(p-1), 2 log d + 1}");
    for (double p : exponents)
        for (int d : dims) {
            const auto F = Potential::clipped_lp(p, d);
            for (int e = -120; e <= 20; ++e)
                for (double sign : {-1.0, 1.0}) {
                    const double x = sign * std::pow(10.0, e / 10.0);
                    const double expected = std::min(std::pow(std::abs(x), p - 2.0), static_cast<double>(d));
                    clip.add(std::abs(F.d2h(x) - expected), 1e-9);
                }
            clip.add(std::abs(F.d2h(0.0) - (p == 2.0 ? 1.0 : static_cast<double>(d))), 1e-9);
            if (F.knot() > 0.0)
                for (double side : {-1.0, 1.0}) {
                    const double z = side * F.knot();
                    const double below = z * (1.0 - 4e-16), above = z * (1.0 + 4e-16);
                    knot.add(std::abs(F.h(below) - F.h(above)), 1e-9);
                    knot.add(std::abs(F.dh(below) - F.dh(above)), 1e-9);
                    knot.add(std::abs(F.d2h(below) - F.d2h(above)), 1e-9);
                }

            const double bound = p == 1.0 ? 2.0 * std::log(d) + 1.0 : std::min(2.0 / (p - 1.0), 2.0 * std::log(d) + 1.0);
            double lo = value(F, Vector::Zero(d)), hi = lo;
            for (int s = 0; s < 10000; ++s) {
                Vector x(d);
                if (s % 5 == 0) {
                    // Sparse points: the potential is largest on the axes.
                    x.setZero();
                    x[std::uniform_int_distribution<int>(0, d - 1)(gen)] = normal(gen);
                } else {
                    for (int i = 0; i < d; ++i) x[i] = normal(gen);
                }
                const double radius = s % 2 == 0 ? 1.0 : std::pow(unit(gen), 1.0 / d);
                x *= radius / lp_norm(x, p);
                const double v = value(F, x);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            diameter.add(hi - lo, bound);
        }
    result.checks.push_back(clip.check());
    result.checks.push_back(knot.check());
    result.checks.push_back(diameter.check());

    Worst chord("chord stability bound <= 2 on 1000 random losses in the dual ball");
    for (int c = 0; c < 1000; ++c) {
        const double p = exponents[static_cast<std::size_t>(c) % exponents.size()];
        const int d = std::uniform_int_distribution<int>(2, 50)(gen);
        const double q = conjugate_exponent(p);
        const auto F = Potential::clipped_lp(p, d);
        Vector x(d), loss(d);
        for (int i = 0; i < d; ++i) {
            x[i] = normal(gen);
            loss[i] = normal(gen);
        }
        x *= std::pow(unit(gen), 1.0 / d) / lp_norm(x, p);
        loss *= (c % 2 == 0 ? 1.0 : unit(gen)) / lp_norm(loss, q);
        const auto bound =
            stability_lemma_bound_full_info(F, LpBall{p, d}, x, loss, log_uniform(1e-3, 1.0, gen), ChordEnd::Constrained);
        chord.add(bound.value_or(HUGE_VAL), 2.0);
    }
    result.checks.push_back(chord.check());

    RunConfig config;
    config.experiment = "lp";
    config.instance = ProblemInstance::lp_full_info(1.1, 50, RademacherLosses{}, 10000);
    config.repeats = 20;
    config.algorithms.push_back(
        {"clipped-lp", Potential::clipped_lp(1.1, 50), EstimatorSpec::full_information(50), std::nullopt});
    const auto run = execute(config, workers);
    const double regret = mean_final(run.algorithms.front());
    const double diam = diameter_upper_bound(Potential::clipped_lp(1.1, 50), LpBall{1.1, 50});
    const double bound = std::sqrt(2.0 * diam * 2.0 * 10000.0);
    result.checks.push_back({"Rademacher regret p=1.1 d=50 n=1e4 20 seeds <= sqrt(2 diam 2 n)", regret <= bound,
                             format("mean final regret %.6g vs bound %.6g", regret, bound)});
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

namespace {

/// Losses on {0, 1/2, 1}, so observations collide across atoms. At least two
/// atoms disagree on the optimal action.
AtomicPrior random_prior(int k, int n, int atoms, std::mt19937_64& gen) {
    const double levels[] = {0.0, 0.5, 1.0};
    std::uniform_int_distribution<int> level(0, 2);
    AtomicPrior prior;
    std::set<std::size_t> optima;
    while (optima.size() < 2) {
        prior = AtomicPrior{};
        optima.clear();
        Vector w = dirichlet(atoms, 1.0, gen).cwiseMax(1e-3);
        for (int j = 0; j < atoms; ++j) {
            prior.weights.push_back(w[j] / w.sum());
            std::vector<Vector> sequence;
            for (int t = 0; t < n; ++t) {
                Vector loss(k);
                for (int i = 0; i < k; ++i) loss[i] = levels[level(gen)];
                sequence.push_back(loss);
            }
            optima.insert(optimal_action(sequence));
            prior.sequences.push_back(sequence);
        }
    }
    double total = 0.0;
    for (double v : prior.weights) total += v;
    for (double& v : prior.weights) v /= total;
    prior.validate();
    return prior;
}

}  // namespace

SuiteResult bayes_suite() {
    const auto start = Clock::now();
    SuiteResult result{"bayes", {}, 0.0};
    std::mt19937_64 gen(606);
    struct Shape {
        int k, n, atoms;
    };
    const std::vector<Shape> shapes{{2, 3, 4}, {2, 4, 16}, {3, 3, 8}, {3, 4, 16}};

    Worst monte_carlo("|enumerated - Monte Carlo| <= 3 standard errors, 1e6 runs");
    Worst stability_bound("Bayesian regret <= diam/eta + (eta/2) E[sum stab], eta in {0.1, 0.5, 1}");
    Worst telescope_gap("E[sum D_F] <= E[F(X_n+1)] - F(X_1)");
    Worst telescope_diam("E[F(X_n+1)] - F(X_1) <= diam");
    Worst ratio("information ratio <= 2 ess-sup stab, every round");
    Worst sqrt_bound("Bayesian regret <= sqrt(2 diam S n)");
    Worst martingale("martingale defect of X_t");
    int degenerate = 0;

    for (const auto& shape : shapes) {
        const auto prior = random_prior(shape.k, shape.n, shape.atoms, gen);
        const auto instance = ProblemInstance::k_armed(
            shape.k, FixedSequence{std::vector<Vector>(static_cast<std::size_t>(shape.n), Vector::Zero(shape.k))},
            shape.n);
        const auto tree = enumerate_mts(prior, instance);
        martingale.add(martingale_defect(tree), 1e-10);

        constexpr int kSamples = 1000000;
        std::mt19937_64 mc = make_stream(gen(), 0, StreamPurpose::Actions);
        double sum = 0.0, squares = 0.0;
        for (int s = 0; s < kSamples; ++s) {
            const double r = mts_sample_regret(prior, instance, tree.atom_optima, mc);
            sum += r;
            squares += r * r;
        }
        const double mean = sum / kSamples;
        const double sd = std::sqrt(std::max(0.0, (squares - kSamples * mean * mean) / (kSamples - 1)));
        monte_carlo.add(std::abs(tree.bayes_regret - mean), 3.0 * sd / std::sqrt(static_cast<double>(kSamples)));

        for (const auto& F : {Potential::negentropy(), Potential::tsallis_half()}) {
            const auto estimator = EstimatorSpec::importance_weighted(shape.k);
            const double S = bandit_stability_sup(F, estimator);
            for (double eta : {0.1, 0.5, 1.0}) {
                const auto check = mts_stability_bound(tree, prior, F, estimator, eta);
                stability_bound.add(check.bayes_regret, check.bound);
            }
            const auto tel = telescoping(tree, F);
            telescope_gap.add(tel.divergence_sum, tel.potential_gap + 1e-10);
            telescope_diam.add(tel.potential_gap, tel.diameter);
            for (const auto& info : information_ratios(tree, F, S)) {
                if (info.degenerate) ++degenerate;
                ratio.add(info.ratio, 2.0 * S);
            }
            sqrt_bound.add(tree.bayes_regret, bayes_regret_bound(diameter_upper_bound(F, Simplex{shape.k}), S, shape.n));
        }
    }
    result.checks = {monte_carlo.check(), stability_bound.check(), telescope_gap.check(), telescope_diam.check(),
                     ratio.check(),       sqrt_bound.check(),      martingale.check()};
    result.checks.push_back(
        {"no degenerate information ratio", degenerate == 0, std::to_string(degenerate) + " degenerate rounds"});
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

std::vector<SuiteResult> run_suite(const std::string& name, int workers) {
    if (name == "all") {
        std::vector<SuiteResult> out;
        for (const auto& suite : suite_names()) out.push_back(run_suite(suite, workers).front());
        return out;
    }
    if (name == "unbiased") return {unbiased_suite()};
    if (name == "exp3") return {exp3_suite()};
    if (name == "lemma4") return {lemma4_suite()};
    if (name == "graph") return {graph_suite(workers)};
    if (name == "lp") return {lp_suite(workers)};
    if (name == "bayes") return {bayes_suite()};
    throw DomainError("unknown suite \"" + name + "\"; expected one of unbiased, exp3, lemma4, graph, lp, bayes, all");
}

}  // namespace osmd
