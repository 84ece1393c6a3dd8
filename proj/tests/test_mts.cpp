#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "osmd/mts.hpp"
#include "test_util.hpp"

#include <filesystem>
#include <fstream>
#include <map>

using namespace osmd;

namespace {

std::vector<Vector> random_sequence(int k, int n, std::mt19937_64& gen) {
    std::uniform_int_distribution<int> level(0, 2);
    std::vector<Vector> sequence;
    for (int t = 0; t < n; ++t) {
        Vector loss(k);
        for (int i = 0; i < k; ++i) loss[i] = 0.5 * level(gen);
        sequence.push_back(loss);
    }
    return sequence;
}

AtomicPrior random_prior(int k, int n, int atoms, std::mt19937_64& gen) {
    AtomicPrior prior;
    std::gamma_distribution<double> gamma(1.0, 1.0);
    double total = 0.0;
    for (int j = 0; j < atoms; ++j) {
        prior.sequences.push_back(random_sequence(k, n, gen));
        prior.weights.push_back(gamma(gen) + 0.05);
        total += prior.weights.back();
    }
    for (auto& w : prior.weights) w /= total;
    return prior;
}

/// Bayes regret by recursion over bandit histories, grouping atoms by the
/// observed loss of the played arm.
double recursive_bayes_regret(const AtomicPrior& prior, const std::vector<std::size_t>& optima, std::vector<double> w,
                              int t) {
    if (t == prior.horizon()) return 0.0;
    const int k = prior.dim();
    double mass = 0.0;
    for (double v : w) mass += v;
    for (double& v : w) v /= mass;
    Vector x = Vector::Zero(k);
    for (std::size_t j = 0; j < w.size(); ++j) x[optima[j]] += w[j];
    double value = 0.0;
    for (int a = 0; a < k; ++a) {
        if (x[a] == 0.0) continue;
        std::map<double, std::vector<double>> groups;
        for (std::size_t j = 0; j < w.size(); ++j) {
            const auto& loss = prior.sequences[j][t];
            value += x[a] * w[j] * (loss[a] - loss[optima[j]]);
            auto& child = groups.try_emplace(loss[a], std::vector<double>(w.size(), 0.0)).first->second;
            child[j] = w[j];
        }
        for (const auto& [observed, child] : groups) {
            double p = 0.0;
            for (double v : child) p += v;
            if (p > 0.0) value += x[a] * p * recursive_bayes_regret(prior, optima, child, t + 1);
        }
    }
    return value;
}

double oracle_bayes_regret(const AtomicPrior& prior) {
    std::vector<std::size_t> optima;
    for (const auto& s : prior.sequences) optima.push_back(optimal_action(s));
    return recursive_bayes_regret(prior, optima, prior.weights, 0);
}

std::size_t scan_optimum(const std::vector<Vector>& sequence) {
    const int k = static_cast<int>(sequence.front().size());
    std::size_t best = 0;
    double best_total = HUGE_VAL;
    for (int a = 0; a < k; ++a) {
        double total = 0.0;
        for (const auto& loss : sequence) total += loss[a];
        if (total < best_total) {
            best_total = total;
            best = static_cast<std::size_t>(a);
        }
    }
    return best;
}

}  // namespace

TEST_CASE("optimal action examples") {
    CHECK(optimal_action({Vector{{0.0, 1.0}}, Vector{{0.0, 1.0}}}) == 0);
    CHECK(optimal_action({Vector{{1.0, 0.0}}, Vector{{1.0, 0.0}}}) == 1);
    CHECK(optimal_action({Vector{{0.5, 0.5, 0.5}}, Vector{{0.5, 0.5, 0.5}}}) == 0);
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 500; ++trial) {
        const auto sequence = random_sequence(3, 4, gen);
        CHECK(optimal_action(sequence) == scan_optimum(sequence));
    }
    const auto ball = ProblemInstance::lp_full_info(2.0, 2, RademacherLosses{}, 1);
    const Vector point = optimal_point(ball, {Vector{{3.0, 4.0}}});
    CHECK(point[0] == doctest::Approx(-0.6).epsilon(1e-15));
    CHECK(point[1] == doctest::Approx(-0.8).epsilon(1e-15));
}

TEST_CASE("posterior update examples") {
    const auto instance = ProblemInstance::k_armed(2, RademacherLosses{}, 2);
    AtomicPrior prior;
    prior.weights = {0.5, 0.5};
    prior.sequences = {{Vector{{0.0, 1.0}}, Vector{{0.0, 1.0}}}, {Vector{{0.0, 0.0}}, Vector{{1.0, 0.0}}}};
    const auto root = Posterior::from_prior(prior);
    const auto same = posterior_update(root, prior, instance, 0, Observation{0.0}, 1);
    CHECK(same.weights == Vector{{0.5, 0.5}});
    const auto split = posterior_update(root, prior, instance, 1, Observation{1.0}, 1);
    CHECK(split.weights == Vector{{1.0, 0.0}});
    CHECK_THROWS(posterior_update(root, prior, instance, 1, Observation{0.5}, 1));
}

TEST_CASE("posterior after one round matches Bayes rule by hand") {
    // Four atoms over k = 2, n = 2 with weights 0.1, 0.2, 0.3, 0.4.
    AtomicPrior prior;
    prior.weights = {0.1, 0.2, 0.3, 0.4};
    prior.sequences = {
        {Vector{{0.0, 1.0}}, Vector{{1.0, 0.0}}},
        {Vector{{0.0, 0.0}}, Vector{{0.0, 1.0}}},
        {Vector{{1.0, 1.0}}, Vector{{0.0, 0.0}}},
        {Vector{{1.0, 0.0}}, Vector{{1.0, 1.0}}},
    };
    const auto instance = ProblemInstance::k_armed(2, RademacherLosses{}, 2);
    const auto root = Posterior::from_prior(prior);
    // Arm 0 shows 0 for atoms 1, 2 and 1 for atoms 3, 4.
    const auto zero = posterior_update(root, prior, instance, 0, Observation{0.0}, 1);
    CHECK(zero.weights[0] == doctest::Approx(0.1 / 0.3).epsilon(1e-15));
    CHECK(zero.weights[1] == doctest::Approx(0.2 / 0.3).epsilon(1e-15));
    CHECK(zero.weights.tail(2).isZero());
    const auto one = posterior_update(root, prior, instance, 0, Observation{1.0}, 1);
    CHECK(one.weights[2] == doctest::Approx(0.3 / 0.7).epsilon(1e-15));
    CHECK(one.weights[3] == doctest::Approx(0.4 / 0.7).epsilon(1e-15));
    // Arm 1 shows 1 for atoms 1, 3 and 0 for atoms 2, 4.
    const auto arm1 = posterior_update(root, prior, instance, 1, Observation{0.0}, 1);
    CHECK(arm1.weights[1] == doctest::Approx(0.2 / 0.6).epsilon(1e-15));
    CHECK(arm1.weights[3] == doctest::Approx(0.4 / 0.6).epsilon(1e-15));
}

TEST_CASE("iterate examples") {
    const auto instance = ProblemInstance::k_armed(2, RademacherLosses{}, 2);
    AtomicPrior single;
    single.weights = {1.0};
    single.sequences = {{Vector{{1.0, 0.0}}, Vector{{1.0, 0.5}}}};
    const auto sample = mts_run(single, instance, 3);
    CHECK(sample.atom == 0);
    CHECK(sample.regret == 0.0);
    CHECK(mts_iterate(Posterior::from_prior(single), {Vector::Unit(2, 1)}) == Vector::Unit(2, 1));

    AtomicPrior mirrored;
    mirrored.weights = {0.5, 0.5};
    mirrored.sequences = {{Vector{{0.0, 1.0}}, Vector{{0.0, 1.0}}}, {Vector{{1.0, 0.0}}, Vector{{1.0, 0.0}}}};
    const Vector x = mts_iterate(Posterior::from_prior(mirrored), {Vector::Unit(2, 0), Vector::Unit(2, 1)});
    CHECK(x == Vector{{0.5, 0.5}});
    const auto tree = enumerate_mts(mirrored, instance);
    CHECK(tree.nodes.front().x == Vector{{0.5, 0.5}});
    CHECK(tree.bayes_regret == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("enumeration matches an independent recursion") {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 40; ++trial) {
        const int k = 2 + trial % 2;
        const int n = trial < 20 ? 3 : 4;
        const auto prior = random_prior(k, n, 2 + trial % 7, gen);
        const auto instance = ProblemInstance::k_armed(k, FixedSequence{std::vector<Vector>(n, Vector::Zero(k))}, n);
        const double oracle = oracle_bayes_regret(prior);
        CHECK(exhaustive_bayes_regret(prior, instance) == doctest::Approx(oracle).epsilon(1e-10));
        CHECK(enumerate_mts(prior, instance).bayes_regret == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("sampled runs agree with the enumeration") {
    std::mt19937_64 gen(3);
    const auto prior = random_prior(2, 3, 4, gen);
    const auto instance = ProblemInstance::k_armed(2, FixedSequence{std::vector<Vector>(3, Vector::Zero(2))}, 3);
    std::vector<Vector> optima;
    for (const auto& s : prior.sequences) optima.push_back(Vector::Unit(2, static_cast<Eigen::Index>(optimal_action(s))));
    const int runs = 200000;
    double sum = 0.0, squares = 0.0;
    std::mt19937_64 sampler(4);
    for (int i = 0; i < runs; ++i) {
        const double r = mts_sample_regret(prior, instance, optima, sampler);
        sum += r;
        squares += r * r;
    }
    const double mean = sum / runs;
    const double stderr_ = std::sqrt((squares / runs - mean * mean) / (runs - 1));
    CHECK(std::abs(mean - exhaustive_bayes_regret(prior, instance)) <= 3.0 * stderr_ + 1e-12);

    const auto a = mts_run(prior, instance, 5, 2);
    const auto b = mts_run(prior, instance, 5, 2);
    CHECK(a.atom == b.atom);
    CHECK(a.regret == b.regret);
    CHECK(a.trace.checkpoints.back().t == 3);
    CHECK(a.trace.checkpoints.back().cum_regret == a.regret);
}

TEST_CASE("enumeration size guard") {
    std::mt19937_64 gen(5);
    const auto wide = random_prior(4, 2, 3, gen);
    CHECK_THROWS_AS(enumerate_mts(wide, ProblemInstance::k_armed(4, RademacherLosses{}, 2)), DomainError);
    const auto long_prior = random_prior(2, kEnumerationMaxHorizon + 1, 3, gen);
    CHECK_THROWS_AS(enumerate_mts(long_prior, ProblemInstance::k_armed(2, RademacherLosses{}, kEnumerationMaxHorizon + 1)),
                    DomainError);
    const auto many = random_prior(2, 2, static_cast<int>(kEnumerationMaxAtoms) + 1, gen);
    try {
        enumerate_mts(many, ProblemInstance::k_armed(2, RademacherLosses{}, 2));
        FAIL("expected the size guard to fire");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("17") != std::string::npos);
    }
}

TEST_CASE("prior JSON") {
    const std::string text = R"({"horizon": 2, "atoms": [
        {"weight": 0.25, "losses": [[0, 1], [1, 0]]},
        {"weight": 0.75, "losses": [[1, 1], [0, 0.5]]}]})";
    const auto prior = AtomicPrior::from_json_text(text);
    CHECK(prior.size() == 2);
    CHECK(prior.horizon() == 2);
    CHECK(prior.dim() == 2);
    CHECK(prior.sequences[1][1] == Vector{{0.0, 0.5}});

    const auto path = std::filesystem::temp_directory_path() / "osmd_prior_test.json";
    std::ofstream(path) << text;
    CHECK(AtomicPrior::load_json(path).weights == prior.weights);
    std::filesystem::remove(path);

    CHECK_THROWS(AtomicPrior::from_json_text(R"({"horizon": 1, "atoms": [{"weight": 0.5, "losses": [[0, 1]]}]})"));
    CHECK_THROWS(AtomicPrior::from_json_text(
        R"({"horizon": 2, "atoms": [{"weight": 1, "losses": [[0, 1]]}]})"));
    CHECK_THROWS(AtomicPrior::from_json_text("not json"));
}
