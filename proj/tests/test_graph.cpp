#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "osmd/graph.hpp"
#include "test_util.hpp"

#include <filesystem>
#include <fstream>

using namespace osmd;

namespace {

int brute_force_independence(const GraphSpec& g) {
    const int k = g.k();
    int best = 0;
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        bool independent = true;
        for (int i = 0; i < k && independent; ++i)
            for (int j = i + 1; j < k && independent; ++j)
                if ((mask >> i & 1u) && (mask >> j & 1u) && (g.has_edge(i, j) || g.has_edge(j, i))) independent = false;
        if (independent) best = std::max(best, __builtin_popcount(mask));
    }
    return best;
}

}  // namespace

TEST_CASE("observability classification") {
    CHECK(is_strongly_observable(GraphSpec::bandit(5)));
    CHECK_FALSE(is_strongly_observable(GraphSpec::empty(3)));
    CHECK(is_strongly_observable(GraphSpec::complete(6)));
    CHECK(is_strongly_observable(GraphSpec::cycle(6, true)));
    // Vertex 0 has no self-loop and only vertex 1 reveals it: weakly observable.
    const GraphSpec weak(3, {{1, 0}, {1, 1}, {2, 2}});
    CHECK_FALSE(is_strongly_observable(weak));
    // Every other vertex reveals vertex 0, so it needs no self-loop.
    const GraphSpec strong(3, {{1, 0}, {2, 0}, {1, 1}, {2, 2}});
    CHECK(is_strongly_observable(strong));
    CHECK_FALSE(is_strongly_observable(GraphSpec::cycle(5, false)));
}

TEST_CASE("independence number examples") {
    CHECK(independence_number(GraphSpec::complete(5)).value == 1);
    CHECK(independence_number(GraphSpec::empty(7)).value == 7);
    CHECK(independence_number(GraphSpec::bandit(7)).value == 7);
    const auto cycle = GraphSpec::cycle(5, true);
    CHECK(independence_number(cycle).value == 2);
    CHECK(brute_force_independence(cycle) == 2);
    CHECK(independence_number(cycle).exact);
}

TEST_CASE("independence number matches brute force") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int k = 1 + trial % 12;
        const auto g = GraphSpec::erdos_renyi(k, unit(gen), unit(gen), gen());
        const auto alpha = independence_number(g);
        CHECK(alpha.exact);
        CHECK(alpha.value == brute_force_independence(g));
    }
}

TEST_CASE("sub-graphs never have a larger independence number") {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 2 + trial % 9;
        const auto g = GraphSpec::erdos_renyi(k, unit(gen), 1.0, gen());
        std::vector<int> vertices;
        for (int i = 0; i < k; ++i)
            if (unit(gen) < 0.6) vertices.push_back(i);
        if (vertices.empty()) continue;
        const auto sub = g.induced(vertices);
        CHECK(independence_number(sub).value <= independence_number(g).value);
    }
}

TEST_CASE("large graphs fall back to a greedy lower bound") {
    const auto big = GraphSpec::bandit(kExactIndependenceLimit + 6);
    const auto alpha = independence_number(big);
    CHECK_FALSE(alpha.exact);
    CHECK(alpha.value == kExactIndependenceLimit + 6);
    CHECK(independence_number(GraphSpec::complete(40)).value == 1);
}

TEST_CASE("neighbourhood functional examples") {
    CHECK(lemma5_lhs(GraphSpec::complete(6), Vector::Constant(6, 1.0 / 6)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lemma5_lhs(GraphSpec::bandit(5), Vector::Constant(5, 0.2)) == doctest::Approx(5.0).epsilon(1e-14));
    const auto cycle = GraphSpec::cycle(5, true);
    const Vector p = Vector::Constant(5, 0.2);
    CHECK(lemma5_rhs(cycle, p) == doctest::Approx(4.0 * 2.0 * std::log(4.0 * 5.0 / (2.0 * 0.2))).epsilon(1e-14));
    CHECK_THROWS_AS(lemma5_lhs(GraphSpec::empty(3), Vector::Constant(3, 1.0 / 3)), DomainError);
}

TEST_CASE("neighbourhood inequality on random graphs") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 2 + trial % 9;
        const auto g = GraphSpec::erdos_renyi(k, unit(gen), 1.0, gen());
        Vector p = testing::random_simplex(k, gen, 0.0).cwiseMax(2e-6);
        p /= p.sum();
        REQUIRE(p.minCoeff() >= 1e-6);
        CHECK(lemma5_lhs(g, p) <= lemma5_rhs(g, p));
    }
}

TEST_CASE("generators") {
    const auto a = GraphSpec::erdos_renyi(8, 0.4, 0.5, 11);
    const auto b = GraphSpec::erdos_renyi(8, 0.4, 0.5, 11);
    CHECK(a.edges() == b.edges());
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 100; ++trial)
        CHECK(is_strongly_observable(GraphSpec::random_strongly_observable(2 + trial % 10, 0.2, 0.3, gen())));
    const auto cycle = GraphSpec::cycle(4, false);
    CHECK(cycle.observes(0) == std::vector<int>{1, 3});
    CHECK(cycle.revealers(2) == std::vector<int>{1, 3});
    CHECK_THROWS_AS(GraphSpec(2, {{0, 2}}), DomainError);
}

TEST_CASE("edge list round trip") {
    const auto path = std::filesystem::temp_directory_path() / "osmd_graph_test.txt";
    const auto g = GraphSpec::erdos_renyi(6, 0.5, 0.5, 3);
    g.save(path);
    const auto back = GraphSpec::load(path);
    CHECK(back.k() == 6);
    CHECK(back.edges() == g.edges());
    std::ofstream(path) << "3\n1 1\n1 2\n3 3\n";
    const auto small = GraphSpec::load(path);
    CHECK(small.has_edge(0, 1));
    CHECK(small.has_self_loop(2));
    CHECK_FALSE(small.has_self_loop(1));
    std::ofstream(path) << "3\n1 4\n";
    CHECK_THROWS_AS(GraphSpec::load(path), DomainError);
    std::filesystem::remove(path);
}
