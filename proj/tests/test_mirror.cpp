#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "osmd/mirror.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace osmd;

namespace {

double simplex_grid_minimum(const MirrorStepRequest& request, double step) {
    double best = HUGE_VAL;
    const int m = static_cast<int>(std::lround(1.0 / step));
    for (int i = 1; i < m; ++i)
        for (int j = 1; i + j < m; ++j) {
            const Vector y{{i * step, j * step, (m - i - j) * step}};
            best = std::min(best, step_objective(request, y));
        }
    return best;
}

}  // namespace

TEST_CASE("negentropy step example") {
    const Vector x{{0.5, 0.5}}, loss{{1.0, 0.0}};
    const Vector y = constrained_step({Potential::negentropy(), Simplex{2}, x, loss, 1.0});
    const double e = std::exp(-1.0);
    CHECK(y[0] == doctest::Approx(e / (1.0 + e)).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(1.0 / (1.0 + e)).epsilon(1e-12));
    CHECK(y[0] == doctest::Approx(0.26894).epsilon(1e-4));
}

TEST_CASE("zero loss leaves the iterate unchanged") {
    std::mt19937_64 gen(1);
    for (const auto& F : {Potential::negentropy(), Potential::tsallis_half(), Potential::tsallis_alpha(0.7)}) {
        const Vector x = testing::random_simplex(6, gen);
        const Vector zero = Vector::Zero(6);
        CHECK((constrained_step({F, Simplex{6}, x, zero, 0.3}) - x).cwiseAbs().maxCoeff() <= 1e-12);
    }
    const auto G = Potential::clipped_lp(1.5, 4);
    const Vector x = testing::random_ball(4, 1.5, gen);
    const Vector zero = Vector::Zero(4);
    CHECK((ball_step({G, LpBall{1.5, 4}, x, zero, 0.3}) - x).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("1/2-Tsallis step matches a grid search") {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 5; ++trial) {
        const Vector x = testing::random_simplex(3, gen, 0.05);
        const Vector loss = testing::random_uniform(3, 0.0, 3.0, gen);
        const double eta = testing::random_uniform(1, 0.05, 1.0, gen)[0];
        const MirrorStepRequest request{Potential::tsallis_half(), Simplex{3}, x, loss, eta};
        const Vector y = constrained_step(request);
        const double grid = simplex_grid_minimum(request, 1e-3);
        CHECK(std::abs(y.sum() - 1.0) <= 1e-12);
        CHECK(step_objective(request, y) <= grid + 1e-12);
        CHECK(grid - step_objective(request, y) <= 1e-5);
    }
}

TEST_CASE("unconstrained step examples") {
    std::mt19937_64 gen(3);
    const Vector x = testing::random_simplex(5, gen);
    const Vector loss = testing::random_uniform(5, -2.0, 2.0, gen);
    const auto g = unconstrained_step({Potential::negentropy(), Simplex{5}, x, loss, 0.4});
    REQUIRE(g.has_value());
    for (int i = 0; i < 5; ++i) CHECK((*g)[i] == doctest::Approx(x[i] * std::exp(-0.4 * loss[i])).epsilon(1e-13));

    const Vector quarter = Vector::Constant(1, 0.25), two = Vector::Constant(1, 2.0);
    const auto t = unconstrained_step({Potential::tsallis_half(), Simplex{1}, quarter, two, 0.1});
    REQUIRE(t.has_value());
    CHECK((*t)[0] == doctest::Approx(0.25 / 1.21).epsilon(1e-13));
    CHECK((*t)[0] == doctest::Approx(0.20661).epsilon(1e-4));

    const Vector very_negative = Vector::Constant(1, -30.0);
    CHECK_FALSE(unconstrained_step({Potential::tsallis_half(), Simplex{1}, quarter, very_negative, 0.1}).has_value());
}

TEST_CASE("ball step examples") {
    const auto quadratic = Potential::clipped_lp(2.0, 5);
    const Vector origin = Vector::Zero(5);
    const Vector e1 = Vector::Unit(5, 0);
    const Vector y = ball_step({quadratic, LpBall{2.0, 5}, origin, e1, 0.1});
    CHECK(y[0] == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(y.tail(4).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("ball step on the boundary matches a grid search") {
    const auto F = Potential::clipped_lp(1.5, 3);
    const Vector x{{0.3, -0.2, 0.1}};
    const Vector loss{{-2.0, 1.5, 0.5}};
    const MirrorStepRequest request{F, LpBall{1.5, 3}, x, loss, 0.5};
    const auto free_step = unconstrained_step(request);
    REQUIRE(free_step.has_value());
    REQUIRE(lp_norm(*free_step, 1.5) > 1.0);
    const Vector y = ball_step(request);
    CHECK(lp_norm(y, 1.5) == doctest::Approx(1.0).epsilon(1e-9));

    double grid = HUGE_VAL;
    for (int i = -100; i <= 100; ++i)
        for (int j = -100; j <= 100; ++j)
            for (int l = -100; l <= 100; ++l) {
                const Vector z{{i * 0.01, j * 0.01, l * 0.01}};
                if (lp_norm(z, 1.5) > 1.0) continue;
                grid = std::min(grid, step_objective(request, z));
            }
    CHECK(step_objective(request, y) <= grid + 1e-12);
    CHECK(grid - step_objective(request, y) <= 1e-3);
}

TEST_CASE("first-order optimality and probes on the simplex") {
    std::mt19937_64 gen(4);
    for (const auto& F : {Potential::negentropy(), Potential::tsallis_half(), Potential::tsallis_alpha(0.6)}) {
        for (int trial = 0; trial < 20; ++trial) {
            const int k = 2 + trial % 8;
            const Vector x = testing::random_simplex(k, gen);
            const Vector loss = testing::random_uniform(k, 0.0, 10.0, gen);
            const double eta = 0.2;
            const MirrorStepRequest request{F, Simplex{k}, x, loss, eta};
            const Vector y = constrained_step(request);
            CHECK(std::abs(y.sum() - 1.0) <= 1e-12);
            const Vector lambda = gradient(F, y) - gradient(F, x) + eta * loss;
            CHECK(lambda.maxCoeff() - lambda.minCoeff() <= 1e-8 * std::max(1.0, lambda.cwiseAbs().maxCoeff()));
            const double objective = step_objective(request, y);
            for (int probe = 0; probe < 1000 / 20; ++probe)
                CHECK(objective <= step_objective(request, testing::random_simplex(k, gen)) + 1e-12);
        }
    }
}

TEST_CASE("constrained and unconstrained steps agree when the free step is feasible") {
    std::mt19937_64 gen(5);
    const auto F = Potential::clipped_lp(1.3, 6);
    for (int trial = 0; trial < 200; ++trial) {
        const Vector x = testing::random_ball(6, 1.3, gen) * 0.5;
        const Vector loss = testing::random_uniform(6, -0.2, 0.2, gen);
        const MirrorStepRequest request{F, LpBall{1.3, 6}, x, loss, 0.1};
        const auto g = unconstrained_step(request);
        REQUIRE(g.has_value());
        if (lp_norm(*g, 1.3) <= 1.0) CHECK((constrained_step(request) - *g).cwiseAbs().maxCoeff() <= 1e-9);
    }
    // On the simplex the free step is feasible exactly when the loss is constant.
    const Vector x = testing::random_simplex(4, gen);
    const Vector flat = Vector::Zero(4);
    const MirrorStepRequest request{Potential::tsallis_half(), Simplex{4}, x, flat, 0.5};
    CHECK((constrained_step(request) - *unconstrained_step(request)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("generic solver reproduces exponential weights over 1000 rounds") {
    std::mt19937_64 gen(6);
    const int k = 6;
    const double eta = 0.05;
    Vector x = Vector::Constant(k, 1.0 / k);
    Vector cumulative = Vector::Zero(k);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const Vector loss = testing::random_uniform(k, 0.0, 1.0, gen);
        cumulative += loss;
        x = constrained_step({Potential::negentropy(), Simplex{k}, x, loss, eta});
        const Vector w = (-eta * (cumulative.array() - cumulative.minCoeff())).exp().matrix();
        worst = std::max(worst, (x - w / w.sum()).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("nonnegative losses shrink the free step") {
    std::mt19937_64 gen(7);
    for (const auto& F : {Potential::negentropy(), Potential::tsallis_half(), Potential::graph_tsallis(9)})
        for (int trial = 0; trial < 200; ++trial) {
            const Vector x = testing::random_simplex(5, gen);
            const Vector loss = testing::random_uniform(5, 0.0, 50.0, gen);
            const auto g = unconstrained_step({F, Simplex{5}, x, loss, 0.3});
            REQUIRE(g.has_value());
            CHECK(((*g - x).array() <= 0.0).all());
        }
}

TEST_CASE("simplex step ignores constant shifts of the loss") {
    std::mt19937_64 gen(8);
    for (const auto& F : {Potential::negentropy(), Potential::tsallis_half(), Potential::tsallis_alpha(0.3)})
        for (int trial = 0; trial < 100; ++trial) {
            const Vector x = testing::random_simplex(5, gen);
            const Vector loss = testing::random_uniform(5, 0.0, 5.0, gen);
            const double c = testing::random_uniform(1, -3.0, 3.0, gen)[0];
            const Vector shifted = (loss.array() + c).matrix();
            const Vector a = constrained_step({F, Simplex{5}, x, loss, 0.4});
            const Vector b = constrained_step({F, Simplex{5}, x, shifted, 0.4});
            CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9);
        }
}

TEST_CASE("extreme estimates stay on the simplex above the floor") {
    const Vector x{{1e-200, 0.5, 0.5 - 1e-200}};
    const Vector huge{{0.0, 1e8, 0.0}};
    const Vector y = constrained_step({Potential::tsallis_half(), Simplex{3}, x, huge, 1.0});
    CHECK(std::abs(y.sum() - 1.0) <= 1e-12);
    CHECK(y.minCoeff() >= kSimplexFloor);
}

TEST_CASE("request validation") {
    const Vector x{{0.5, 0.5}}, loss{{1.0, 0.0}};
    CHECK_THROWS_AS(constrained_step({Potential::negentropy(), Simplex{2}, x, loss, 0.0}), DomainError);
    CHECK_THROWS_AS(constrained_step({Potential::negentropy(), Simplex{3}, x, loss, 1.0}), DomainError);
    const Vector outside{{2.0, 0.0}};
    CHECK_THROWS_AS(ball_step({Potential::clipped_lp(1.5, 2), LpBall{1.5, 2}, outside, loss, 1.0}), DomainError);
}
