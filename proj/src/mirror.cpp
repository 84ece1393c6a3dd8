#include "osmd/mirror.hpp"

#include "solve1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace osmd {

namespace {

void check_request(const MirrorStepRequest& request) {
    require(request.eta > 0.0, "mirror step: eta must be positive");
    require(request.x.size() == request.loss_estimate.size(), "mirror step: x and loss estimate differ in size");
    require(request.x.size() == dimension(request.geometry), "mirror step: x does not match the geometry dimension");
    require(request.loss_estimate.allFinite(), "mirror step: loss estimate is not finite");
}

Vector dual_point(const MirrorStepRequest& request) {
    return gradient(request.potential, request.x) - request.eta * request.loss_estimate;
}

[[noreturn]] void fail(const std::string& what, const MirrorStepRequest& request, int iterations, double residual) {
    std::ostringstream os;
    os << what << " did not converge: potential=" << request.potential.name() << " dim=" << request.x.size()
       << " eta=" << request.eta << " iterations=" << iterations << " residual=" << residual
       << " max|loss|=" << request.loss_estimate.cwiseAbs().maxCoeff();
    throw SolverError(os.str());
}

}  // namespace

double step_objective(const MirrorStepRequest& request, const VectorRef& y) {
    return request.eta * y.dot(request.loss_estimate) + bregman(request.potential, y, request.x);
}

std::optional<Vector> unconstrained_step(const MirrorStepRequest& request) {
    check_request(request);
    const Vector theta = dual_point(request);
    Vector y(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const auto yi = request.potential.dh_inverse(theta[i]);
        if (!yi) return std::nullopt;
        y[i] = *yi;
    }
    return y;
}

Vector simplex_step(const MirrorStepRequest& request, const SolverOptions& options) {
    check_request(request);
    require(std::holds_alternative<Simplex>(request.geometry), "simplex_step: geometry is not a simplex");
    const Potential& F = request.potential;
    require(F.positive_domain(), "simplex_step: " + F.name() + " is not paired with the simplex");
    const Eigen::Index k = request.x.size();
    if (k == 1) return Vector::Ones(1);

    const Vector theta = dual_point(request);
    // At `hi` the largest coordinate equals 1, at `lo` every coordinate is at
    // most 1/k, so the root of Σ_i y_i(λ) = 1 is bracketed.
    double hi = F.dh(1.0) - theta.maxCoeff();
    const double lo = F.dh(1.0 / static_cast<double>(k)) - theta.maxCoeff();

    auto coordinate = [&](Eigen::Index i, double lambda) { return *F.dh_inverse(theta[i] + lambda); };
    auto excess = [&](double lambda) {
        double s = -1.0;
        for (Eigen::Index i = 0; i < k; ++i) s += coordinate(i, lambda);
        return s;
    };
    auto slope = [&](double lambda) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) s += 1.0 / F.d2h(coordinate(i, lambda));
        return s;
    };

    const auto root = detail::increasing_root(excess, slope, lo, hi, hi, options.tolerance, options.max_iterations);
    if (!root.converged) fail("simplex_step", request, root.iterations, root.residual);

    Vector y(k);
    for (Eigen::Index i = 0; i < k; ++i) y[i] = std::max(coordinate(i, root.x), kSimplexFloor);
    const double total = y.sum();
    if (!(std::abs(total - 1.0) <= 1e-6)) fail("simplex_step", request, root.iterations, total - 1.0);
    return y / total;
}

Vector ball_step(const MirrorStepRequest& request, const SolverOptions& options) {
    check_request(request);
    const auto* ball = std::get_if<LpBall>(&request.geometry);
    require(ball != nullptr, "ball_step: geometry is not an lp ball");
    const Potential& F = request.potential;
    require(F.kind() == PotentialKind::ClippedLp, "ball_step: potential must be the clipped lp potential");
    const double p = ball->p;
    require(request.x.size() == ball->d, "ball_step: x has the wrong dimension");
    require(lp_norm(request.x, p) <= 1.0 + 1e-9, "ball_step: x lies outside the unit ball");

    const Vector theta = dual_point(request);
    Vector y = theta.unaryExpr([&](double t) { return *F.dh_inverse(t); });
    if (lp_norm(y, p) <= 1.0) return y;

    // KKT: h'(y_i) + μ sign(y_i)|y_i|^{p-1} = θ_i. Each coordinate shares the
    // sign of θ_i and its magnitude solves an increasing scalar equation.
    const Vector free_magnitude = y.cwiseAbs();
    auto solve_coordinate = [&](Eigen::Index i, double mu) -> double {
        const double u = std::abs(theta[i]);
        if (u == 0.0) return 0.0;
        const double sign = theta[i] < 0.0 ? -1.0 : 1.0;
        if (p == 1.0) return u <= mu ? 0.0 : sign * *F.dh_inverse(u - mu);
        auto f = [&](double a) { return F.dh(a) + mu * std::pow(a, p - 1.0) - u; };
        auto df = [&](double a) { return F.d2h(a) + mu * (p - 1.0) * std::pow(a, p - 2.0); };
        // Where either term alone reaches u/2 (resp. u) the sum is below (resp.
        // above) u, which brackets the root within a few orders of magnitude.
        auto power_inverse = [&](double v) { return mu > 0.0 ? std::pow(v / mu, 1.0 / (p - 1.0)) : HUGE_VAL; };
        const double lo = std::min(*F.dh_inverse(0.5 * u), power_inverse(0.5 * u));
        const double hi = std::min({free_magnitude[i], *F.dh_inverse(u), power_inverse(u)});
        if (!(lo < hi)) return sign * hi;
        const auto root = detail::increasing_root(f, df, lo, hi, hi, 1e-14 * std::max(1.0, u), 200);
        if (!root.converged) fail("ball_step coordinate solve", request, root.iterations, root.residual);
        return sign * root.x;
    };
    auto point = [&](double mu) {
        Vector out(theta.size());
        for (Eigen::Index i = 0; i < theta.size(); ++i) out[i] = solve_coordinate(i, mu);
        return out;
    };

    // ‖y(μ)‖_p is decreasing in μ; bracket then run Illinois regula falsi.
    double mu_lo = 0.0, norm_lo = lp_norm(y, p);
    double mu_hi = 1.0;
    Vector y_hi = point(mu_hi);
    double norm_hi = lp_norm(y_hi, p);
    int expansions = 0;
    while (norm_hi > 1.0) {
        if (++expansions > options.max_iterations) fail("ball_step bracket", request, expansions, norm_hi - 1.0);
        mu_lo = mu_hi;
        norm_lo = norm_hi;
        mu_hi *= 2.0;
        y_hi = point(mu_hi);
        norm_hi = lp_norm(y_hi, p);
    }

    constexpr double kBallTolerance = 1e-10;
    int side = 0;
    double g_lo = norm_lo - 1.0, g_hi = norm_hi - 1.0;
    Vector best = y_hi;
    double best_gap = g_hi;
    for (int it = 0; it < options.max_iterations; ++it) {
        if (std::abs(best_gap) <= kBallTolerance) break;
        double mu = (mu_lo * g_hi - mu_hi * g_lo) / (g_hi - g_lo);
        if (!(mu > mu_lo && mu < mu_hi)) mu = 0.5 * (mu_lo + mu_hi);
        Vector candidate = point(mu);
        const double gap = lp_norm(candidate, p) - 1.0;
        best = std::move(candidate);
        best_gap = gap;
        if (gap > 0.0) {
            mu_lo = mu;
            g_lo = gap;
            if (side == -1) g_hi *= 0.5;
            side = -1;
        } else {
            mu_hi = mu;
            g_hi = gap;
            if (side == 1) g_lo *= 0.5;
            side = 1;
        }
        if (mu_hi - mu_lo <= 4.0 * std::numeric_limits<double>::epsilon() * mu_hi) break;
    }
    if (!(std::abs(best_gap) <= kBallTolerance)) fail("ball_step multiplier search", request, options.max_iterations, best_gap);
    if (best_gap > 0.0) best /= (1.0 + best_gap);
    return best;
}

Vector constrained_step(const MirrorStepRequest& request, const SolverOptions& options) {
    if (std::holds_alternative<Simplex>(request.geometry)) return simplex_step(request, options);
    return ball_step(request, options);
}

}  // namespace osmd
