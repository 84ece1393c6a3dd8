#pragma once

#include <cmath>
#include <limits>

namespace osmd::detail {

struct Root {
    double x;
    double residual;
    int iterations;
    bool converged;
};

/// Root of an increasing function f on [lo, hi] with f(lo) <= 0 <= f(hi).
/// Newton steps from `start`, falling back to bisection (geometric on wide
/// positive brackets) whenever a step leaves the current bracket. Stops when
/// |f| <= tol or the bracket collapses to floating-point resolution.
template <class F, class DF>
Root increasing_root(F&& f, DF&& df, double lo, double hi, double start, double tol, int max_iterations) {
    double x = start;
    double fx = f(x);
    for (int it = 0; it < max_iterations; ++it) {
        if (std::abs(fx) <= tol) return {x, fx, it, true};
        if (fx > 0.0)
            hi = x;
        else
            lo = x;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)))
            return {x, fx, it, true};
        const double slope = df(x);
        double next = x - fx / slope;
        if (!(slope > 0.0) || !(next > lo && next < hi) || !std::isfinite(next))
            next = lo > 0.0 && hi > 4.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (next == x) return {x, fx, it, true};
        x = next;
        fx = f(x);
    }
    return {x, fx, max_iterations, std::abs(fx) <= tol};
}

}  // namespace osmd::detail
