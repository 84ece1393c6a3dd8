#pragma once

#include "osmd/core.hpp"

#include <optional>
#include <string>
#include <variant>

namespace osmd {

enum class PotentialKind { Negentropy, TsallisHalf, TsallisAlpha, ClippedLp };

/// Separable Legendre potential F(x) = Σ_i h(x_i).
///
/// Entropy-type potentials (negentropy and the Tsallis family) live on the
/// open positive orthant; `value` accepts boundary points (0 log 0 = 0) but
/// the derivatives do not. The clipped ℓp potential is defined on all of ℝ^d
/// with h''(x) = min{|x|^{p-2}, d}.
class Potential {
public:
    static Potential negentropy();
    static Potential tsallis_half();
    static Potential tsallis_alpha(double alpha);
    /// α-Tsallis with α = 1 − 1/log(k), the graph-feedback choice.
    static Potential graph_tsallis(int k);
    static Potential clipped_lp(double p, int d);

    PotentialKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double p() const { return p_; }
    int clip() const { return clip_; }

    /// True when dom(F) is the positive orthant.
    bool positive_domain() const { return kind_ != PotentialKind::ClippedLp; }

    double h(double x) const;
    double dh(double x) const;
    double d2h(double x) const;

    /// Inverse of h' on its range; nullopt when theta is outside the range.
    std::optional<double> dh_inverse(double theta) const;

    /// Knot of the clipped potential, |x| = d^{1/(p-2)} (0 when p = 2).
    double knot() const { return knot_; }

    std::string name() const;

private:
    Potential(PotentialKind kind, double alpha, double p, int clip);

    PotentialKind kind_;
    double alpha_ = 0.0;
    double p_ = 0.0;
    int clip_ = 0;
    // Cached powers of the knot for the clipped potential.
    double knot_ = 0.0;
    double knot_pm1_ = 0.0;
    double knot_p_ = 0.0;
};

struct Simplex {
    int k;
};

struct LpBall {
    double p;
    int d;
};

using Geometry = std::variant<Simplex, LpBall>;

int dimension(const Geometry& geometry);

double value(const Potential& F, const VectorRef& x);
Vector gradient(const Potential& F, const VectorRef& x);
Vector hessian_diag(const Potential& F, const VectorRef& x);

/// D_F(x, y) = F(x) − F(y) − ⟨∇F(y), x − y⟩, evaluated coordinatewise in a
/// form that avoids cancellation when x ≈ y.
double bregman(const Potential& F, const VectorRef& x, const VectorRef& y);

/// Single-coordinate Bregman term h(x) − h(y) − h'(y)(x − y).
double bregman_term(const Potential& F, double x, double y);

/// Closed-form upper bound on diam_F(geometry) = sup F(x) − F(y).
double diameter_upper_bound(const Potential& F, const Geometry& geometry);

/// argmin of F over the geometry (uniform point on the simplex, origin on
/// the ball).
Vector minimizer(const Potential& F, const Geometry& geometry);

/// Coordinates must lie in the interior of dom(F).
void require_interior(const Potential& F, const VectorRef& x);

}  // namespace osmd
