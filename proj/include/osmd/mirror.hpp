#pragma once

#include "osmd/potential.hpp"

#include <optional>

namespace osmd {

/// One OSMD update: argmin_{y ∈ 𝒳} η⟨y, ℓ̂⟩ + D_F(y, x).
///
/// The request holds non-owning views; keep `x` and `loss_estimate` alive for
/// the duration of the call.
struct MirrorStepRequest {
    Potential potential;
    Geometry geometry;
    VectorRef x;
    VectorRef loss_estimate;
    double eta;
};

struct SolverOptions {
    double tolerance = 1e-12;
    int max_iterations = 200;
};

/// Simplex coordinates are never allowed below this value.
inline constexpr double kSimplexFloor = 1e-300;

/// f_t(x, a): the constrained update on the simplex or the ℓp ball.
Vector constrained_step(const MirrorStepRequest& request, const SolverOptions& options = {});

/// g_t(x, a): the unconstrained update ∇F^{-1}(∇F(x) − η ℓ̂), or nullopt when
/// the dual point leaves the gradient range of F.
std::optional<Vector> unconstrained_step(const MirrorStepRequest& request);

/// Constrained update on the probability simplex. Solves for the scalar
/// normalisation multiplier λ in ∇F(y) = ∇F(x) − η ℓ̂ + λ 1.
Vector simplex_step(const MirrorStepRequest& request, const SolverOptions& options = {});

/// Constrained update on B_p^d for the clipped ℓp potential. Returns the
/// unconstrained point when it is feasible, otherwise the Bregman projection
/// found by a monotone search over the ball multiplier μ ≥ 0.
Vector ball_step(const MirrorStepRequest& request, const SolverOptions& options = {});

/// Objective η⟨y, ℓ̂⟩ + D_F(y, x) of the update, for probes and oracles.
double step_objective(const MirrorStepRequest& request, const VectorRef& y);

}  // namespace osmd
