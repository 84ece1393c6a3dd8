#pragma once

#include "osmd/analysis.hpp"
#include "osmd/engine_types.hpp"
#include "osmd/estimators.hpp"
#include "osmd/mirror.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace osmd {

struct OsmdConfig {
    Potential potential;
    EstimatorSpec estimator;
    ProblemInstance instance;
    /// nullopt means Auto: tuned from the diameter and stability constants.
    std::optional<double> eta;
    std::uint64_t seed = 0;
    std::uint64_t run_id = 0;
    /// Empty means powers of two plus the final round.
    std::vector<int> checkpoints;
};

/// Rejects estimator/instance/potential combinations whose signals or
/// domains do not fit together.
void validate(const OsmdConfig& config);

struct EtaResolution {
    double eta;
    bool automatic;
    /// Set for automatic resolution.
    double diameter = 0.0;
    StabilityConstants constants{0.0, 0.0};
    double implied_bound = 0.0;
    bool calibrated = false;
};

/// The learning rate the run will use. Auto tunes η = √(2 diam / (n a))
/// from the known stability constants, except under graph feedback where a
/// is the calibrated stability coefficient.
EtaResolution resolve_eta(const OsmdConfig& config);

/// P_x: coordinates on the simplex, a point mass at x on the ball.
struct ActionDistribution {
    std::vector<Vector> support;
    Vector probabilities;

    Vector mean() const;
};

ActionDistribution sampling_scheme(const VectorRef& x, const Geometry& geometry);

struct RoundRecord {
    int t;
    const Vector& x;  // X_t
    std::size_t action;
    const Vector& loss;
    const Vector& loss_estimate;
};

using RoundCallback = std::function<void(const RoundRecord&)>;

/// OSMD: X_1 = argmin F, then sample A_t ~ P_{X_t}, estimate, and step.
/// Losses come from the (seed, run_id) loss stream and are drawn before the
/// first round; actions use the matching action stream.
RegretTrace run(const OsmdConfig& config, const RoundCallback& on_round = {});

}  // namespace osmd
