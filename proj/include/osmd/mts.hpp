#pragma once

#include "osmd/engine_types.hpp"
#include "osmd/environment.hpp"

#include <filesystem>
#include <random>
#include <vector>

namespace osmd {

/// Finite prior over whole loss sequences ℓ_1..ℓ_n.
struct AtomicPrior {
    std::vector<double> weights;
    std::vector<std::vector<Vector>> sequences;

    int horizon() const { return sequences.empty() ? 0 : static_cast<int>(sequences.front().size()); }
    int dim() const { return sequences.empty() ? 0 : static_cast<int>(sequences.front().front().size()); }
    std::size_t size() const { return weights.size(); }

    /// Checks shapes and that weights are nonnegative and sum to one (1e-12).
    void validate() const;

    /// {"horizon": n, "atoms": [{"weight": w, "losses": [[...], ...]}, ...]}
    static AtomicPrior load_json(const std::filesystem::path& path);
    static AtomicPrior from_json_text(const std::string& text);
};

/// Posterior weights over the prior's atoms given the history so far.
struct Posterior {
    Vector weights;
    static Posterior from_prior(const AtomicPrior& prior);
};

/// A* = argmin_a Σ_t ⟨a, ℓ_t⟩ over the basis vectors; lowest index on ties.
std::size_t optimal_action(const std::vector<Vector>& sequence);

/// A* as a point of 𝒳 (basis vector, or the ℓ_q-dual point on the ball).
Vector optimal_point(const ProblemInstance& instance, const std::vector<Vector>& sequence);

/// Exact Bayes for deterministic signals: atoms whose round-t observation
/// differs from `observed` drop to zero weight.
Posterior posterior_update(const Posterior& posterior, const AtomicPrior& prior, const ProblemInstance& instance,
                           std::size_t action, const Observation& observed, int t);

/// X = 𝔼[A* | history] = Σ_j w_j A*_j.
Vector mts_iterate(const Posterior& posterior, const std::vector<Vector>& atom_optima);

struct MtsSample {
    std::size_t atom;
    double regret;
    RegretTrace trace;
};

/// One Bayesian run: draw an atom from the prior, then play MTS against it.
/// Finite instances sample A_t ~ P_{X_t}; the ball plays X_t itself.
MtsSample mts_run(const AtomicPrior& prior, const ProblemInstance& instance, std::uint64_t seed, std::uint64_t run_id = 0,
                  const std::vector<int>& checkpoints = {});

/// Realised regret of one run drawn with `gen`; the Monte Carlo hot path.
double mts_sample_regret(const AtomicPrior& prior, const ProblemInstance& instance,
                         const std::vector<Vector>& atom_optima, std::mt19937_64& gen);

struct MtsBranch {
    std::size_t action;
    double probability;  // P(A_t = action, Φ_t = this outcome | node)
    std::size_t child;
};

struct MtsNode {
    int t;  // round about to be played (1-indexed); horizon + 1 at leaves
    double reach;
    Vector posterior;
    Vector x;
    double expected_regret;  // 𝔼[Δ_t | node]; 0 at leaves
    std::vector<MtsBranch> branches;
};

/// Full history tree of MTS under a finite prior.
struct MtsEnumeration {
    int horizon = 0;
    int k = 0;
    std::vector<Vector> atom_optima;
    std::vector<MtsNode> nodes;  // nodes[0] is the root
    double bayes_regret = 0.0;
};

inline constexpr int kEnumerationMaxActions = 3;
inline constexpr int kEnumerationMaxHorizon = 5;
inline constexpr std::size_t kEnumerationMaxAtoms = 16;

/// Exact enumeration over atoms and action paths (finite instances only,
/// k ≤ 3, n ≤ 5, at most 16 atoms).
MtsEnumeration enumerate_mts(const AtomicPrior& prior, const ProblemInstance& instance);

/// 𝔅𝔯_n computed exactly from the enumeration.
double exhaustive_bayes_regret(const AtomicPrior& prior, const ProblemInstance& instance);

}  // namespace osmd
