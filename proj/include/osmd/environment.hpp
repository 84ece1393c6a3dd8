#pragma once

#include "osmd/graph.hpp"
#include "osmd/potential.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <variant>
#include <vector>

namespace osmd {

struct RevealedLoss {
    int vertex;
    double loss;
    bool operator==(const RevealedLoss&) const = default;
};

/// What the learner sees after playing: its own loss (bandit), the losses of
/// the revealed vertices (graph feedback) or the whole loss vector (full
/// information).
using Observation = std::variant<double, std::vector<RevealedLoss>, Vector>;

bool same_observation(const Observation& a, const Observation& b);

enum class InstanceKind { KArmedBandit, GraphBandit, LpFullInfo };

struct FixedSequence {
    std::vector<Vector> losses;
};

/// Coordinate i is high with probability means_i: 1 or 0 on the simplex,
/// ±d^{-1/q} on the ball.
struct BernoulliLosses {
    Vector means;
};

/// Coordinates ±d^{-1/q}, so every draw lies on the unit sphere of ℓ_q.
struct RademacherLosses {};

using LossSource = std::variant<FixedSequence, BernoulliLosses, RademacherLosses>;

struct ProblemInstance {
    InstanceKind kind = InstanceKind::KArmedBandit;
    int dim = 0;
    std::shared_ptr<const GraphSpec> graph;  // GraphBandit only
    double p = 2.0;                          // LpFullInfo only
    LossSource source;
    int horizon = 0;

    static ProblemInstance k_armed(int k, LossSource source, int horizon);
    static ProblemInstance graph_bandit(std::shared_ptr<const GraphSpec> graph, LossSource source, int horizon);
    static ProblemInstance lp_full_info(double p, int d, LossSource source, int horizon);

    bool finite_actions() const { return kind != InstanceKind::LpFullInfo; }
    Geometry geometry() const;
};

/// Rejects a loss vector outside ℒ ([0,1]^k, or B_q^d on the ball).
void require_loss_in_space(const ProblemInstance& instance, const VectorRef& loss);

/// Φ(e_arm, ℓ) for the finite-action instances.
Observation signal(const ProblemInstance& instance, std::size_t arm, const VectorRef& loss);
/// Φ(a, ℓ) = ℓ for the full-information ball.
Observation signal(const ProblemInstance& instance, const VectorRef& point, const VectorRef& loss);

/// Loss vector of round t (1-indexed) drawn from `rng`. Fixed sequences ignore
/// the generator.
Vector draw_loss(const ProblemInstance& instance, int t, std::mt19937_64& rng);

/// All n losses of a run, drawn up front (oblivious adversary).
std::vector<Vector> draw_losses(const ProblemInstance& instance, std::mt19937_64& rng);

/// argmin_{a ∈ 𝒜} ⟨a, cumulative⟩; lowest index on ties for finite sets, the
/// ℓ_q-dual point on the ball.
Vector best_action(const ProblemInstance& instance, const VectorRef& cumulative);

/// min_{a ∈ 𝒜} ⟨a, cumulative⟩ in closed form.
double comparator_loss(const ProblemInstance& instance, const VectorRef& cumulative);

/// Realised regret Σ_t ⟨A_t, ℓ_t⟩ − min_a Σ_t ⟨a, ℓ_t⟩.
double regret(const ProblemInstance& instance, const std::vector<std::size_t>& arms, const std::vector<Vector>& losses);
double regret(const ProblemInstance& instance, const std::vector<Vector>& actions, const std::vector<Vector>& losses);

/// One row per round, one column per coordinate, optional header row.
std::vector<Vector> load_loss_csv(const std::filesystem::path& path);

enum class StreamPurpose : std::uint64_t { Losses = 0, Actions = 1 };

/// Independent generator for (master seed, run index, purpose). Streams for
/// different runs never depend on execution order.
std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t run, StreamPurpose purpose);

}  // namespace osmd
