#pragma once

#include "osmd/estimators.hpp"
#include "osmd/mirror.hpp"
#include "osmd/mts.hpp"

#include <optional>
#include <string>
#include <vector>

namespace osmd {

/// stab_t(x; η) = (2/η) 𝔼_{A~P_x}[⟨x − f_t(x, A), E_t(x, A)⟩ − D_F(f_t(x, A), x)/η],
/// by exact enumeration over the actions in the support of x.
double stability_exact(const Potential& F, const EstimatorSpec& estimator, const VectorRef& x, const VectorRef& loss,
                       double eta);

/// Full-information stability on the ℓp ball (point-mass sampling, E = ℓ).
double stability_exact_full_info(const Potential& F, const LpBall& ball, const VectorRef& x, const VectorRef& loss,
                                 double eta);

/// Which end of the chord [x, ·] the supremum runs over: f_t (always defined)
/// or g_t (only when the dual point stays in the gradient range).
enum class ChordEnd { Constrained, Unconstrained };

/// sup_{z ∈ [x, y]} Σ_i e_i² / h''(z_i), by 1001-point sampling of the chord
/// followed by golden-section refinement around the best sample.
double chord_supremum(const Potential& F, const VectorRef& x, const VectorRef& y, const VectorRef& e);

/// 𝔼_{A~P_x}[sup_{z ∈ [x, end(x, A)]} ‖E_t(x, A) + c1‖²_{∇^{-2}F(z)}] on the
/// simplex. The shifted end point uses the loss E + c1. nullopt when g_{tc}
/// is missing for some action in the support.
std::optional<double> stability_lemma_bound(const Potential& F, const EstimatorSpec& estimator, const VectorRef& x,
                                            const VectorRef& loss, double eta, double shift = 0.0,
                                            ChordEnd end = ChordEnd::Unconstrained);

/// sup over the chord to f_t (or g_t) of ‖ℓ‖²_{∇^{-2}F(z)} on the ball.
std::optional<double> stability_lemma_bound_full_info(const Potential& F, const LpBall& ball, const VectorRef& x,
                                                      const VectorRef& loss, double eta,
                                                      ChordEnd end = ChordEnd::Constrained);

struct StabilityReport {
    std::string potential;
    std::string estimator;
    Vector x;
    Vector loss;
    double eta = 0.0;
    double exact = 0.0;
    std::optional<double> lemma1_bound;
    std::optional<double> lemma2_shifted_bound;
    double shift = 0.0;
};

StabilityReport stability_report(const Potential& F, const EstimatorSpec& estimator, const VectorRef& x,
                                 const VectorRef& loss, double eta, std::optional<double> shift = std::nullopt);

/// FNV-1a over the context (names, η and the raw bytes of x and ℓ).
std::string context_hash(const StabilityReport& report);

/// {"context_hash", "exact", "bounds": {...}, "margins": {...}} with margin = bound − exact.
std::string to_json(const StabilityReport& report);

/// stab(𝒜; η) ≤ a + bη.
struct StabilityConstants {
    double a;
    double b;
};

/// Known constants for the supported (potential, estimator, instance)
/// triples; throws DomainError for any other combination.
StabilityConstants stability_constants(const Potential& F, const EstimatorSpec& estimator,
                                       const ProblemInstance& instance);

/// Largest stab_t(x; η) over a fixed seeded family of simplex contexts:
/// uniform and near-vertex iterates, Dirichlet draws, binary and uniform
/// losses, η on a log grid from 1e-3 to 1. An estimate of stab(𝒜), not a
/// certificate.
double calibrated_stability(const Potential& F, const EstimatorSpec& estimator, std::uint64_t seed = 0);

struct TunedEta {
    double eta;
    double implied_bound;  // √(2 a diam n) + b diam / a
};

/// η = √(2 diam / (n a)).
TunedEta tune_eta(double diam, const StabilityConstants& constants, int n);

/// ess-sup stab(𝒜) for the bandit pairings used with MTS: negentropy with
/// importance weighting (k) and ½-Tsallis with importance weighting (2√k).
double bandit_stability_sup(const Potential& F, const EstimatorSpec& estimator);

/// Σ_i D_F terms over the support of y; x must vanish where y does.
double bregman_on_support(const Potential& F, const VectorRef& x, const VectorRef& y);

/// stab_t on the face of the simplex spanned by the support of x. Only the
/// bandit estimators (plain or shifted importance weighting) are accepted.
double stability_exact_on_support(const Potential& F, const EstimatorSpec& estimator, const VectorRef& x,
                                  const VectorRef& loss, double eta);

struct RoundInformation {
    std::size_t node = 0;
    int t = 0;
    double expected_regret = 0.0;      // 𝔼_{t-1}[Δ_t]
    double expected_divergence = 0.0;  // 𝔼_{t-1}[D_F(X_{t+1}, X_t)]
    double ratio = 0.0;
    bool degenerate = false;  // zero divergence with nonzero regret
    double adaptive_eta = 0.0;    // √(2 𝔼_{t-1}[D_F] / S)
    double adaptive_bound = 0.0;  // √(2 S 𝔼_{t-1}[D_F]) for 𝔼_{t-1}[Δ_t]
};

/// Information ratio at one internal node of the enumeration.
RoundInformation information_ratio(const MtsEnumeration& enumeration, std::size_t node, const Potential& F,
                                   double stability_sup);

std::vector<RoundInformation> information_ratios(const MtsEnumeration& enumeration, const Potential& F,
                                                 double stability_sup);

/// max over internal nodes of ‖Σ_b P(b) X_child(b) − X_node‖_∞.
double martingale_defect(const MtsEnumeration& enumeration);

struct TelescopingCheck {
    double divergence_sum;  // 𝔼[Σ_t D_F(X_{t+1}, X_t)]
    double potential_gap;   // 𝔼[F(X_{n+1})] − F(X_1)
    double diameter;
};

TelescopingCheck telescoping(const MtsEnumeration& enumeration, const Potential& F);

struct BayesBoundCheck {
    double eta;
    double bayes_regret;
    double stability_sum;  // 𝔼[Σ_t stab_t(X_t; η)]
    double diameter;
    double bound;          // diam/η + (η/2) stability_sum
};

/// Bayesian regret bound of MTS with the stability function of (F, E) at η.
BayesBoundCheck mts_stability_bound(const MtsEnumeration& enumeration, const AtomicPrior& prior,
                                    const Potential& F, const EstimatorSpec& estimator, double eta);

/// √(2 diam S n).
double bayes_regret_bound(double diameter, double stability_sup, int n);

}  // namespace osmd
