#pragma once

#include "osmd/environment.hpp"

#include <memory>
#include <string>
#include <vector>

namespace osmd {

enum class EstimatorKind { ImportanceWeighted, ShiftedImportanceWeighted, GraphHybrid, FullInformation };

/// Loss-estimation function E(x, a, σ). Every kind is unbiased under
/// A ~ P_x with P_x(e_i) = x_i.
struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::ImportanceWeighted;
    int k = 0;
    /// Learning rate that sets the shift threshold x_i < η² (shifted kind).
    double eta = 0.0;
    std::shared_ptr<const GraphSpec> graph;

    static EstimatorSpec importance_weighted(int k);
    static EstimatorSpec shifted(int k, double eta);
    static EstimatorSpec graph_hybrid(std::shared_ptr<const GraphSpec> graph);
    static EstimatorSpec full_information(int k);

    std::string name() const;
};

/// ℓ̂ = E(x, a, σ). Throws DomainError when the observation does not have the
/// shape the estimator reads (or lacks a loss it needs).
Vector estimate(const EstimatorSpec& spec, const VectorRef& x, std::size_t action, const Observation& signal);

/// Observation Φ(e_action, ℓ) of the feedback model the estimator belongs to.
Observation matching_signal(const EstimatorSpec& spec, std::size_t action, const VectorRef& loss);

/// Shift constants c_i = ½ 1{x_i ≥ η²} of the shifted estimator.
Vector shift_constants(const EstimatorSpec& spec, const VectorRef& x);

/// I = {i : i has no self-loop and x_i > 1/2}; at most one element on the simplex.
std::vector<int> hybrid_set(const EstimatorSpec& spec, const VectorRef& x);

/// max_i |Σ_a x_a E(x, a, Φ(a, ℓ))_i − ℓ_i| by exact enumeration over actions.
double check_unbiased(const EstimatorSpec& spec, const VectorRef& x, const VectorRef& loss);

}  // namespace osmd
