#pragma once

#include "osmd/core.hpp"

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace osmd {

/// Directed feedback graph on vertices 0..k-1. An edge (i, j) means that
/// playing i reveals the loss of j.
class GraphSpec {
public:
    GraphSpec(int k, std::vector<std::pair<int, int>> edges);

    int k() const { return k_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    /// Vertices revealed when `i` is played.
    const std::vector<int>& observes(int i) const { return observes_[i]; }
    /// Vertices whose play reveals `j`.
    const std::vector<int>& revealers(int j) const { return revealers_[j]; }

    bool has_edge(int from, int to) const;
    bool has_self_loop(int i) const { return has_edge(i, i); }

    /// Sub-graph induced by `vertices` (relabelled 0..m-1 in the given order).
    GraphSpec induced(const std::vector<int>& vertices) const;

    static GraphSpec bandit(int k);
    static GraphSpec complete(int k);
    static GraphSpec full_information(int k) { return complete(k); }
    /// Undirected cycle (both directions), optionally with self-loops.
    static GraphSpec cycle(int k, bool self_loops);
    static GraphSpec empty(int k);
    /// Each ordered pair i ≠ j is an edge with probability `edge_probability`;
    /// self-loops are added with probability `self_loop_probability`.
    static GraphSpec erdos_renyi(int k, double edge_probability, double self_loop_probability, std::uint64_t seed);
    /// Random graph that is strongly observable by construction: vertices that
    /// lose the self-loop coin flip are revealed by every other vertex.
    static GraphSpec random_strongly_observable(int k, double edge_probability, double self_loop_probability,
                                                std::uint64_t seed);

    /// Edge list text: first line "k", then "i j" pairs, 1-indexed.
    static GraphSpec load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

private:
    int k_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> observes_;
    std::vector<std::vector<int>> revealers_;
};

bool is_strongly_observable(const GraphSpec& graph);

struct IndependenceNumber {
    int value;
    bool exact;  // false: greedy lower bound for k above the exact limit
};

inline constexpr int kExactIndependenceLimit = 24;

/// Largest set of distinct vertices with no edge between any two of them in
/// either direction (self-loops ignored).
IndependenceNumber independence_number(const GraphSpec& graph);

/// Σ_i p_i / Σ_{j ∈ revealers(i)} p_j.
double lemma5_lhs(const GraphSpec& graph, const VectorRef& p);
/// 4 α log(4k / (α min_i p_i)) with α the independence number.
double lemma5_rhs(const GraphSpec& graph, const VectorRef& p);

}  // namespace osmd
