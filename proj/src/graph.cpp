#include "osmd/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace osmd {

GraphSpec::GraphSpec(int k, std::vector<std::pair<int, int>> edges) : k_(k), observes_(k), revealers_(k) {
    require(k >= 1, "GraphSpec: need at least one vertex");
    std::set<std::pair<int, int>> unique;
    for (const auto& [from, to] : edges) {
        require(from >= 0 && from < k && to >= 0 && to < k,
                "GraphSpec: edge (" + std::to_string(from) + ", " + std::to_string(to) + ") out of range");
        unique.emplace(from, to);
    }
    edges_.assign(unique.begin(), unique.end());
    for (const auto& [from, to] : edges_) {
        observes_[from].push_back(to);
        revealers_[to].push_back(from);
    }
    for (auto& list : revealers_) std::sort(list.begin(), list.end());
}

bool GraphSpec::has_edge(int from, int to) const {
    const auto& list = observes_[from];
    return std::binary_search(list.begin(), list.end(), to);
}

GraphSpec GraphSpec::induced(const std::vector<int>& vertices) const {
    std::vector<int> label(k_, -1);
    for (std::size_t i = 0; i < vertices.size(); ++i) label[vertices[i]] = static_cast<int>(i);
    std::vector<std::pair<int, int>> sub;
    for (const auto& [from, to] : edges_)
        if (label[from] >= 0 && label[to] >= 0) sub.emplace_back(label[from], label[to]);
    return {static_cast<int>(vertices.size()), std::move(sub)};
}

GraphSpec GraphSpec::bandit(int k) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < k; ++i) edges.emplace_back(i, i);
    return {k, std::move(edges)};
}

GraphSpec GraphSpec::complete(int k) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) edges.emplace_back(i, j);
    return {k, std::move(edges)};
}

GraphSpec GraphSpec::cycle(int k, bool self_loops) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < k; ++i) {
        const int next = (i + 1) % k;
        if (next != i) {
            edges.emplace_back(i, next);
            edges.emplace_back(next, i);
        }
        if (self_loops) edges.emplace_back(i, i);
    }
    return {k, std::move(edges)};
}

GraphSpec GraphSpec::empty(int k) { return {k, {}}; }

GraphSpec GraphSpec::erdos_renyi(int k, double edge_probability, double self_loop_probability, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::bernoulli_distribution edge(edge_probability), loop(self_loop_probability);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i == j ? loop(gen) : edge(gen)) edges.emplace_back(i, j);
    return {k, std::move(edges)};
}

GraphSpec GraphSpec::random_strongly_observable(int k, double edge_probability, double self_loop_probability,
                                                std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::bernoulli_distribution edge(edge_probability), loop(self_loop_probability);
    std::vector<std::pair<int, int>> edges;
    for (int j = 0; j < k; ++j) {
        if (loop(gen)) {
            edges.emplace_back(j, j);
            for (int i = 0; i < k; ++i)
                if (i != j && edge(gen)) edges.emplace_back(i, j);
        } else {
            for (int i = 0; i < k; ++i)
                if (i != j) edges.emplace_back(i, j);
        }
    }
    return {k, std::move(edges)};
}

GraphSpec GraphSpec::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open graph file " + path.string());
    int k = 0;
    if (!(in >> k)) throw DomainError("graph file " + path.string() + ": missing vertex count");
    std::vector<std::pair<int, int>> edges;
    int from = 0, to = 0;
    while (in >> from >> to) edges.emplace_back(from - 1, to - 1);
    if (!in.eof()) throw DomainError("graph file " + path.string() + ": malformed edge line");
    return {k, std::move(edges)};
}

void GraphSpec::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write graph file " + path.string());
    out << k_ << '\n';
    for (const auto& [from, to] : edges_) out << from + 1 << ' ' << to + 1 << '\n';
}

bool is_strongly_observable(const GraphSpec& graph) {
    for (int i = 0; i < graph.k(); ++i) {
        if (graph.has_self_loop(i)) continue;
        for (int j = 0; j < graph.k(); ++j)
            if (j != i && !graph.has_edge(j, i)) return false;
    }
    return true;
}

namespace {

struct MaxIndependentSet {
    std::vector<std::uint32_t> neighbours;
    int best = 0;

    void expand(std::uint32_t candidates, int size) {
        if (candidates == 0) {
            best = std::max(best, size);
            return;
        }
        if (size + std::popcount(candidates) <= best) return;
        int pivot = -1, pivot_degree = -1;
        for (std::uint32_t rest = candidates; rest; rest &= rest - 1) {
            const int v = std::countr_zero(rest);
            const int degree = std::popcount(neighbours[v] & candidates);
            if (degree > pivot_degree) {
                pivot = v;
                pivot_degree = degree;
            }
        }
        if (pivot_degree == 0) {
            best = std::max(best, size + std::popcount(candidates));
            return;
        }
        const std::uint32_t bit = 1u << pivot;
        expand(candidates & ~neighbours[pivot] & ~bit, size + 1);
        expand(candidates & ~bit, size);
    }
};

std::vector<std::vector<int>> undirected_neighbours(const GraphSpec& graph) {
    std::vector<std::set<int>> sets(graph.k());
    for (const auto& [from, to] : graph.edges()) {
        if (from == to) continue;
        sets[from].insert(to);
        sets[to].insert(from);
    }
    std::vector<std::vector<int>> out;
    for (const auto& s : sets) out.emplace_back(s.begin(), s.end());
    return out;
}

}  // namespace

IndependenceNumber independence_number(const GraphSpec& graph) {
    const auto nbrs = undirected_neighbours(graph);
    const int k = graph.k();
    if (k <= kExactIndependenceLimit) {
        MaxIndependentSet search;
        search.neighbours.assign(k, 0);
        for (int v = 0; v < k; ++v)
            for (int u : nbrs[v]) search.neighbours[v] |= 1u << u;
        const std::uint32_t all = k == 32 ? ~0u : ((1u << k) - 1u);
        search.expand(all, 0);
        return {search.best, true};
    }
    // Greedy minimum-degree heuristic: a valid independent set, hence a lower bound.
    std::vector<bool> alive(k, true);
    int size = 0;
    for (;;) {
        int pick = -1, pick_degree = k + 1;
        for (int v = 0; v < k; ++v) {
            if (!alive[v]) continue;
            int degree = 0;
            for (int u : nbrs[v]) degree += alive[u] ? 1 : 0;
            if (degree < pick_degree) {
                pick = v;
                pick_degree = degree;
            }
        }
        if (pick < 0) break;
        ++size;
        alive[pick] = false;
        for (int u : nbrs[pick]) alive[u] = false;
    }
    return {size, false};
}

double lemma5_lhs(const GraphSpec& graph, const VectorRef& p) {
    require(p.size() == graph.k(), "lemma5_lhs: distribution has the wrong dimension");
    double sum = 0.0;
    for (int i = 0; i < graph.k(); ++i) {
        const auto& from = graph.revealers(i);
        if (from.empty()) throw DomainError("lemma5_lhs: vertex " + std::to_string(i) + " has no revealers");
        double mass = 0.0;
        for (int j : from) mass += p[j];
        sum += p[i] / mass;
    }
    return sum;
}

double lemma5_rhs(const GraphSpec& graph, const VectorRef& p) {
    require(p.size() == graph.k(), "lemma5_rhs: distribution has the wrong dimension");
    require(p.minCoeff() > 0.0, "lemma5_rhs: distribution must be strictly positive");
    const double alpha = independence_number(graph).value;
    return 4.0 * alpha * std::log(4.0 * graph.k() / (alpha * p.minCoeff()));
}

}  // namespace osmd
