// Copyright 2026 The resmarl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "resmarl/errors.hpp"
#include "resmarl/random.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace resmarl {

using NodeId = std::size_t;
using Edge = std::pair<NodeId, NodeId>;

/// Static undirected simple graph with sorted adjacency lists.
class Graph {
  public:
    Graph() = default;

    /// Builds from an edge list. Duplicates collapse; self-loops are rejected.
    Graph(std::size_t n_nodes, std::span<const Edge> edges) : adjacency_(n_nodes) {
        for (auto [u, v] : edges) {
            if (u >= n_nodes || v >= n_nodes)
                throw IndexError("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") out of range");
            if (u == v) throw Error("self-loop at node " + std::to_string(u));
            adjacency_[u].push_back(v);
            adjacency_[v].push_back(u);
        }
        for (auto& list : adjacency_) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
    }

    static Graph ring(std::size_t n) {
        std::vector<Edge> edges;
        if (n == 2) edges.emplace_back(0, 1);
        if (n > 2)
            for (NodeId i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
        return Graph(n, edges);
    }

    static Graph path(std::size_t n) {
        std::vector<Edge> edges;
        for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
        return Graph(n, edges);
    }

    /// Node 0 is the center.
    static Graph star(std::size_t n) {
        std::vector<Edge> edges;
        for (NodeId i = 1; i < n; ++i) edges.emplace_back(0, i);
        return Graph(n, edges);
    }

    static Graph complete(std::size_t n) {
        std::vector<Edge> edges;
        for (NodeId i = 0; i < n; ++i)
            for (NodeId j = i + 1; j < n; ++j) edges.emplace_back(i, j);
        return Graph(n, edges);
    }

    static Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error("edge probability must lie in [0, 1]");
        Rng rng(derive_seed(seed, 0x6772));
        std::vector<Edge> edges;
        for (NodeId i = 0; i < n; ++i)
            for (NodeId j = i + 1; j < n; ++j)
                if (uniform01(rng) < p) edges.emplace_back(i, j);
        return Graph(n, edges);
    }

    std::size_t n_nodes() const noexcept { return adjacency_.size(); }
    const std::vector<NodeId>& neighbors(NodeId i) const { return adjacency_.at(i); }
    std::size_t degree(NodeId i) const { return neighbors(i).size(); }

    bool has_edge(NodeId i, NodeId j) const {
        const auto& list = neighbors(i);
        return std::binary_search(list.begin(), list.end(), j);
    }

    /// Each undirected edge once, as (smaller, larger), sorted.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (NodeId i = 0; i < n_nodes(); ++i)
            for (NodeId j : adjacency_[i])
                if (i < j) out.emplace_back(i, j);
        return out;
    }

    bool connected() const {
        if (n_nodes() == 0) return true;
        std::vector<char> seen(n_nodes(), 0);
        std::vector<NodeId> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (NodeId v : adjacency_[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
        }
        return count == n_nodes();
    }

    friend bool operator==(const Graph&, const Graph&) = default;

  private:
    std::vector<std::vector<NodeId>> adjacency_;
};

/**
 * Time-varying communication network: round t uses `period[t % period.size()]`.
 * Also carries the adversary set and the trimming parameter F. Immutable
 * after construction.
 */
class GraphSchedule {
  public:
    GraphSchedule(std::vector<Graph> period, std::vector<NodeId> adversaries = {}, std::size_t trim = 0)
        : period_(std::move(period)), adversaries_(std::move(adversaries)), trim_(trim) {
        if (period_.empty()) throw Error("a graph schedule needs at least one graph");
        const std::size_t n = period_.front().n_nodes();
        for (const Graph& g : period_)
            if (g.n_nodes() != n) throw DimensionError("every graph in a schedule must have the same node count");
        std::sort(adversaries_.begin(), adversaries_.end());
        if (std::adjacent_find(adversaries_.begin(), adversaries_.end()) != adversaries_.end())
            throw Error("adversary set has duplicates");
        for (NodeId a : adversaries_)
            if (a >= n) throw IndexError("adversary id " + std::to_string(a) + " out of range");
    }

    explicit GraphSchedule(Graph graph, std::vector<NodeId> adversaries = {}, std::size_t trim = 0)
        : GraphSchedule(std::vector<Graph>{std::move(graph)}, std::move(adversaries), trim) {}

    std::size_t n_nodes() const noexcept { return period_.front().n_nodes(); }
    std::size_t period_length() const noexcept { return period_.size(); }
    bool is_static() const noexcept { return period_.size() == 1; }
    const Graph& at(long round) const { return period_[static_cast<std::size_t>(round) % period_.size()]; }
    const std::vector<Graph>& period() const noexcept { return period_; }

    const std::vector<NodeId>& adversaries() const noexcept { return adversaries_; }
    bool is_adversary(NodeId i) const { return std::binary_search(adversaries_.begin(), adversaries_.end(), i); }
    std::size_t trim() const noexcept { return trim_; }

    GraphSchedule with_adversaries(std::vector<NodeId> adversaries) const {
        return GraphSchedule(period_, std::move(adversaries), trim_);
    }

    /// True when every graph of the period is connected.
    bool connected() const {
        return std::all_of(period_.begin(), period_.end(), [](const Graph& g) { return g.connected(); });
    }

  private:
    std::vector<Graph> period_;
    std::vector<NodeId> adversaries_;
    std::size_t trim_;
};

/// K_i at round t; never contains i.
inline const std::vector<NodeId>& neighborhood(const GraphSchedule& g, NodeId i, long round) {
    if (i >= g.n_nodes()) throw IndexError("node " + std::to_string(i) + " out of range");
    return g.at(round).neighbors(i);
}

/**
 * True iff every node outside `subset` has at most r neighbors inside it, at
 * every round of the schedule. Schedules are periodic, so one period covers
 * every horizon.
 */
inline bool is_r_local(const GraphSchedule& g, std::span<const NodeId> subset, std::size_t r) {
    std::vector<char> in(g.n_nodes(), 0);
    for (NodeId v : subset) {
        if (v >= g.n_nodes()) throw IndexError("subset node out of range");
        in[v] = 1;
    }
    for (const Graph& graph : g.period())
        for (NodeId i = 0; i < graph.n_nodes(); ++i) {
            if (in[i]) continue;
            std::size_t count = 0;
            for (NodeId j : graph.neighbors(i)) count += in[j];
            if (count > r) return false;
        }
    return true;
}

/// Per-node share of adversarial neighbors |K_i ∩ S| / |K_i|, maximized over
/// the period; 0 for adversaries themselves and for isolated nodes.
inline std::vector<double> adversary_fraction(const GraphSchedule& g) {
    std::vector<double> fraction(g.n_nodes(), 0.0);
    for (const Graph& graph : g.period())
        for (NodeId i = 0; i < graph.n_nodes(); ++i) {
            if (g.is_adversary(i) || graph.degree(i) == 0) continue;
            std::size_t count = 0;
            for (NodeId j : graph.neighbors(i)) count += g.is_adversary(j) ? 1 : 0;
            fraction[i] = std::max(fraction[i], static_cast<double>(count) / static_cast<double>(graph.degree(i)));
        }
    return fraction;
}

/**
 * Uniformly random size-`count` node subset that is F-local in `g`, by
 * rejection sampling. Throws PlacementError when `max_attempts` draws all fail.
 */
inline std::vector<NodeId> place_adversaries(const GraphSchedule& g, std::size_t count, std::size_t trim, Rng& rng,
                                             std::size_t max_attempts = 10000) {
    const std::size_t n = g.n_nodes();
    if (count >= n) throw PlacementError("adversary count must be smaller than the node count");
    if (count == 0) return {};
    std::vector<NodeId> nodes(n);
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::iota(nodes.begin(), nodes.end(), NodeId{0});
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t pick = k + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n - k));
            std::swap(nodes[k], nodes[std::min(pick, n - 1)]);
        }
        std::vector<NodeId> chosen(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(count));
        std::sort(chosen.begin(), chosen.end());
        if (is_r_local(g, chosen, trim)) return chosen;
    }
    throw PlacementError("no " + std::to_string(trim) + "-local placement of " + std::to_string(count) +
                         " adversaries found after " + std::to_string(max_attempts) + " attempts");
}

/// Metropolis pair weight 1 / (1 + max(k_i, k_j)).
constexpr double metropolis_weight(std::size_t degree_i, std::size_t degree_j) noexcept {
    return 1.0 / (1.0 + static_cast<double>(std::max(degree_i, degree_j)));
}

/// Mixing row of one agent: retained neighbors tau_i plus the self-weight.
struct ConsensusRow {
    NodeId agent = 0;
    std::vector<NodeId> retained;
    /// (node, c(i, node)) for each retained neighbor, then (agent, self-weight).
    std::vector<std::pair<NodeId, double>> weights;

    double weight_of(NodeId j) const {
        for (auto [node, w] : weights)
            if (node == j) return w;
        return 0.0;
    }

    double self_weight() const { return weight_of(agent); }
};

/**
 * Metropolis mixing rows for round t. Pair weights use full-graph degrees;
 * the self-weight absorbs whatever mass the trimmed neighbors would have had.
 * `retained[i]` must be a subset of K_i.
 */
inline std::vector<ConsensusRow> metropolis_weights(const GraphSchedule& g, long round,
                                                    const std::vector<std::vector<NodeId>>& retained) {
    const Graph& graph = g.at(round);
    if (retained.size() != graph.n_nodes()) throw DimensionError("one retained set per agent required");
    std::vector<ConsensusRow> rows(graph.n_nodes());
    for (NodeId i = 0; i < graph.n_nodes(); ++i) {
        ConsensusRow& row = rows[i];
        row.agent = i;
        row.retained = retained[i];
        std::sort(row.retained.begin(), row.retained.end());
        double total = 0.0;
        for (NodeId j : row.retained) {
            if (!graph.has_edge(i, j))
                throw Error("node " + std::to_string(j) + " retained by " + std::to_string(i) + " is not a neighbor");
            const double w = metropolis_weight(graph.degree(i), graph.degree(j));
            row.weights.emplace_back(j, w);
            total += w;
        }
        row.weights.emplace_back(i, 1.0 - total);
    }
    return rows;
}

/// Untrimmed weight matrix C_t as a dense row-major n x n array.
inline std::vector<double> metropolis_matrix(const GraphSchedule& g, long round) {
    const Graph& graph = g.at(round);
    const std::size_t n = graph.n_nodes();
    std::vector<std::vector<NodeId>> all(n);
    for (NodeId i = 0; i < n; ++i) all[i] = graph.neighbors(i);
    std::vector<double> matrix(n * n, 0.0);
    for (const ConsensusRow& row : metropolis_weights(g, round, all))
        for (auto [j, w] : row.weights) matrix[row.agent * n + j] = w;
    return matrix;
}

/**
 * r-robustness: for every pair of disjoint nonempty node subsets, at least one
 * of them contains a node with >= r neighbors outside that subset.
 *
 * A subset is "reachable" when it has such a node. The graph is r-robust iff no
 * two disjoint subsets are both unreachable; this is checked with a
 * sum-over-subsets pass, O(n 2^n). Limited to `max_nodes` (16) nodes.
 */
inline bool is_r_robust(const Graph& graph, std::size_t r, std::size_t max_nodes = 16) {
    const std::size_t n = graph.n_nodes();
    if (n > max_nodes || n > 20)
        throw SizeCapError("r-robustness check is limited to " + std::to_string(max_nodes) + " nodes");
    if (r == 0 || n < 2) return true;
    const std::uint32_t full = (1u << n) - 1u;
    std::vector<std::uint32_t> nbr(n, 0);
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j : graph.neighbors(i)) nbr[i] |= 1u << j;

    // has_bad[m]: some nonempty unreachable subset lies inside m.
    std::vector<char> has_bad(std::size_t{1} << n, 0);
    for (std::uint32_t m = 1; m <= full; ++m) {
        bool reachable = false;
        for (NodeId i = 0; i < n && !reachable; ++i)
            if ((m >> i) & 1u)
                reachable = static_cast<std::size_t>(__builtin_popcount(nbr[i] & ~m)) >= r;
        has_bad[m] = reachable ? 0 : 1;
    }
    std::vector<char> bad = has_bad;
    for (NodeId bit = 0; bit < n; ++bit)
        for (std::uint32_t m = 0; m <= full; ++m)
            if ((m >> bit) & 1u) has_bad[m] |= has_bad[m ^ (1u << bit)];
    for (std::uint32_t m = 1; m < full; ++m)
        if (bad[m] && has_bad[full & ~m]) return false;
    return true;
}

inline bool is_r_robust(const GraphSchedule& g, std::size_t r, std::size_t max_nodes = 16) {
    if (!g.is_static()) throw Error("r-robustness is only defined here for static graphs");
    return is_r_robust(g.at(0), r, max_nodes);
}

} // namespace resmarl
