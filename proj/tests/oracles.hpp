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

// Test-only oracles. Each one recomputes a quantity by a different route
// than the library: explicit enumeration over per-agent action tuples,
// Gaussian elimination, finite differences, subset enumeration. Only raw
// MDP tables and the documented index layouts are shared.

#include "resmarl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

/// Calls f(locals, joint_index) for every tuple of local actions. The joint
/// index follows the documented layout (agent 0 least significant).
inline void for_each_joint(const std::vector<std::size_t>& arities,
                           const std::function<void(const std::vector<std::size_t>&, std::size_t)>& f) {
    std::vector<std::size_t> locals(arities.size(), 0);
    while (true) {
        std::size_t index = 0;
        for (std::size_t i = arities.size(); i-- > 0;) index = index * arities[i] + locals[i];
        f(locals, index);
        std::size_t i = 0;
        while (i < arities.size() && ++locals[i] == arities[i]) locals[i++] = 0;
        if (i == arities.size()) return;
    }
}

/// Local policies as policy[agent][state][action].
using LocalPolicies = std::vector<std::vector<std::vector<double>>>;

/// P^theta by explicit enumeration of every local-action tuple.
inline std::vector<std::vector<double>> induced_chain(const resmarl::Mdp& mdp, const LocalPolicies& policy) {
    const std::size_t S = mdp.n_states();
    std::vector<std::vector<double>> P(S, std::vector<double>(S, 0.0));
    for (std::size_t s = 0; s < S; ++s)
        for_each_joint(mdp.codec().arities(), [&](const std::vector<std::size_t>& locals, std::size_t a) {
            double w = 1.0;
            for (std::size_t i = 0; i < locals.size(); ++i) w *= policy[i][s][locals[i]];
            for (std::size_t k = 0; k < S; ++k) P[s][k] += w * mdp.transition_table()[(s * mdp.n_joint_actions() + a) * S + k];
        });
    return P;
}

/// Solves d P = d, sum d = 1 by Gaussian elimination with partial pivoting.
inline std::vector<double> stationary(const std::vector<std::vector<double>>& P) {
    const std::size_t n = P.size();
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A[i][j] = P[j][i] - (i == j ? 1.0 : 0.0);
    for (std::size_t j = 0; j < n; ++j) A[n - 1][j] = 1.0;
    A[n - 1][n] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
        std::swap(A[col], A[pivot]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = A[r][col] / A[col][col];
            for (std::size_t c = col; c <= n; ++c) A[r][c] -= factor * A[col][c];
        }
    }
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = A[i][n] / A[i][i];
    return d;
}

/// J = sum_{s, a} d(s) pi(s, a) Rbar(s, a) by enumeration.
inline double global_return(const resmarl::Mdp& mdp, const LocalPolicies& policy) {
    const auto d = stationary(induced_chain(mdp, policy));
    const std::size_t S = mdp.n_states();
    const std::size_t J = mdp.n_joint_actions();
    const std::size_t N = mdp.n_agents();
    double total = 0.0;
    for (std::size_t s = 0; s < S; ++s)
        for_each_joint(mdp.codec().arities(), [&](const std::vector<std::size_t>& locals, std::size_t a) {
            double w = d[s];
            for (std::size_t i = 0; i < N; ++i) w *= policy[i][s][locals[i]];
            double rbar = 0.0;
            for (std::size_t i = 0; i < N; ++i) rbar += mdp.reward_table()[(i * S + s) * J + a];
            total += w * rbar / static_cast<double>(N);
        });
    return total;
}

/// Softmax probabilities computed the textbook way (no shift).
inline std::vector<double> softmax(const std::vector<double>& logits) {
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) z += std::exp(logits[k]);
    for (std::size_t k = 0; k < logits.size(); ++k) p[k] = std::exp(logits[k]) / z;
    return p;
}

/// Central finite differences of g at x with step h.
inline std::vector<double> gradient(const std::function<double(const std::vector<double>&)>& g,
                                    std::vector<double> x, double h = 1e-5) {
    std::vector<double> grad(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double saved = x[k];
        x[k] = saved + h;
        const double up = g(x);
        x[k] = saved - h;
        const double down = g(x);
        x[k] = saved;
        grad[k] = (up - down) / (2.0 * h);
    }
    return grad;
}

/// r-robustness by enumerating all 3^n assignments of nodes to (S1, S2, neither).
inline bool r_robust(const std::vector<std::vector<std::size_t>>& adjacency, std::size_t r) {
    const std::size_t n = adjacency.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 3;
    std::vector<int> side(n);
    auto reachable = [&](int which) {
        for (std::size_t i = 0; i < n; ++i) {
            if (side[i] != which) continue;
            std::size_t outside = 0;
            for (std::size_t j : adjacency[i]) outside += side[j] != which ? 1 : 0;
            if (outside >= r) return true;
        }
        return false;
    };
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        bool has1 = false, has2 = false;
        for (std::size_t i = 0; i < n; ++i) {
            side[i] = static_cast<int>(c % 3);
            c /= 3;
            has1 = has1 || side[i] == 1;
            has2 = has2 || side[i] == 2;
        }
        if (!has1 || !has2) continue;
        if (!reachable(1) && !reachable(2)) return false;
    }
    return true;
}

} // namespace oracle
