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

// Exact Markov-chain quantities of a fixed joint policy: the induced
// state-to-state chain, its stationary distribution and long-run average
// rewards. These are the oracles the learning code is measured against.

#include "resmarl/errors.hpp"
#include "resmarl/mdp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

namespace resmarl {

/**
 * Product policy pi(s, a) = prod_i pi^i(s, a^i), stored as one table per agent
 * with layout `local[i][s * |A^i| + a^i]`.
 */
class JointPolicy {
  public:
    static constexpr double kTolerance = 1e-12;

    JointPolicy(JointActionCodec codec, std::size_t n_states, std::vector<std::vector<double>> local)
        : codec_(std::move(codec)), n_states_(n_states), local_(std::move(local)) {
        if (local_.size() != codec_.n_agents()) throw DimensionError("one local policy table per agent required");
        for (std::size_t i = 0; i < local_.size(); ++i) {
            const std::size_t A = codec_.arity(i);
            if (local_[i].size() != n_states_ * A)
                throw DimensionError("local policy of agent " + std::to_string(i) + " has the wrong size");
            for (std::size_t s = 0; s < n_states_; ++s) {
                double sum = 0.0;
                for (std::size_t b = 0; b < A; ++b) {
                    const double p = local_[i][s * A + b];
                    if (!(p >= 0.0) || !std::isfinite(p)) throw Error("policy probabilities must be >= 0");
                    sum += p;
                }
                if (std::abs(sum - 1.0) > kTolerance)
                    throw Error("local policy of agent " + std::to_string(i) + " at state " + std::to_string(s) +
                                " does not sum to 1");
            }
        }
    }

    /// Uniform policy for every agent.
    static JointPolicy uniform(const Mdp& mdp) {
        std::vector<std::vector<double>> local(mdp.n_agents());
        for (std::size_t i = 0; i < mdp.n_agents(); ++i)
            local[i].assign(mdp.n_states() * mdp.n_actions(i), 1.0 / static_cast<double>(mdp.n_actions(i)));
        return JointPolicy(mdp.codec(), mdp.n_states(), std::move(local));
    }

    std::size_t n_states() const noexcept { return n_states_; }
    const JointActionCodec& codec() const noexcept { return codec_; }

    double local(std::size_t agent, StateId s, LocalAction b) const {
        return local_.at(agent)[s * codec_.arity(agent) + b];
    }

    /// pi(s, a) for a joint action.
    double joint(StateId s, JointAction a) const {
        double p = 1.0;
        for (std::size_t i = 0; i < local_.size(); ++i) p *= local(i, s, codec_.local(a, i));
        return p;
    }

    bool strictly_positive() const {
        for (const auto& table : local_)
            if (std::any_of(table.begin(), table.end(), [](double p) { return !(p > 0.0); })) return false;
        return true;
    }

  private:
    JointActionCodec codec_;
    std::size_t n_states_;
    std::vector<std::vector<double>> local_;
};

/**
 * Arbitrary state-conditional distribution over joint actions,
 * `table[s * J + a]`. Covers correlated (non-product) policies such as
 * mixtures of product policies.
 */
class JointDistribution {
  public:
    JointDistribution(std::size_t n_states, std::size_t n_joint, std::vector<double> table)
        : n_states_(n_states), n_joint_(n_joint), table_(std::move(table)) {
        if (table_.size() != n_states_ * n_joint_) throw DimensionError("joint distribution has the wrong size");
        for (std::size_t s = 0; s < n_states_; ++s) {
            double sum = 0.0;
            for (std::size_t a = 0; a < n_joint_; ++a) {
                const double p = table_[s * n_joint_ + a];
                if (!(p >= 0.0) || !std::isfinite(p)) throw Error("joint action probabilities must be >= 0");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-10)
                throw Error("joint action distribution at state " + std::to_string(s) + " does not sum to 1");
        }
    }

    static JointDistribution from_policy(const JointPolicy& policy) {
        const std::size_t S = policy.n_states();
        const std::size_t J = policy.codec().size();
        std::vector<double> table(S * J);
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t a = 0; a < J; ++a) table[s * J + a] = policy.joint(s, a);
        return JointDistribution(S, J, std::move(table));
    }

    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_joint_actions() const noexcept { return n_joint_; }
    double operator()(StateId s, JointAction a) const { return table_[s * n_joint_ + a]; }

  private:
    std::size_t n_states_;
    std::size_t n_joint_;
    std::vector<double> table_;
};

/// Dense row-major square matrix of transition probabilities.
struct StochasticMatrix {
    std::size_t n = 0;
    std::vector<double> data;

    StochasticMatrix() = default;
    StochasticMatrix(std::size_t size, std::vector<double> values) : n(size), data(std::move(values)) {
        if (data.size() != n * n) throw DimensionError("matrix data must have n*n entries");
    }

    double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }

    double max_row_sum_error() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) sum += data[i * n + j];
            worst = std::max(worst, std::abs(sum - 1.0));
        }
        return worst;
    }
};

/// Stationary distribution d of a chain together with how it was obtained.
struct ChainDistribution {
    std::vector<double> probabilities;
    /// ||dP - d||_inf at the returned d.
    double residual = 0.0;
    std::size_t iterations = 0;
    bool used_linear_solve = false;

    double operator[](std::size_t s) const { return probabilities[s]; }
    std::size_t size() const noexcept { return probabilities.size(); }
};

/// P^theta(s'|s) = sum_a pi(s, a) P(s'|s, a).
inline StochasticMatrix induced_chain(const Mdp& mdp, const JointDistribution& policy) {
    const std::size_t S = mdp.n_states();
    const std::size_t J = mdp.n_joint_actions();
    if (policy.n_states() != S || policy.n_joint_actions() != J)
        throw DimensionError("policy dimensions do not match the MDP");
    StochasticMatrix chain(S, std::vector<double>(S * S, 0.0));
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < J; ++a) {
            const double w = policy(s, a);
            if (w == 0.0) continue;
            const auto row = mdp.transition_row(s, a);
            for (std::size_t k = 0; k < S; ++k) chain(s, k) += w * row[k];
        }
    }
    return chain;
}

inline StochasticMatrix induced_chain(const Mdp& mdp, const JointPolicy& policy) {
    if (!(policy.codec() == mdp.codec()) || policy.n_states() != mdp.n_states())
        throw DimensionError("policy dimensions do not match the MDP");
    return induced_chain(mdp, JointDistribution::from_policy(policy));
}

/**
 * Period of an irreducible chain (gcd of cycle lengths through the positive
 * entries), or 0 when the chain is reducible.
 */
inline std::size_t chain_period(const StochasticMatrix& chain) {
    const std::size_t n = chain.n;
    if (n == 0) return 0;
    auto reach_all = [&](bool reversed) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v) {
                const double p = reversed ? chain(v, u) : chain(u, v);
                if (p > 0.0 && !seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
            }
        }
        return count == n;
    };
    if (!reach_all(false) || !reach_all(true)) return 0;

    std::vector<long> level(n, -1);
    std::queue<std::size_t> queue;
    level[0] = 0;
    queue.push(0);
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop();
        for (std::size_t v = 0; v < n; ++v)
            if (chain(u, v) > 0.0 && level[v] < 0) {
                level[v] = level[u] + 1;
                queue.push(v);
            }
    }
    long period = 0;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
            if (chain(u, v) > 0.0) period = std::gcd(period, std::abs(level[u] + 1 - level[v]));
    return static_cast<std::size_t>(period);
}

struct StationaryOptions {
    double tolerance = 1e-12;
    std::size_t max_iterations = 100000;
    /// Acceptance threshold on ||dP - d||_inf before falling back to a solve.
    double residual_tolerance = 1e-10;
};

/**
 * Stationary distribution of an irreducible aperiodic chain. Power iteration
 * from the uniform vector, falling back to a dense linear solve of
 * d (P - I) = 0, sum(d) = 1 when iteration stalls.
 *
 * Throws NonErgodicError for reducible or periodic chains.
 */
inline ChainDistribution stationary_distribution(const StochasticMatrix& chain, const StationaryOptions& options = {}) {
    const std::size_t n = chain.n;
    if (n == 0) throw DimensionError("empty chain");
    if (chain.max_row_sum_error() > 1e-10) throw Error("chain is not row-stochastic");
    for (double p : chain.data)
        if (!(p >= 0.0)) throw Error("chain has negative entries");
    const std::size_t period = chain_period(chain);
    if (period == 0) throw NonErgodicError("chain is reducible");
    if (period > 1) throw NonErgodicError("chain is periodic with period " + std::to_string(period));

    auto step = [&](const std::vector<double>& d, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double di = d[i];
            if (di == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) out[j] += di * chain(i, j);
        }
    };
    auto residual_of = [&](const std::vector<double>& d) {
        std::vector<double> next(n);
        step(d, next);
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j) r = std::max(r, std::abs(next[j] - d[j]));
        return r;
    };

    ChainDistribution result;
    std::vector<double> d(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n);
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        step(d, next);
        double diff = 0.0;
        for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(next[j] - d[j]));
        d.swap(next);
        result.iterations = it + 1;
        if (diff < options.tolerance) break;
    }
    double total = std::accumulate(d.begin(), d.end(), 0.0);
    for (double& x : d) x /= total;
    result.residual = residual_of(d);

    if (!(result.residual < options.residual_tolerance)) {
        Eigen::MatrixXd system(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) system(i, j) = chain(j, i) - (i == j ? 1.0 : 0.0);
        system.row(n - 1).setOnes();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        rhs(n - 1) = 1.0;
        const Eigen::VectorXd solution = system.partialPivLu().solve(rhs);
        for (std::size_t i = 0; i < n; ++i) d[i] = std::max(0.0, solution(i));
        total = std::accumulate(d.begin(), d.end(), 0.0);
        for (double& x : d) x /= total;
        result.used_linear_solve = true;
        result.residual = residual_of(d);
    }
    result.probabilities = std::move(d);
    return result;
}

/// Long-run average of f(s, a) under the policy: sum_{s,a} d(s) pi(s,a) f(s,a).
template <class RewardFn>
double long_run_average(const Mdp& mdp, const JointDistribution& policy, RewardFn&& f) {
    const ChainDistribution d = stationary_distribution(induced_chain(mdp, policy));
    double value = 0.0;
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        double inner = 0.0;
        for (std::size_t a = 0; a < mdp.n_joint_actions(); ++a) inner += policy(s, a) * f(s, a);
        value += d[s] * inner;
    }
    return value;
}

/// Globally averaged long-run return J(theta) with R-bar = mean of agents' rewards.
inline double global_return(const Mdp& mdp, const JointPolicy& policy) {
    return long_run_average(mdp, JointDistribution::from_policy(policy),
                            [&](StateId s, JointAction a) { return mdp.mean_reward(s, a); });
}

/// Long-run average of a single agent's reward R^i.
inline double agent_average_reward(const Mdp& mdp, const JointPolicy& policy, std::size_t agent) {
    return long_run_average(mdp, JointDistribution::from_policy(policy),
                            [&](StateId s, JointAction a) { return mdp.reward(agent, s, a); });
}

} // namespace resmarl
