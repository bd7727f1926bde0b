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

// Synchronous-round simulation of the decentralized actor-critic with
// trimmed consensus.
//
// Each round t, starting from state s_t, joint action a_t and parameters
// (theta_t, omega_t, mu_t):
//   1. s_{t+1} ~ P(.|s_t, a_t); r^i_{t+1} = R^i(s_t, a_t); mu update.
//   2. a^i_{t+1} ~ pi^i(s_{t+1}) for every agent.
//   3. Joint action a_{t+1} assembled.
//   4. Per agent: TD error with (s_{t+1}, a_{t+1}) and mu_t, critic step to
//      omega-tilde, advantage, score, actor step.
//   5. Every agent broadcasts omega-tilde; adversaries broadcast their
//      strategy's payload instead.
//   6. Regular agents trim and combine; adversaries keep their own
//      omega-tilde.
//   7. t <- t + 1.
//
// Random streams: the environment (transitions, reward noise) draws from
// derive_seed(seed, 0) and agent i's action sampling from derive_seed(seed, 1 + i).

#include "resmarl/adversary.hpp"
#include "resmarl/agent.hpp"
#include "resmarl/consensus.hpp"
#include "resmarl/errors.hpp"
#include "resmarl/features.hpp"
#include "resmarl/graph.hpp"
#include "resmarl/markov.hpp"
#include "resmarl/mdp.hpp"
#include "resmarl/random.hpp"
#include "resmarl/schedule.hpp"
#include "resmarl/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace resmarl {

struct EarlyStop {
    bool enabled = false;
    double disagreement = 1e-6;
    double actor_update = 1e-6;
    /// Consecutive rounds both quantities must stay below their thresholds.
    long patience = 1000;
    friend bool operator==(const EarlyStop&, const EarlyStop&) = default;
};

struct EngineOptions {
    long rounds = 0;
    long log_interval = 100;
    StateId initial_state = 0;
    /// Skip the actor step (theta stays at its initial value).
    bool freeze_actor = false;
    /// Force delta = 0, so omega-tilde = omega.
    bool freeze_critic = false;
    /// Assert convex-hull containment of every regular combine.
    bool check_safety = true;
    /// Attach theta / omega of every agent to each logged row.
    bool snapshots = false;
    EarlyStop early_stop;
    friend bool operator==(const EngineOptions&, const EngineOptions&) = default;
};

/// Everything a run needs, fully materialized.
struct Experiment {
    Mdp mdp;
    /// Communication network; its adversary set and F drive the defense.
    GraphSchedule graph;
    FeatureMap features;
    StepSizeSchedule critic_steps = StepSizeSchedule::critic_default();
    StepSizeSchedule actor_steps = StepSizeSchedule::actor_default();
    /// Strategy used by every node in `graph.adversaries()`.
    AdversaryStrategy strategy = ConstantAttack{{0.0}};
    EngineOptions options;
};

/// Regular-agent disagreement max_{i,j} ||omega^i - omega^j||_inf.
inline double disagreement(const std::vector<AgentState>& agents) {
    double worst = 0.0;
    const AgentState* first = nullptr;
    for (const auto& a : agents)
        if (a.regular()) {
            first = &a;
            break;
        }
    if (first == nullptr) return 0.0;
    const std::size_t dim = first->critic.omega.size();
    for (std::size_t k = 0; k < dim; ++k) {
        double lo = first->critic.omega[k];
        double hi = lo;
        for (const auto& a : agents) {
            if (!a.regular()) continue;
            lo = std::min(lo, a.critic.omega[k]);
            hi = std::max(hi, a.critic.omega[k]);
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

/// Joint policy assembled from every agent's current actor.
inline JointPolicy joint_policy(const Mdp& mdp, const std::vector<AgentState>& agents) {
    if (agents.size() != mdp.n_agents()) throw DimensionError("one agent per MDP player required");
    std::vector<std::vector<double>> local(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
        local[i].reserve(mdp.n_states() * mdp.n_actions(i));
        for (StateId s = 0; s < mdp.n_states(); ++s) {
            const auto probs = policy_probs(agents[i].actor, s);
            local[i].insert(local[i].end(), probs.begin(), probs.end());
        }
    }
    return JointPolicy(mdp.codec(), mdp.n_states(), std::move(local));
}

/**
 * Metrics of the current parameters. J is evaluated on the joint policy of
 * ALL agents (adversaries still act in the environment); disagreement only
 * over regular agents. `window_rewards` are the globally averaged rewards
 * observed since the previous row.
 */
inline MetricsRow compute_metrics(long round, const std::vector<AgentState>& agents, const Mdp& mdp,
                                  std::span<const double> window_rewards) {
    MetricsRow row;
    row.round = round;
    row.j_oracle = global_return(mdp, joint_policy(mdp, agents));
    if (!window_rewards.empty()) {
        double total = 0.0;
        for (double r : window_rewards) total += r;
        row.avg_reward_window = total / static_cast<double>(window_rewards.size());
    }
    row.disagreement = disagreement(agents);
    for (const auto& a : agents) row.mu.push_back(a.mu);
    return row;
}

/// Stepwise driver. `run` wraps it; tests use it to inspect every round.
class Simulation {
  public:
    Simulation(const Experiment& experiment, std::uint64_t seed)
        : exp_(experiment), env_rng_(derive_seed(seed, 0)) {
        const Mdp& mdp = exp_.mdp;
        const std::size_t n = mdp.n_agents();
        if (exp_.graph.n_nodes() != n)
            throw DimensionError("graph has " + std::to_string(exp_.graph.n_nodes()) + " nodes but the MDP has " +
                                 std::to_string(n) + " agents");
        if (exp_.features.n_states() != mdp.n_states() || exp_.features.n_joint_actions() != mdp.n_joint_actions())
            throw DimensionError("feature map does not match the MDP");
        if (exp_.options.initial_state >= mdp.n_states()) throw IndexError("initial state out of range");
        if (exp_.options.log_interval <= 0) throw Error("log interval must be positive");
        exp_.critic_steps.validate();
        exp_.actor_steps.validate();

        agents_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            AgentState& a = agents_[i];
            a.id = i;
            a.actor = ActorParams::zeros(mdp.n_states(), mdp.n_actions(i));
            a.critic = CriticParams::zeros(exp_.features.dimension());
            a.mu = 0.0;
            if (exp_.graph.is_adversary(i)) a.adversary = exp_.strategy;
            agent_rngs_.emplace_back(derive_seed(seed, 1 + i));
        }
        state_ = exp_.options.initial_state;
        locals_.resize(n);
        for (std::size_t i = 0; i < n; ++i) locals_[i] = select_action(agents_[i].actor, state_, agent_rngs_[i]);
        action_ = mdp.codec().encode(locals_);
        trim_counts_.assign(n, std::vector<std::uint64_t>(n, 0));
    }

    long round() const noexcept { return round_; }
    StateId state() const noexcept { return state_; }
    JointAction joint_action() const noexcept { return action_; }
    const std::vector<AgentState>& agents() const noexcept { return agents_; }
    const Experiment& experiment() const noexcept { return exp_; }
    /// Largest |theta change| of the most recent round.
    double last_actor_update() const noexcept { return last_actor_update_; }
    /// Globally averaged rewards observed since the last `take_window`.
    const std::vector<double>& window() const noexcept { return window_; }

    /// Runs one full round.
    void step() {
        const Mdp& mdp = exp_.mdp;
        const JointActionCodec& codec = mdp.codec();
        const std::size_t n = agents_.size();
        const long t = round_;
        const double beta_w = step_size(exp_.critic_steps, t);
        const double beta_th = step_size(exp_.actor_steps, t);

        // 1. environment
        const StateId next_state = sample_transition(mdp, state_, action_, env_rng_);
        std::vector<double> rewards(n);
        std::vector<double> mu_prev(n);
        double mean_reward = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rewards[i] = sample_reward(mdp, i, state_, action_, env_rng_);
            mu_prev[i] = agents_[i].mu;
            agents_[i].mu = mu_update(agents_[i].mu, beta_w, rewards[i]);
            mean_reward += rewards[i];
        }
        window_.push_back(mean_reward / static_cast<double>(n));

        // 2-3. next actions
        std::vector<LocalAction> next_locals(n);
        for (std::size_t i = 0; i < n; ++i)
            next_locals[i] = select_action(agents_[i].actor, next_state, agent_rngs_[i]);
        const JointAction next_action = codec.encode(next_locals);

        // 4. local critic and actor steps
        last_actor_update_ = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            AgentState& a = agents_[i];
            const auto& omega = a.critic.omega;
            if (exp_.options.freeze_critic) {
                a.critic.omega_tilde = omega;
            } else {
                const double q_curr = q_value(omega, exp_.features, state_, action_);
                const double q_next = q_value(omega, exp_.features, next_state, next_action);
                const double delta = td_error(rewards[i], mu_prev[i], q_next, q_curr);
                a.critic.omega_tilde = critic_local_step(omega, beta_w, delta, exp_.features, state_, action_);
            }
            if (!exp_.options.freeze_actor) {
                const double adv = advantage(omega, a.actor, exp_.features, codec, i, state_, action_);
                const auto psi = score(a.actor, state_, locals_[i]);
                auto theta = actor_step(a.actor.theta, beta_th, adv, psi);
                for (std::size_t k = 0; k < theta.size(); ++k)
                    last_actor_update_ = std::max(last_actor_update_, std::abs(theta[k] - a.actor.theta[k]));
                a.actor.theta = std::move(theta);
            }
        }

        // 5. messages
        const Graph& graph = exp_.graph.at(t);
        std::vector<ParameterMessage> outbox(n);
        for (std::size_t i = 0; i < n; ++i) {
            outbox[i].sender = i;
            outbox[i].sender_degree = graph.degree(i);
            outbox[i].payload = agents_[i].regular() ? agents_[i].critic.omega_tilde
                                                     : adversary_message(*agents_[i].adversary, agents_[i], t);
        }

        // 6. trim and combine; all inputs are gathered before anyone commits
        std::vector<std::vector<double>> next_omega(n);
        std::vector<ParameterMessage> inbox;
        for (std::size_t i = 0; i < n; ++i) {
            AgentState& a = agents_[i];
            if (!a.regular()) {
                next_omega[i] = a.critic.omega_tilde;
                continue;
            }
            inbox.clear();
            for (NodeId j : graph.neighbors(i)) inbox.push_back(outbox[j]);
            const TrimResult kept = trim(a.critic.omega_tilde, inbox, exp_.graph.trim());
            next_omega[i] = consensus_combine(a.critic.omega_tilde, inbox, kept, graph.degree(i));
            if (exp_.options.check_safety) {
                if (auto k = hull_violation(a.critic.omega_tilde, inbox, kept, next_omega[i]))
                    throw SafetyViolation(t, i, *k,
                                          "round " + std::to_string(t) + ": agent " + std::to_string(i) +
                                              " left the hull of its retained values at coordinate " +
                                              std::to_string(*k));
            }
            if (exp_.graph.trim() > 0)
                for (std::size_t m = 0; m < inbox.size(); ++m) trim_counts_[i][inbox[m].sender] += kept.trimmed_count(m);
        }
        for (std::size_t i = 0; i < n; ++i) agents_[i].critic.omega = std::move(next_omega[i]);

        // 7. advance
        state_ = next_state;
        action_ = next_action;
        locals_ = std::move(next_locals);
        ++round_;
        check_finite();
    }

    /// Metrics row for the current round; resets the reward window and trim tallies.
    MetricsRow take_metrics() {
        MetricsRow row = compute_metrics(round_, agents_, exp_.mdp, window_);
        window_.clear();
        for (std::size_t i = 0; i < trim_counts_.size(); ++i)
            for (std::size_t j = 0; j < trim_counts_[i].size(); ++j)
                if (trim_counts_[i][j] > 0) {
                    row.trimmed.push_back({i, j, trim_counts_[i][j]});
                    trim_counts_[i][j] = 0;
                }
        if (exp_.options.snapshots) {
            ParameterSnapshot snap;
            for (const auto& a : agents_) {
                snap.theta.push_back(a.actor.theta);
                snap.omega.push_back(a.critic.omega);
            }
            row.snapshot = std::move(snap);
        }
        return row;
    }

  private:
    void check_finite() const {
        auto finite = [](const std::vector<double>& v) {
            return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
        };
        for (const auto& a : agents_)
            if (!std::isfinite(a.mu) || !finite(a.actor.theta) || !finite(a.critic.omega) ||
                !finite(a.critic.omega_tilde))
                throw NonFiniteError(round_, a.id,
                                     "non-finite parameters of agent " + std::to_string(a.id) + " after round " +
                                         std::to_string(round_));
    }

    Experiment exp_;
    Rng env_rng_;
    std::vector<Rng> agent_rngs_;
    std::vector<AgentState> agents_;
    StateId state_ = 0;
    JointAction action_ = 0;
    std::vector<LocalAction> locals_;
    long round_ = 0;
    double last_actor_update_ = 0.0;
    std::vector<double> window_;
    std::vector<std::vector<std::uint64_t>> trim_counts_;
};

struct RunResult {
    TrajectoryLog log;
    std::vector<AgentState> final_agents;
    long rounds_executed = 0;
    bool early_stopped = false;
};

/**
 * Runs `options.rounds` rounds (or until early stop) and logs a row at round 0,
 * every `log_interval` rounds and at the final round. Deterministic in `seed`.
 */
inline RunResult run(const Experiment& experiment, std::uint64_t seed, RunMetadata metadata = {}) {
    Simulation sim(experiment, seed);
    RunResult result;
    metadata.seed = seed;
    result.log.metadata = std::move(metadata);
    result.log.append(sim.take_metrics());

    const EngineOptions& opt = experiment.options;
    long calm = 0;
    while (sim.round() < opt.rounds) {
        sim.step();
        if (sim.round() % opt.log_interval == 0) result.log.append(sim.take_metrics());
        if (opt.early_stop.enabled) {
            const bool quiet = disagreement(sim.agents()) < opt.early_stop.disagreement &&
                               sim.last_actor_update() < opt.early_stop.actor_update;
            calm = quiet ? calm + 1 : 0;
            if (calm >= opt.early_stop.patience) {
                result.early_stopped = true;
                break;
            }
        }
    }
    if (result.log.rows.back().round != sim.round()) result.log.append(sim.take_metrics());
    result.rounds_executed = sim.round();
    result.final_agents = sim.agents();
    return result;
}

} // namespace resmarl
