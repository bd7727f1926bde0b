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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace resmarl {

using StateId = std::size_t;
using JointAction = std::size_t;
using LocalAction = std::size_t;

/**
 * Mixed-radix encoding of joint actions. Agent 0 is the least significant
 * digit, so `a = a^0 + |A^0| * (a^1 + |A^1| * (a^2 + ...))`.
 */
class JointActionCodec {
  public:
    JointActionCodec() = default;

    explicit JointActionCodec(std::vector<std::size_t> arities) : arities_(std::move(arities)) {
        strides_.resize(arities_.size());
        std::size_t stride = 1;
        for (std::size_t i = 0; i < arities_.size(); ++i) {
            if (arities_[i] == 0) throw DimensionError("agent " + std::to_string(i) + " has no actions");
            strides_[i] = stride;
            stride *= arities_[i];
        }
        size_ = stride;
    }

    std::size_t n_agents() const noexcept { return arities_.size(); }
    std::size_t size() const noexcept { return size_; }
    std::size_t arity(std::size_t agent) const { return arities_.at(agent); }
    const std::vector<std::size_t>& arities() const noexcept { return arities_; }

    JointAction encode(std::span<const LocalAction> locals) const {
        if (locals.size() != arities_.size())
            throw DimensionError("joint action needs one local action per agent");
        JointAction a = 0;
        for (std::size_t i = 0; i < locals.size(); ++i) {
            if (locals[i] >= arities_[i]) throw IndexError("local action out of range");
            a += locals[i] * strides_[i];
        }
        return a;
    }

    std::vector<LocalAction> decode(JointAction a) const {
        std::vector<LocalAction> locals(arities_.size());
        for (std::size_t i = 0; i < arities_.size(); ++i) locals[i] = local(a, i);
        return locals;
    }

    LocalAction local(JointAction a, std::size_t agent) const {
        return (a / strides_[agent]) % arities_[agent];
    }

    /// `a` with agent `agent`'s component replaced by `b`; everyone else fixed.
    JointAction with_local(JointAction a, std::size_t agent, LocalAction b) const {
        return a - local(a, agent) * strides_[agent] + b * strides_[agent];
    }

    friend bool operator==(const JointActionCodec&, const JointActionCodec&) = default;

  private:
    std::vector<std::size_t> arities_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 1;
};

/**
 * Finite networked multi-agent MDP with a globally observed state, one local
 * action set per agent, a dense transition tensor over joint actions and a
 * private reward table per agent.
 *
 * Layouts: `transition[(s * J + a) * S + s']`, `rewards[(i * S + s) * J + a]`
 * with `J` the number of joint actions.
 */
class Mdp {
  public:
    static constexpr double kStochasticTolerance = 1e-12;

    Mdp(std::vector<std::size_t> action_counts, std::size_t n_states, std::vector<double> transition,
        std::vector<double> rewards, double reward_noise = 0.0)
        : codec_(std::move(action_counts)), n_states_(n_states), transition_(std::move(transition)),
          rewards_(std::move(rewards)), reward_noise_(reward_noise) {
        validate();
    }

    std::size_t n_agents() const noexcept { return codec_.n_agents(); }
    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_joint_actions() const noexcept { return codec_.size(); }
    std::size_t n_actions(std::size_t agent) const { return codec_.arity(agent); }
    const JointActionCodec& codec() const noexcept { return codec_; }

    double transition(StateId s, JointAction a, StateId next) const {
        check(s, a);
        if (next >= n_states_) throw IndexError("next state out of range");
        return transition_[(s * n_joint_actions() + a) * n_states_ + next];
    }

    std::span<const double> transition_row(StateId s, JointAction a) const {
        check(s, a);
        return {transition_.data() + (s * n_joint_actions() + a) * n_states_, n_states_};
    }

    /// Expected reward R^i(s, a).
    double reward(std::size_t agent, StateId s, JointAction a) const {
        check(s, a);
        if (agent >= n_agents()) throw IndexError("agent out of range");
        return rewards_[(agent * n_states_ + s) * n_joint_actions() + a];
    }

    /// Globally averaged reward (1/N) sum_i R^i(s, a).
    double mean_reward(StateId s, JointAction a) const {
        double total = 0.0;
        for (std::size_t i = 0; i < n_agents(); ++i) total += reward(i, s, a);
        return total / static_cast<double>(n_agents());
    }

    /// Half-width of the optional additive uniform reward noise (0 = off).
    double reward_noise() const noexcept { return reward_noise_; }

    const std::vector<double>& transition_table() const noexcept { return transition_; }
    const std::vector<double>& reward_table() const noexcept { return rewards_; }

    friend bool operator==(const Mdp&, const Mdp&) = default;

  private:
    void check(StateId s, JointAction a) const {
        if (s >= n_states_) throw IndexError("state " + std::to_string(s) + " out of range");
        if (a >= n_joint_actions()) throw IndexError("joint action " + std::to_string(a) + " out of range");
    }

    void validate() const {
        if (n_agents() == 0) throw DimensionError("an MDP needs at least one agent");
        if (n_states_ == 0) throw DimensionError("an MDP needs at least one state");
        const std::size_t J = n_joint_actions();
        if (transition_.size() != n_states_ * J * n_states_)
            throw DimensionError("transition tensor has " + std::to_string(transition_.size()) +
                                 " entries, expected " + std::to_string(n_states_ * J * n_states_));
        if (rewards_.size() != n_agents() * n_states_ * J)
            throw DimensionError("reward table has " + std::to_string(rewards_.size()) + " entries, expected " +
                                 std::to_string(n_agents() * n_states_ * J));
        for (std::size_t row = 0; row < n_states_ * J; ++row) {
            double sum = 0.0;
            for (std::size_t k = 0; k < n_states_; ++k) {
                const double p = transition_[row * n_states_ + k];
                if (!(p >= 0.0) || !std::isfinite(p)) throw Error("transition probabilities must be finite and >= 0");
                sum += p;
            }
            if (std::abs(sum - 1.0) > kStochasticTolerance)
                throw Error("transition row (s=" + std::to_string(row / J) + ", a=" + std::to_string(row % J) +
                            ") does not sum to 1");
        }
        for (double r : rewards_)
            if (!std::isfinite(r)) throw Error("rewards must be finite");
        if (!(reward_noise_ >= 0.0) || !std::isfinite(reward_noise_))
            throw Error("reward noise must be a finite non-negative half-width");
    }

    JointActionCodec codec_;
    std::size_t n_states_;
    std::vector<double> transition_;
    std::vector<double> rewards_;
    double reward_noise_;
};

struct RandomMdpSpec {
    std::size_t n_agents = 2;
    std::size_t n_states = 2;
    std::size_t actions_per_agent = 2;
    double reward_low = 0.0;
    double reward_high = 1.0;
    std::uint64_t seed = 0;
    /// Guard against combinatorial blow-up of the joint action space.
    std::size_t max_joint_actions = 4096;
    double reward_noise = 0.0;
    friend bool operator==(const RandomMdpSpec&, const RandomMdpSpec&) = default;
};

/**
 * Random MDP with strictly positive transition probabilities (so the chain is
 * irreducible and aperiodic under every policy) and rewards uniform in
 * `[reward_low, reward_high]`. Deterministic in the seed.
 */
inline Mdp generate_random_mdp(const RandomMdpSpec& spec) {
    if (spec.n_agents < 1) throw Error("n_agents must be >= 1");
    if (spec.n_states < 2) throw Error("n_states must be >= 2");
    if (spec.actions_per_agent < 2) throw Error("actions_per_agent must be >= 2");
    if (!(spec.reward_low <= spec.reward_high)) throw Error("reward range must satisfy low <= high");

    std::size_t joint = 1;
    for (std::size_t i = 0; i < spec.n_agents; ++i) {
        joint *= spec.actions_per_agent;
        if (joint > spec.max_joint_actions)
            throw SizeCapError("joint action space exceeds the cap of " + std::to_string(spec.max_joint_actions));
    }

    Rng rng(derive_seed(spec.seed, 0x6d6470));
    const std::size_t S = spec.n_states;
    std::vector<double> transition(S * joint * S);
    for (std::size_t row = 0; row < S * joint; ++row) {
        double* p = transition.data() + row * S;
        double sum = 0.0;
        for (std::size_t k = 0; k < S; ++k) {
            p[k] = 0.05 + uniform01(rng);
            sum += p[k];
        }
        for (std::size_t k = 0; k < S; ++k) p[k] /= sum;
    }

    std::vector<double> rewards(spec.n_agents * S * joint);
    const double width = spec.reward_high - spec.reward_low;
    for (double& r : rewards) r = spec.reward_low + width * uniform01(rng);

    return Mdp(std::vector<std::size_t>(spec.n_agents, spec.actions_per_agent), S, std::move(transition),
               std::move(rewards), spec.reward_noise);
}

/// Next state drawn from P(.|s, a).
inline StateId sample_transition(const Mdp& mdp, StateId s, JointAction a, Rng& rng) {
    return sample_categorical(mdp.transition_row(s, a), rng);
}

/// Observed reward r^i: R^i(s, a) plus optional uniform noise. Consumes a
/// draw from `rng` only when noise is enabled.
inline double sample_reward(const Mdp& mdp, std::size_t agent, StateId s, JointAction a, Rng& rng) {
    const double r = mdp.reward(agent, s, a);
    if (mdp.reward_noise() == 0.0) return r;
    return r + mdp.reward_noise() * (2.0 * uniform01(rng) - 1.0);
}

} // namespace resmarl
