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

// Local computations of one agent: softmax actor over one-hot
// (state, local action) features, linear critic over joint-action features,
// and the actor / critic / running-reward updates.

#include "resmarl/adversary.hpp"
#include "resmarl/errors.hpp"
#include "resmarl/features.hpp"
#include "resmarl/mdp.hpp"
#include "resmarl/random.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace resmarl {

/// Logits are clamped to this magnitude before exponentiation.
inline constexpr double kLogitClamp = 50.0;

/// Softmax policy parameters theta^i; logit of (s, b) is `theta[s * n_actions + b]`.
struct ActorParams {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::vector<double> theta;

    static ActorParams zeros(std::size_t n_states, std::size_t n_actions) {
        return {n_states, n_actions, std::vector<double>(n_states * n_actions, 0.0)};
    }

    std::size_t dimension() const noexcept { return theta.size(); }
    friend bool operator==(const ActorParams&, const ActorParams&) = default;
};

/// Critic weights: omega (after consensus) and omega-tilde (after the local
/// critic step, before consensus).
struct CriticParams {
    std::vector<double> omega;
    std::vector<double> omega_tilde;

    static CriticParams zeros(std::size_t dimension) {
        return {std::vector<double>(dimension, 0.0), std::vector<double>(dimension, 0.0)};
    }

    friend bool operator==(const CriticParams&, const CriticParams&) = default;
};

struct AgentState {
    std::size_t id = 0;
    ActorParams actor;
    CriticParams critic;
    double mu = 0.0;
    /// Empty for regular agents.
    std::optional<AdversaryStrategy> adversary;

    bool regular() const noexcept { return !adversary.has_value(); }
    friend bool operator==(const AgentState&, const AgentState&) = default;
};

/// pi^i(s, .): softmax of the clamped logits with max subtraction.
inline std::vector<double> policy_probs(const ActorParams& actor, StateId s) {
    if (s >= actor.n_states) throw IndexError("state out of range for the actor");
    const double* logits = actor.theta.data() + s * actor.n_actions;
    std::vector<double> probs(actor.n_actions);
    double top = -kLogitClamp;
    for (std::size_t b = 0; b < actor.n_actions; ++b) top = std::max(top, std::clamp(logits[b], -kLogitClamp, kLogitClamp));
    double total = 0.0;
    for (std::size_t b = 0; b < actor.n_actions; ++b) {
        probs[b] = std::exp(std::clamp(logits[b], -kLogitClamp, kLogitClamp) - top);
        total += probs[b];
    }
    for (double& p : probs) p /= total;
    return probs;
}

/**
 * psi = grad_theta log pi^i(s, a_i) = phi^i(s, a_i) - sum_b pi^i(s, b) phi^i(s, b).
 * With one-hot features only the block of state s is nonzero.
 */
inline std::vector<double> score(const ActorParams& actor, StateId s, LocalAction a_i) {
    if (a_i >= actor.n_actions) throw IndexError("local action out of range");
    const std::vector<double> probs = policy_probs(actor, s);
    std::vector<double> psi(actor.dimension(), 0.0);
    for (std::size_t b = 0; b < actor.n_actions; ++b) psi[s * actor.n_actions + b] = (b == a_i ? 1.0 : 0.0) - probs[b];
    return psi;
}

/// Q(s, a; omega) = phi(s, a)^T omega.
inline double q_value(std::span<const double> omega, const FeatureMap& features, StateId s, JointAction a) {
    return features.dot(s, a, omega);
}

/// delta = r - mu + Q(s', a'; omega) - Q(s, a; omega).
constexpr double td_error(double reward, double mu, double q_next, double q_curr) noexcept {
    return reward - mu + q_next - q_curr;
}

/// omega-tilde = omega + step * delta * grad_q. omega itself is left alone.
inline std::vector<double> critic_local_step(std::span<const double> omega, double step, double delta,
                                             std::span<const double> grad_q) {
    if (grad_q.size() != omega.size()) throw DimensionError("critic gradient length mismatch");
    std::vector<double> out(omega.begin(), omega.end());
    const double scale = step * delta;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += scale * grad_q[k];
    return out;
}

/// Same as above with grad_q = phi(s, a), which is the gradient of a linear critic.
inline std::vector<double> critic_local_step(std::span<const double> omega, double step, double delta,
                                             const FeatureMap& features, StateId s, JointAction a) {
    std::vector<double> out(omega.begin(), omega.end());
    features.axpy(s, a, step * delta, out);
    return out;
}

/**
 * Local advantage A^i = Q(s, a) - sum_b pi^i(s, b) Q(s, (b, a^{-i})), holding the
 * other agents' actions in `a` fixed.
 */
inline double advantage(std::span<const double> omega, const ActorParams& actor, const FeatureMap& features,
                        const JointActionCodec& codec, std::size_t agent, StateId s, JointAction a) {
    if (codec.arity(agent) != actor.n_actions) throw DimensionError("actor action count does not match the codec");
    const std::vector<double> probs = policy_probs(actor, s);
    double baseline = 0.0;
    for (LocalAction b = 0; b < actor.n_actions; ++b)
        baseline += probs[b] * q_value(omega, features, s, codec.with_local(a, agent, b));
    return q_value(omega, features, s, a) - baseline;
}

/// theta + step * A * psi.
inline std::vector<double> actor_step(std::span<const double> theta, double step, double adv,
                                      std::span<const double> psi) {
    if (psi.size() != theta.size()) throw DimensionError("score length mismatch");
    std::vector<double> out(theta.begin(), theta.end());
    const double scale = step * adv;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += scale * psi[k];
    return out;
}

/// Running average reward (1 - step) * mu + step * r.
constexpr double mu_update(double mu, double step, double reward) noexcept {
    return (1.0 - step) * mu + step * reward;
}

inline LocalAction select_action(const ActorParams& actor, StateId s, Rng& rng) {
    const std::vector<double> probs = policy_probs(actor, s);
    return sample_categorical(probs, rng);
}

} // namespace resmarl
