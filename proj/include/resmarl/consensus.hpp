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

// Trimmed (W-MSR style) consensus on critic parameters and the messages
// adversarial agents send instead of their honest values.

#include "resmarl/adversary.hpp"
#include "resmarl/agent.hpp"
#include "resmarl/errors.hpp"
#include "resmarl/graph.hpp"
#include "resmarl/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace resmarl {

struct ParameterMessage {
    NodeId sender = 0;
    std::vector<double> payload;
    /// Sender's degree in the round's graph; needed for Metropolis weights.
    std::size_t sender_degree = 0;
};

/**
 * Per-coordinate survival mask of a trim: `kept(k, m)` tells whether message
 * m contributes at coordinate k.
 */
class TrimResult {
  public:
    TrimResult(std::size_t dimension, std::size_t n_messages, bool initial)
        : dimension_(dimension), n_messages_(n_messages), mask_(dimension * n_messages, initial ? 1 : 0) {}

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t n_messages() const noexcept { return n_messages_; }
    bool kept(std::size_t coordinate, std::size_t message) const { return mask_[coordinate * n_messages_ + message]; }
    void set(std::size_t coordinate, std::size_t message, bool keep) {
        mask_[coordinate * n_messages_ + message] = keep ? 1 : 0;
    }

    /// Values retained at one coordinate, in message order.
    std::vector<double> retained_values(std::size_t coordinate, std::span<const ParameterMessage> msgs) const {
        std::vector<double> out;
        for (std::size_t m = 0; m < n_messages_; ++m)
            if (kept(coordinate, m)) out.push_back(msgs[m].payload[coordinate]);
        return out;
    }

    /// Number of coordinates at which message m was discarded.
    std::size_t trimmed_count(std::size_t message) const {
        std::size_t count = 0;
        for (std::size_t k = 0; k < dimension_; ++k) count += kept(k, message) ? 0 : 1;
        return count;
    }

  private:
    std::size_t dimension_;
    std::size_t n_messages_;
    std::vector<char> mask_;
};

/**
 * Coordinate-wise trim: at every coordinate, drop the F largest and F
 * smallest neighbor values (ties broken by sender id, ascending). With
 * 2F or fewer messages nothing survives. `own` is never trimmed and only
 * fixes the dimension.
 */
inline TrimResult trim(std::span<const double> own, std::span<const ParameterMessage> msgs, std::size_t f) {
    const std::size_t dim = own.size();
    const std::size_t m = msgs.size();
    for (const auto& msg : msgs)
        if (msg.payload.size() != dim) throw DimensionError("message payload length does not match own parameters");
    if (f == 0) return TrimResult(dim, m, true);
    TrimResult result(dim, m, false);
    if (m <= 2 * f) return result;
    std::vector<std::size_t> order(m);
    for (std::size_t k = 0; k < dim; ++k) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            const double vx = msgs[x].payload[k];
            const double vy = msgs[y].payload[k];
            if (vx != vy) return vx < vy;
            return msgs[x].sender < msgs[y].sender;
        });
        for (std::size_t pos = f; pos < m - f; ++pos) result.set(k, order[pos], true);
    }
    return result;
}

/**
 * Weighted combination of one coordinate: self_weight * own + sum w_j v_j.
 * Throws WeightNormalizationError unless the weights are non-negative and
 * sum to 1 within 1e-9.
 */
inline double consensus_combine(double own, std::span<const double> values, std::span<const double> weights,
                                double self_weight) {
    if (values.size() != weights.size()) throw DimensionError("one weight per retained value required");
    double total = self_weight;
    double out = self_weight * own;
    bool negative = self_weight < 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        negative = negative || weights[j] < 0.0;
        total += weights[j];
        out += weights[j] * values[j];
    }
    if (negative || std::abs(total - 1.0) > 1e-9)
        throw WeightNormalizationError("consensus weights sum to " + std::to_string(total) +
                                       (negative ? " with a negative entry" : ""));
    return out;
}

/**
 * Consensus step for one agent after trimming. At each coordinate the
 * survivors get their Metropolis pair weight 1/(1 + max(k_i, k_j)) and the own
 * value gets the remaining mass, which is at least 1/(1 + k_i) whenever no
 * more than k_i messages arrived.
 */
inline std::vector<double> consensus_combine(std::span<const double> own, std::span<const ParameterMessage> msgs,
                                             const TrimResult& kept, std::size_t own_degree) {
    const std::size_t dim = own.size();
    if (kept.dimension() != dim || kept.n_messages() != msgs.size())
        throw DimensionError("trim result does not match the messages");
    if (msgs.size() > own_degree)
        throw WeightNormalizationError("received " + std::to_string(msgs.size()) + " messages but degree is " +
                                       std::to_string(own_degree));
    std::vector<double> pair(msgs.size());
    for (std::size_t m = 0; m < msgs.size(); ++m) pair[m] = metropolis_weight(own_degree, msgs[m].sender_degree);

    std::vector<double> out(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        double neighbor_mass = 0.0;
        for (std::size_t m = 0; m < msgs.size(); ++m)
            if (kept.kept(k, m)) neighbor_mass += pair[m];
        const double self_weight = 1.0 - neighbor_mass;
        double value = self_weight * own[k];
        for (std::size_t m = 0; m < msgs.size(); ++m)
            if (kept.kept(k, m)) value += pair[m] * msgs[m].payload[k];
        out[k] = value;
    }
    return out;
}

/**
 * First coordinate at which `combined` leaves [min, max] of {own} ∪ retained
 * values, with a relative slack for rounding. Empty when the step is safe.
 */
inline std::optional<std::size_t> hull_violation(std::span<const double> own, std::span<const ParameterMessage> msgs,
                                                 const TrimResult& kept, std::span<const double> combined) {
    for (std::size_t k = 0; k < own.size(); ++k) {
        double lo = own[k];
        double hi = own[k];
        for (std::size_t m = 0; m < msgs.size(); ++m)
            if (kept.kept(k, m)) {
                lo = std::min(lo, msgs[m].payload[k]);
                hi = std::max(hi, msgs[m].payload[k]);
            }
        const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
        if (combined[k] < lo - slack || combined[k] > hi + slack) return k;
    }
    return std::nullopt;
}

/// Payload an adversarial agent broadcasts at round t.
inline std::vector<double> adversary_message(const AdversaryStrategy& strategy, const AgentState& self, long round) {
    const std::size_t dim = self.critic.omega.size();
    auto broadcast = [dim](const std::vector<double>& v) {
        if (v.size() == 1) return std::vector<double>(dim, v.front());
        if (v.size() != dim) throw DimensionError("adversary vector length does not match the critic dimension");
        return v;
    };
    const double t = static_cast<double>(round);
    return std::visit(
        [&](const auto& s) -> std::vector<double> {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, ConstantAttack>) {
                return broadcast(s.value);
            } else if constexpr (std::is_same_v<S, DriftAttack>) {
                std::vector<double> out = broadcast(s.start);
                for (double& x : out) x += s.rate * t;
                return out;
            } else if constexpr (std::is_same_v<S, NoiseAttack>) {
                Rng rng(derive_seed(derive_seed(s.seed, self.id), static_cast<std::uint64_t>(round)));
                std::normal_distribution<double> normal(0.0, 1.0);
                std::vector<double> out(dim);
                for (double& x : out) x = s.scale * normal(rng);
                return out;
            } else {
                return self.critic.omega_tilde;
            }
        },
        strategy);
}

} // namespace resmarl
