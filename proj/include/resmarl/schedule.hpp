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

#include <cmath>

namespace resmarl {

/// beta_t = scale (constant) or scale / (t + 1)^exponent (polynomial).
struct StepSizeSchedule {
    enum class Kind { constant, polynomial };

    Kind kind = Kind::polynomial;
    double scale = 1.0;
    double exponent = 0.65;

    static StepSizeSchedule constant(double c) { return {Kind::constant, c, 0.0}; }
    static StepSizeSchedule polynomial(double c, double exponent) { return {Kind::polynomial, c, exponent}; }

    /// Critic default: 1 / (t + 1)^0.65.
    static StepSizeSchedule critic_default() { return polynomial(1.0, 0.65); }
    /// Actor default: 1 / (t + 1)^0.85, slower than the critic.
    static StepSizeSchedule actor_default() { return polynomial(1.0, 0.85); }

    void validate() const {
        if (!(scale > 0.0) || !std::isfinite(scale)) throw Error("step-size scale must be positive and finite");
        if (kind == Kind::polynomial && (!(exponent >= 0.0) || !std::isfinite(exponent)))
            throw Error("step-size exponent must be non-negative");
    }

    friend bool operator==(const StepSizeSchedule&, const StepSizeSchedule&) = default;
};

inline double step_size(const StepSizeSchedule& schedule, long round) {
    if (round < 0) throw Error("round must be non-negative");
    if (schedule.kind == StepSizeSchedule::Kind::constant) return schedule.scale;
    return schedule.scale / std::pow(static_cast<double>(round) + 1.0, schedule.exponent);
}

/// Critic must run on the faster timescale: its exponent strictly below the actor's.
inline bool two_timescale(const StepSizeSchedule& critic, const StepSizeSchedule& actor) {
    if (critic.kind != StepSizeSchedule::Kind::polynomial || actor.kind != StepSizeSchedule::Kind::polynomial)
        return false;
    return critic.exponent < actor.exponent;
}

} // namespace resmarl
