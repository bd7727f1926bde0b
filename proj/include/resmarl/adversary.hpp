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

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace resmarl {

/// Broadcast the same vector every round. A single-element vector is
/// broadcast to every coordinate.
struct ConstantAttack {
    std::vector<double> value;
    friend bool operator==(const ConstantAttack&, const ConstantAttack&) = default;
};

/// Broadcast start + rate * t in every coordinate.
struct DriftAttack {
    std::vector<double> start;
    double rate = 0.0;
    friend bool operator==(const DriftAttack&, const DriftAttack&) = default;
};

/// Broadcast i.i.d. N(0, scale^2) draws, reproducible from (seed, sender, t).
struct NoiseAttack {
    double scale = 1.0;
    std::uint64_t seed = 0;
    friend bool operator==(const NoiseAttack&, const NoiseAttack&) = default;
};

/// Learns from its own reward but never trims and never mixes others' values;
/// broadcasts its own post-critic-step vector.
struct SelfishAttack {
    friend bool operator==(const SelfishAttack&, const SelfishAttack&) = default;
};

using AdversaryStrategy = std::variant<ConstantAttack, DriftAttack, NoiseAttack, SelfishAttack>;

inline const char* strategy_name(const AdversaryStrategy& strategy) {
    constexpr const char* names[] = {"constant", "drift", "noise", "selfish"};
    return names[strategy.index()];
}

inline const std::vector<std::string>& strategy_names() {
    static const std::vector<std::string> names{"constant", "drift", "noise", "selfish"};
    return names;
}

} // namespace resmarl
