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

// MDP files: a JSON document
//
//   {
//     "format": "resmarl-mdp",
//     "version": 1,
//     "n_states": S,
//     "action_counts": [|A^0|, ..., |A^{N-1}|],
//     "transition": [ S * J * S numbers, index (s * J + a) * S + s' ],
//     "rewards":    [ N * S * J numbers, index (i * S + s) * J + a ],
//     "reward_noise": 0.0
//   }
//
// with J = prod_i |A^i| and joint actions encoded agent 0 least significant.
// Doubles are written with round-trip precision.

#include "resmarl/errors.hpp"
#include "resmarl/mdp.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <string>

namespace resmarl {

inline nlohmann::json mdp_to_json(const Mdp& mdp) {
    return {{"format", "resmarl-mdp"},
            {"version", 1},
            {"n_states", mdp.n_states()},
            {"action_counts", mdp.codec().arities()},
            {"transition", mdp.transition_table()},
            {"rewards", mdp.reward_table()},
            {"reward_noise", mdp.reward_noise()}};
}

inline Mdp mdp_from_json(const nlohmann::json& j) {
    try {
        if (j.value("format", std::string{}) != "resmarl-mdp") throw Error("not an MDP document (format field)");
        if (j.value("version", 0) != 1) throw Error("unsupported MDP document version");
        return Mdp(j.at("action_counts").get<std::vector<std::size_t>>(), j.at("n_states").get<std::size_t>(),
                   j.at("transition").get<std::vector<double>>(), j.at("rewards").get<std::vector<double>>(),
                   j.value("reward_noise", 0.0));
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed MDP document: ") + e.what());
    }
}

inline void save_mdp(const Mdp& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write MDP file " + path);
    out << mdp_to_json(mdp).dump(1) << '\n';
}

inline Mdp load_mdp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read MDP file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("MDP file " + path + " is not valid JSON: " + e.what());
    }
    return mdp_from_json(j);
}

} // namespace resmarl
