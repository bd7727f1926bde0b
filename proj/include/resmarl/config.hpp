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

// Experiment configuration documents (JSON). See docs/config.md for the
// field reference. Parsing validates everything and resolves defaults, so
// `config_to_json(parse_config(text))` is the fully explicit form that gets
// embedded in every run's output.

#include "resmarl/adversary.hpp"
#include "resmarl/engine.hpp"
#include "resmarl/errors.hpp"
#include "resmarl/features.hpp"
#include "resmarl/graph.hpp"
#include "resmarl/mdp.hpp"
#include "resmarl/mdp_io.hpp"
#include "resmarl/schedule.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace resmarl {

struct TopologySpec {
    /// ring | path | star | complete | erdos_renyi | edges
    std::string kind = "ring";
    double p = 0.5;
    std::uint64_t seed = 0;
    std::vector<Edge> edges;
    friend bool operator==(const TopologySpec&, const TopologySpec&) = default;
};

struct GraphConfig {
    /// One entry for a static graph; several for a periodic schedule.
    std::vector<TopologySpec> period;
    bool require_connected = true;
    friend bool operator==(const GraphConfig&, const GraphConfig&) = default;
};

struct MdpConfig {
    /// random | file
    std::string source = "random";
    RandomMdpSpec random;
    std::string path;
    friend bool operator==(const MdpConfig&, const MdpConfig&) = default;
};

struct AdversaryConfig {
    /// Random F-local placement of `count` nodes, unless `ids` is given.
    std::size_t count = 0;
    std::optional<std::vector<NodeId>> ids;
    AdversaryStrategy strategy = ConstantAttack{{0.0}};
    bool enforce_f_local = true;
    std::size_t max_attempts = 10000;
    friend bool operator==(const AdversaryConfig&, const AdversaryConfig&) = default;
};

struct FeatureConfig {
    /// tabular | random_projection
    std::string type = "tabular";
    std::size_t dimension = 0;
    std::uint64_t seed = 0;
    friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::size_t n_agents = 0;
    /// Trimming parameter F.
    std::size_t trim = 0;
    MdpConfig mdp;
    GraphConfig graph;
    AdversaryConfig adversaries;
    FeatureConfig features;
    StepSizeSchedule critic_steps = StepSizeSchedule::critic_default();
    StepSizeSchedule actor_steps = StepSizeSchedule::actor_default();
    EngineOptions engine = [] {
        EngineOptions o;
        o.rounds = 10000;
        return o;
    }();
    std::string output;
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

/// Typed access to one JSON object with dotted-path diagnostics.
class FieldReader {
  public:
    FieldReader(const nlohmann::json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_, "expected an object");
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return node_.contains(key); }

    const nlohmann::json& raw(const std::string& key) const {
        if (!has(key)) throw ConfigError(at(key), "missing required field");
        return node_.at(key);
    }

    template <class T>
    T required(const std::string& key) const {
        return convert<T>(raw(key), at(key));
    }

    template <class T>
    T optional(const std::string& key, T fallback) const {
        return has(key) ? convert<T>(node_.at(key), at(key)) : fallback;
    }

    FieldReader object(const std::string& key) const { return FieldReader(raw(key), at(key)); }

    void allow_only(std::initializer_list<const char*> keys) const {
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& item : node_.items())
            if (!allowed.count(item.key())) throw ConfigError(at(item.key()), "unknown field");
    }

    template <class T>
    static T convert(const nlohmann::json& value, const std::string& path) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!value.is_boolean()) throw ConfigError(path, "expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!value.is_number_integer()) throw ConfigError(path, "expected an integer");
            if (std::is_unsigned_v<T> && value.get<long long>() < 0 && !value.is_number_unsigned())
                throw ConfigError(path, "expected a non-negative integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!value.is_number()) throw ConfigError(path, "expected a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!value.is_string()) throw ConfigError(path, "expected a string");
        }
        try {
            return value.get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(path, std::string("wrong type: ") + e.what());
        }
    }

  private:
    const nlohmann::json& node_;
    std::string path_;
};

inline std::vector<double> number_or_vector(const nlohmann::json& value, const std::string& path) {
    if (value.is_number()) return {value.get<double>()};
    if (value.is_array() && !value.empty() && std::all_of(value.begin(), value.end(), [](const auto& x) {
            return x.is_number();
        }))
        return value.get<std::vector<double>>();
    throw ConfigError(path, "expected a number or a non-empty array of numbers");
}

inline TopologySpec parse_topology(const FieldReader& r, std::size_t n_agents) {
    r.allow_only({"topology", "p", "seed", "edges"});
    TopologySpec t;
    t.kind = r.required<std::string>("topology");
    static const std::set<std::string> kinds{"ring", "path", "star", "complete", "erdos_renyi", "edges"};
    if (!kinds.count(t.kind))
        throw ConfigError(r.at("topology"),
                          "unknown topology '" + t.kind + "' (valid: ring, path, star, complete, erdos_renyi, edges)");
    if (t.kind == "erdos_renyi") {
        t.p = r.required<double>("p");
        if (!(t.p >= 0.0 && t.p <= 1.0)) throw ConfigError(r.at("p"), "must lie in [0, 1]");
        t.seed = r.optional<std::uint64_t>("seed", 0);
    }
    if (t.kind == "edges") {
        const auto& list = r.raw("edges");
        if (!list.is_array()) throw ConfigError(r.at("edges"), "expected an array of [u, v] pairs");
        for (std::size_t k = 0; k < list.size(); ++k) {
            const std::string path = r.at("edges") + "[" + std::to_string(k) + "]";
            const auto& e = list[k];
            auto node_id = [](const nlohmann::json& v) { return v.is_number_integer() && v.get<long long>() >= 0; };
            if (!e.is_array() || e.size() != 2 || !node_id(e[0]) || !node_id(e[1]))
                throw ConfigError(path, "expected a pair of node ids");
            const Edge edge{e[0].get<NodeId>(), e[1].get<NodeId>()};
            if (edge.first >= n_agents || edge.second >= n_agents)
                throw ConfigError(path, "node id out of range for n_agents = " + std::to_string(n_agents));
            if (edge.first == edge.second) throw ConfigError(path, "self-loops are not allowed");
            t.edges.push_back(edge);
        }
    }
    return t;
}

inline StepSizeSchedule parse_schedule(const FieldReader& r, StepSizeSchedule fallback) {
    r.allow_only({"type", "scale", "exponent"});
    const std::string type = r.optional<std::string>("type", "polynomial");
    StepSizeSchedule s;
    if (type == "constant") {
        s = StepSizeSchedule::constant(r.required<double>("scale"));
    } else if (type == "polynomial") {
        s = StepSizeSchedule::polynomial(r.optional<double>("scale", 1.0),
                                         r.optional<double>("exponent", fallback.exponent));
    } else {
        throw ConfigError(r.at("type"), "unknown schedule type '" + type + "' (valid: constant, polynomial)");
    }
    try {
        s.validate();
    } catch (const Error& e) {
        throw ConfigError(r.at("scale"), e.what());
    }
    return s;
}

inline AdversaryStrategy parse_strategy(const FieldReader& r) {
    const std::string type = r.required<std::string>("type");
    if (type == "constant") {
        r.allow_only({"type", "value"});
        return ConstantAttack{number_or_vector(r.raw("value"), r.at("value"))};
    }
    if (type == "drift") {
        r.allow_only({"type", "start", "rate"});
        return DriftAttack{r.has("start") ? number_or_vector(r.raw("start"), r.at("start")) : std::vector<double>{0.0},
                           r.required<double>("rate")};
    }
    if (type == "noise") {
        r.allow_only({"type", "scale", "seed"});
        return NoiseAttack{r.optional<double>("scale", 1.0), r.optional<std::uint64_t>("seed", 0)};
    }
    if (type == "selfish") {
        r.allow_only({"type"});
        return SelfishAttack{};
    }
    std::string valid;
    for (const auto& name : strategy_names()) valid += (valid.empty() ? "" : ", ") + name;
    throw ConfigError(r.at("type"), "unknown adversary strategy '" + type + "' (valid: " + valid + ")");
}

inline nlohmann::json strategy_to_json(const AdversaryStrategy& strategy) {
    return std::visit(
        [](const auto& s) -> nlohmann::json {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, ConstantAttack>)
                return {{"type", "constant"}, {"value", s.value}};
            else if constexpr (std::is_same_v<S, DriftAttack>)
                return {{"type", "drift"}, {"start", s.start}, {"rate", s.rate}};
            else if constexpr (std::is_same_v<S, NoiseAttack>)
                return {{"type", "noise"}, {"scale", s.scale}, {"seed", s.seed}};
            else
                return {{"type", "selfish"}};
        },
        strategy);
}

inline nlohmann::json schedule_to_json(const StepSizeSchedule& s) {
    if (s.kind == StepSizeSchedule::Kind::constant) return {{"type", "constant"}, {"scale", s.scale}};
    return {{"type", "polynomial"}, {"scale", s.scale}, {"exponent", s.exponent}};
}

inline nlohmann::json topology_to_json(const TopologySpec& t) {
    nlohmann::json j{{"topology", t.kind}};
    if (t.kind == "erdos_renyi") {
        j["p"] = t.p;
        j["seed"] = t.seed;
    }
    if (t.kind == "edges") {
        nlohmann::json edges = nlohmann::json::array();
        for (auto [u, v] : t.edges) edges.push_back({u, v});
        j["edges"] = std::move(edges);
    }
    return j;
}

} // namespace detail

inline Graph build_topology(const TopologySpec& t, std::size_t n) {
    if (t.kind == "ring") return Graph::ring(n);
    if (t.kind == "path") return Graph::path(n);
    if (t.kind == "star") return Graph::star(n);
    if (t.kind == "complete") return Graph::complete(n);
    if (t.kind == "erdos_renyi") return Graph::erdos_renyi(n, t.p, t.seed);
    if (t.kind == "edges") return Graph(n, t.edges);
    throw ConfigError("graph.topology", "unknown topology '" + t.kind + "'");
}

/// Graphs of the schedule, without adversary annotation.
inline std::vector<Graph> build_graphs(const ExperimentConfig& config) {
    std::vector<Graph> graphs;
    for (const auto& t : config.graph.period) graphs.push_back(build_topology(t, config.n_agents));
    return graphs;
}

/// Parses and validates a configuration document, resolving every default.
inline ExperimentConfig parse_config(const nlohmann::json& doc) {
    using detail::FieldReader;
    const FieldReader root(doc, "");
    root.allow_only({"seed", "n_agents", "F", "mdp", "graph", "adversaries", "features", "step_sizes", "rounds",
                     "log_interval", "initial_state", "freeze_actor", "freeze_critic", "check_safety", "snapshots",
                     "early_stop", "output"});
    ExperimentConfig c;
    c.seed = root.optional<std::uint64_t>("seed", 0);
    c.n_agents = root.required<std::size_t>("n_agents");
    if (c.n_agents < 1) throw ConfigError("n_agents", "must be >= 1");
    c.trim = root.optional<std::size_t>("F", 0);

    {
        const FieldReader m = root.object("mdp");
        c.mdp.source = m.optional<std::string>("source", "random");
        if (c.mdp.source == "random") {
            m.allow_only({"source", "n_states", "actions_per_agent", "reward_range", "seed", "max_joint_actions",
                          "reward_noise"});
            auto& spec = c.mdp.random;
            spec.n_agents = c.n_agents;
            spec.n_states = m.required<std::size_t>("n_states");
            spec.actions_per_agent = m.optional<std::size_t>("actions_per_agent", 2);
            if (spec.n_states < 2) throw ConfigError(m.at("n_states"), "must be >= 2");
            if (spec.actions_per_agent < 2) throw ConfigError(m.at("actions_per_agent"), "must be >= 2");
            if (m.has("reward_range")) {
                const auto range = m.required<std::vector<double>>("reward_range");
                if (range.size() != 2 || !(range[0] <= range[1]))
                    throw ConfigError(m.at("reward_range"), "expected [low, high] with low <= high");
                spec.reward_low = range[0];
                spec.reward_high = range[1];
            }
            spec.seed = m.optional<std::uint64_t>("seed", c.seed);
            spec.max_joint_actions = m.optional<std::size_t>("max_joint_actions", spec.max_joint_actions);
            spec.reward_noise = m.optional<double>("reward_noise", 0.0);
            if (!(spec.reward_noise >= 0.0)) throw ConfigError(m.at("reward_noise"), "must be >= 0");
            std::size_t joint = 1;
            for (std::size_t i = 0; i < c.n_agents; ++i) {
                joint *= spec.actions_per_agent;
                if (joint > spec.max_joint_actions)
                    throw ConfigError(m.at("actions_per_agent"),
                                      "joint action space exceeds max_joint_actions = " +
                                          std::to_string(spec.max_joint_actions));
            }
        } else if (c.mdp.source == "file") {
            m.allow_only({"source", "path"});
            c.mdp.path = m.required<std::string>("path");
        } else {
            throw ConfigError(m.at("source"), "unknown MDP source '" + c.mdp.source + "' (valid: random, file)");
        }
    }

    {
        const FieldReader g = root.object("graph");
        c.graph.require_connected = g.optional<bool>("require_connected", true);
        if (g.has("schedule")) {
            g.allow_only({"schedule", "require_connected"});
            const auto& list = g.raw("schedule");
            if (!list.is_array() || list.empty()) throw ConfigError(g.at("schedule"), "expected a non-empty array");
            for (std::size_t k = 0; k < list.size(); ++k)
                c.graph.period.push_back(
                    detail::parse_topology(FieldReader(list[k], g.at("schedule") + "[" + std::to_string(k) + "]"),
                                           c.n_agents));
        } else {
            nlohmann::json topo = doc.at("graph");
            topo.erase("require_connected");
            c.graph.period.push_back(detail::parse_topology(FieldReader(topo, "graph"), c.n_agents));
        }
        if (c.graph.require_connected) {
            const auto graphs = build_graphs(c);
            for (std::size_t k = 0; k < graphs.size(); ++k)
                if (!graphs[k].connected())
                    throw ConfigError(graphs.size() == 1 ? "graph" : "graph.schedule[" + std::to_string(k) + "]",
                                      "graph is not connected (set require_connected to false to allow this)");
        }
    }

    if (root.has("adversaries")) {
        const FieldReader a = root.object("adversaries");
        a.allow_only({"count", "ids", "strategy", "enforce_f_local", "max_attempts"});
        if (a.has("ids") && a.has("count")) throw ConfigError(a.at("ids"), "give either ids or count, not both");
        if (a.has("ids")) {
            auto ids = a.required<std::vector<NodeId>>("ids");
            std::sort(ids.begin(), ids.end());
            if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
                throw ConfigError(a.at("ids"), "duplicate adversary id");
            for (NodeId id : ids)
                if (id >= c.n_agents) throw ConfigError(a.at("ids"), "adversary id " + std::to_string(id) + " out of range");
            if (ids.size() >= c.n_agents) throw ConfigError(a.at("ids"), "at least one agent must be regular");
            c.adversaries.count = ids.size();
            c.adversaries.ids = std::move(ids);
        } else {
            c.adversaries.count = a.optional<std::size_t>("count", 0);
            if (c.adversaries.count >= c.n_agents) throw ConfigError(a.at("count"), "must be smaller than n_agents");
        }
        if (c.adversaries.count > 0 || a.has("strategy"))
            c.adversaries.strategy = detail::parse_strategy(a.object("strategy"));
        c.adversaries.enforce_f_local = a.optional<bool>("enforce_f_local", true);
        c.adversaries.max_attempts = a.optional<std::size_t>("max_attempts", 10000);
        if (c.adversaries.ids && c.adversaries.enforce_f_local) {
            const GraphSchedule schedule(build_graphs(c));
            if (!is_r_local(schedule, *c.adversaries.ids, c.trim))
                throw ConfigError(a.at("ids"), "adversary set is not " + std::to_string(c.trim) + "-local");
        }
    }

    if (root.has("features")) {
        const FieldReader f = root.object("features");
        c.features.type = f.optional<std::string>("type", "tabular");
        if (c.features.type == "tabular") {
            f.allow_only({"type"});
        } else if (c.features.type == "random_projection") {
            f.allow_only({"type", "dimension", "seed"});
            c.features.dimension = f.required<std::size_t>("dimension");
            if (c.features.dimension == 0) throw ConfigError(f.at("dimension"), "must be positive");
            c.features.seed = f.optional<std::uint64_t>("seed", c.seed);
        } else {
            throw ConfigError(f.at("type"),
                              "unknown feature type '" + c.features.type + "' (valid: tabular, random_projection)");
        }
    }

    if (root.has("step_sizes")) {
        const FieldReader s = root.object("step_sizes");
        s.allow_only({"critic", "actor"});
        if (s.has("critic")) c.critic_steps = detail::parse_schedule(s.object("critic"), c.critic_steps);
        if (s.has("actor")) c.actor_steps = detail::parse_schedule(s.object("actor"), c.actor_steps);
        if (c.critic_steps.kind == StepSizeSchedule::Kind::polynomial &&
            c.actor_steps.kind == StepSizeSchedule::Kind::polynomial && !two_timescale(c.critic_steps, c.actor_steps))
            throw ConfigError("step_sizes", "critic exponent must be strictly smaller than the actor exponent");
    }

    c.engine.rounds = root.optional<long>("rounds", 10000);
    if (c.engine.rounds < 0) throw ConfigError("rounds", "must be >= 0");
    c.engine.log_interval = root.optional<long>("log_interval", 100);
    if (c.engine.log_interval <= 0) throw ConfigError("log_interval", "must be positive");
    c.engine.initial_state = root.optional<std::size_t>("initial_state", 0);
    if (c.mdp.source == "random" && c.engine.initial_state >= c.mdp.random.n_states)
        throw ConfigError("initial_state", "out of range");
    c.engine.freeze_actor = root.optional<bool>("freeze_actor", false);
    c.engine.freeze_critic = root.optional<bool>("freeze_critic", false);
    c.engine.check_safety = root.optional<bool>("check_safety", true);
    c.engine.snapshots = root.optional<bool>("snapshots", false);
    if (root.has("early_stop")) {
        const FieldReader e = root.object("early_stop");
        e.allow_only({"enabled", "disagreement", "actor_update", "patience"});
        auto& es = c.engine.early_stop;
        es.enabled = e.optional<bool>("enabled", true);
        es.disagreement = e.optional<double>("disagreement", es.disagreement);
        es.actor_update = e.optional<double>("actor_update", es.actor_update);
        es.patience = e.optional<long>("patience", es.patience);
        if (es.patience <= 0) throw ConfigError(e.at("patience"), "must be positive");
    }
    c.output = root.optional<std::string>("output", "");
    return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

/// Fully explicit document for a config; parse_config inverts it exactly.
inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["seed"] = c.seed;
    j["n_agents"] = c.n_agents;
    j["F"] = c.trim;
    if (c.mdp.source == "random") {
        const auto& s = c.mdp.random;
        j["mdp"] = {{"source", "random"},
                    {"n_states", s.n_states},
                    {"actions_per_agent", s.actions_per_agent},
                    {"reward_range", {s.reward_low, s.reward_high}},
                    {"seed", s.seed},
                    {"max_joint_actions", s.max_joint_actions},
                    {"reward_noise", s.reward_noise}};
    } else {
        j["mdp"] = {{"source", "file"}, {"path", c.mdp.path}};
    }
    nlohmann::json graph;
    if (c.graph.period.size() == 1) {
        graph = detail::topology_to_json(c.graph.period.front());
    } else {
        graph["schedule"] = nlohmann::json::array();
        for (const auto& t : c.graph.period) graph["schedule"].push_back(detail::topology_to_json(t));
    }
    graph["require_connected"] = c.graph.require_connected;
    j["graph"] = std::move(graph);
    nlohmann::json adv{{"strategy", detail::strategy_to_json(c.adversaries.strategy)},
                       {"enforce_f_local", c.adversaries.enforce_f_local},
                       {"max_attempts", c.adversaries.max_attempts}};
    if (c.adversaries.ids)
        adv["ids"] = *c.adversaries.ids;
    else
        adv["count"] = c.adversaries.count;
    j["adversaries"] = std::move(adv);
    if (c.features.type == "tabular")
        j["features"] = {{"type", "tabular"}};
    else
        j["features"] = {{"type", c.features.type}, {"dimension", c.features.dimension}, {"seed", c.features.seed}};
    j["step_sizes"] = {{"critic", detail::schedule_to_json(c.critic_steps)},
                       {"actor", detail::schedule_to_json(c.actor_steps)}};
    j["rounds"] = c.engine.rounds;
    j["log_interval"] = c.engine.log_interval;
    j["initial_state"] = c.engine.initial_state;
    j["freeze_actor"] = c.engine.freeze_actor;
    j["freeze_critic"] = c.engine.freeze_critic;
    j["check_safety"] = c.engine.check_safety;
    j["snapshots"] = c.engine.snapshots;
    const auto& es = c.engine.early_stop;
    j["early_stop"] = {{"enabled", es.enabled},
                       {"disagreement", es.disagreement},
                       {"actor_update", es.actor_update},
                       {"patience", es.patience}};
    j["output"] = c.output;
    return j;
}

/// FNV-1a of the canonical document, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& c) {
    const std::string text = config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/**
 * Adversary set of a config: the explicit ids, or a random placement of
 * `count` nodes drawn from the master seed (F-local unless
 * `enforce_f_local` is off). Throws PlacementError when no F-local placement
 * is found.
 */
inline std::vector<NodeId> resolve_adversaries(const ExperimentConfig& c, const GraphSchedule& unannotated) {
    if (c.adversaries.ids) return *c.adversaries.ids;
    if (c.adversaries.count == 0) return {};
    Rng rng(derive_seed(c.seed, 0x706c616365));
    if (c.adversaries.enforce_f_local)
        return place_adversaries(unannotated, c.adversaries.count, c.trim, rng, c.adversaries.max_attempts);
    return place_adversaries(unannotated, c.adversaries.count, c.n_agents, rng, 1);
}

/// Graph schedule with the adversary set and F attached.
inline GraphSchedule build_schedule(const ExperimentConfig& c) {
    GraphSchedule schedule(build_graphs(c), {}, c.trim);
    return schedule.with_adversaries(resolve_adversaries(c, schedule));
}

/**
 * Builds the runnable experiment: generates or loads the MDP, builds the
 * graph schedule, places adversaries (random placements draw from the
 * master seed) and constructs the feature map. `base_dir` resolves relative
 * MDP file paths.
 */
inline Experiment materialize(const ExperimentConfig& c, const std::filesystem::path& base_dir = {}) {
    std::optional<Mdp> mdp;
    if (c.mdp.source == "random") {
        try {
            mdp = generate_random_mdp(c.mdp.random);
        } catch (const Error& e) {
            throw ConfigError("mdp", e.what());
        }
    } else {
        std::filesystem::path p(c.mdp.path);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        try {
            mdp = load_mdp(p.string());
        } catch (const Error& e) {
            throw ConfigError("mdp.path", e.what());
        }
        if (mdp->n_agents() != c.n_agents)
            throw ConfigError("mdp.path", "MDP file has " + std::to_string(mdp->n_agents()) + " agents but n_agents = " +
                                              std::to_string(c.n_agents));
        if (c.engine.initial_state >= mdp->n_states()) throw ConfigError("initial_state", "out of range");
    }

    GraphSchedule schedule = build_schedule(c);

    FeatureMap features = c.features.type == "tabular"
                              ? FeatureMap::tabular(mdp->n_states(), mdp->n_joint_actions())
                              : FeatureMap::random_projection(mdp->n_states(), mdp->n_joint_actions(),
                                                              c.features.dimension, c.features.seed);
    return Experiment{std::move(*mdp), std::move(schedule), std::move(features), c.critic_steps, c.actor_steps,
                      c.adversaries.strategy, c.engine};
}

/// Materializes and runs a config; the log header embeds the resolved config.
inline RunResult run(const ExperimentConfig& c, const std::filesystem::path& base_dir = {}) {
    RunMetadata meta;
    meta.config_hash = config_hash(c);
    meta.config = config_to_json(c);
    return run(materialize(c, base_dir), c.seed, std::move(meta));
}

} // namespace resmarl
