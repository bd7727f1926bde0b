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

// Entry points behind the `resmarl` command: run one experiment, run a sweep,
// and graph diagnostics. Kept in the library so they are testable without
// spawning processes.

#include "resmarl/config.hpp"
#include "resmarl/engine.hpp"
#include "resmarl/graph.hpp"
#include "resmarl/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace resmarl {

namespace fs = std::filesystem;

inline std::string read_text_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

/// Summary record written next to every run.
inline nlohmann::json summary_record(const ExperimentConfig& config, const Experiment& experiment,
                                     const RunResult& result) {
    const MetricsRow& last = result.log.rows.back();
    return {{"config_hash", result.log.metadata.config_hash},
            {"seed", config.seed},
            {"rounds_executed", result.rounds_executed},
            {"early_stopped", result.early_stopped},
            {"adversaries", experiment.graph.adversaries()},
            {"final_j_oracle", last.j_oracle},
            {"initial_j_oracle", result.log.rows.front().j_oracle},
            {"final_disagreement", last.disagreement}};
}

inline nlohmann::json final_params_record(const RunResult& result) {
    nlohmann::json agents = nlohmann::json::array();
    for (const auto& a : result.final_agents) {
        nlohmann::json j{{"id", a.id},
                         {"role", a.regular() ? "regular" : "adversarial"},
                         {"mu", a.mu},
                         {"theta", a.actor.theta},
                         {"omega", a.critic.omega},
                         {"omega_tilde", a.critic.omega_tilde}};
        if (a.adversary) j["strategy"] = detail::strategy_to_json(*a.adversary);
        agents.push_back(std::move(j));
    }
    return {{"round", result.rounds_executed}, {"agents", std::move(agents)}};
}

struct RunArtifacts {
    fs::path directory;
    nlohmann::json summary;
};

/**
 * Runs one experiment and writes into `out_dir`:
 *   config.json        fully resolved configuration
 *   trajectory.jsonl   header record + one metrics record per logged round
 *   final_params.json  theta / omega / mu of every agent at the end
 *   summary.json       final J, disagreement, rounds executed
 *   run_info.json      wall-clock timing (the only non-deterministic file)
 */
inline RunArtifacts run_experiment(const ExperimentConfig& config, const fs::path& out_dir,
                                   const fs::path& base_dir = {}) {
    const auto started = std::chrono::system_clock::now();
    const Experiment experiment = materialize(config, base_dir);
    RunMetadata meta;
    meta.config_hash = config_hash(config);
    meta.config = config_to_json(config);
    const RunResult result = run(experiment, config.seed, meta);
    const auto finished = std::chrono::system_clock::now();

    fs::create_directories(out_dir);
    write_text_file(out_dir / "config.json", meta.config.dump(2) + "\n");
    write_text_file(out_dir / "trajectory.jsonl", to_jsonl(result.log));
    write_text_file(out_dir / "final_params.json", final_params_record(result).dump(1) + "\n");
    const nlohmann::json summary = summary_record(config, experiment, result);
    write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");

    auto stamp = [](std::chrono::system_clock::time_point tp) {
        const std::time_t t = std::chrono::system_clock::to_time_t(tp);
        std::tm tm{};
        gmtime_r(&t, &tm);
        std::ostringstream out;
        out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
        return out.str();
    };
    const double seconds = std::chrono::duration<double>(finished - started).count();
    write_text_file(out_dir / "run_info.json",
                    nlohmann::json{{"started_at", stamp(started)}, {"finished_at", stamp(finished)}, {"seconds", seconds}}
                            .dump(2) +
                        "\n");
    return {out_dir, summary};
}

/**
 * Sweep document: `{"base": <config>, "runs": [<override>, ...]}`. Each
 * override is merged into the base as a JSON merge patch; run k gets seed
 * `base.seed + k` and writes to `out_dir/run_<k>`. Runs execute on up to
 * `jobs` threads. Returns the per-run summaries in run order.
 */
inline std::vector<nlohmann::json> run_sweep(const nlohmann::json& sweep, const fs::path& out_dir, std::size_t jobs,
                                             const fs::path& base_dir = {}) {
    if (!sweep.is_object() || !sweep.contains("base") || !sweep.contains("runs") || !sweep["runs"].is_array())
        throw ConfigError("", "a sweep document needs 'base' (object) and 'runs' (array)");
    const std::size_t n = sweep["runs"].size();
    const std::uint64_t master = parse_config(sweep["base"]).seed;
    std::vector<ExperimentConfig> configs;
    for (std::size_t k = 0; k < n; ++k) {
        nlohmann::json doc = sweep["base"];
        doc.merge_patch(sweep["runs"][k]);
        doc["seed"] = master + k;
        try {
            configs.push_back(parse_config(doc));
        } catch (const ConfigError& e) {
            throw ConfigError("runs[" + std::to_string(k) + "]" + (e.path().empty() ? "" : "." + e.path()),
                              std::string(e.what()).substr(e.path().empty() ? 0 : e.path().size() + 2));
        }
    }

    std::vector<nlohmann::json> summaries(n);
    std::vector<std::string> failures(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            std::ostringstream name;
            name << "run_" << std::setw(3) << std::setfill('0') << k;
            try {
                summaries[k] = run_experiment(configs[k], out_dir / name.str(), base_dir).summary;
            } catch (const std::exception& e) {
                failures[k] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::max<std::size_t>(1, std::min(jobs, n)); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    fs::create_directories(out_dir);
    std::ostringstream lines;
    for (std::size_t k = 0; k < n; ++k) {
        nlohmann::json rec{{"run", k}};
        if (failures[k].empty())
            rec["summary"] = summaries[k];
        else
            rec["error"] = failures[k];
        lines << rec.dump() << '\n';
    }
    write_text_file(out_dir / "sweep_summary.jsonl", lines.str());
    for (std::size_t k = 0; k < n; ++k)
        if (!failures[k].empty()) throw Error("sweep run " + std::to_string(k) + " failed: " + failures[k]);
    return summaries;
}

/// Diagnostics for one graph of a schedule.
struct GraphDiagnostics {
    bool connected = false;
    std::vector<std::size_t> degrees;
    /// robust[r - 1] = is_r_robust(r) for r = 1 .. ceil(n / 2); empty when skipped.
    std::vector<bool> robust;
    bool robustness_skipped = false;
};

struct GraphReport {
    std::size_t n_nodes = 0;
    std::size_t trim = 0;
    std::vector<GraphDiagnostics> graphs;
    std::vector<NodeId> adversaries;
    bool f_local = true;
    /// Per node, share of adversarial neighbors (max over the schedule).
    std::vector<double> adversary_fraction;
    std::vector<std::string> warnings;
};

inline GraphReport check_graph(const ExperimentConfig& config, std::size_t robustness_cap = 16) {
    GraphReport report;
    report.n_nodes = config.n_agents;
    report.trim = config.trim;
    const GraphSchedule bare(build_graphs(config), {}, config.trim);
    for (std::size_t k = 0; k < bare.period_length(); ++k) {
        const Graph& g = bare.period()[k];
        GraphDiagnostics d;
        d.connected = g.connected();
        for (NodeId i = 0; i < g.n_nodes(); ++i) d.degrees.push_back(g.degree(i));
        const std::string label = bare.period_length() == 1 ? "graph" : "graph " + std::to_string(k);
        if (!d.connected) report.warnings.push_back("WARNING: " + label + " is not connected");
        if (g.n_nodes() > robustness_cap) {
            d.robustness_skipped = true;
            report.warnings.push_back(label + ": r-robustness skipped (more than " + std::to_string(robustness_cap) +
                                      " nodes)");
        } else {
            for (std::size_t r = 1; r <= (g.n_nodes() + 1) / 2; ++r) d.robust.push_back(is_r_robust(g, r, robustness_cap));
        }
        report.graphs.push_back(std::move(d));
    }
    try {
        report.adversaries = resolve_adversaries(config, bare);
    } catch (const PlacementError& e) {
        report.warnings.push_back(std::string("adversary placement failed: ") + e.what());
        report.f_local = false;
        return report;
    }
    const GraphSchedule annotated = bare.with_adversaries(report.adversaries);
    report.f_local = is_r_local(annotated, report.adversaries, config.trim);
    report.adversary_fraction = adversary_fraction(annotated);
    if (!report.f_local)
        report.warnings.push_back("adversary set is not " + std::to_string(config.trim) + "-local");
    return report;
}

inline nlohmann::json to_json(const GraphReport& report) {
    nlohmann::json graphs = nlohmann::json::array();
    for (const auto& d : report.graphs) {
        nlohmann::json g{{"connected", d.connected}, {"degrees", d.degrees}};
        if (!d.degrees.empty()) {
            g["min_degree"] = *std::min_element(d.degrees.begin(), d.degrees.end());
            g["max_degree"] = *std::max_element(d.degrees.begin(), d.degrees.end());
        }
        if (d.robustness_skipped) {
            g["robustness"] = nullptr;
        } else {
            nlohmann::json robust = nlohmann::json::object();
            for (std::size_t r = 0; r < d.robust.size(); ++r) robust[std::to_string(r + 1)] = static_cast<bool>(d.robust[r]);
            g["robustness"] = std::move(robust);
        }
        graphs.push_back(std::move(g));
    }
    return {{"n_nodes", report.n_nodes},
            {"F", report.trim},
            {"graphs", std::move(graphs)},
            {"adversaries", report.adversaries},
            {"f_local", report.f_local},
            {"adversary_fraction", report.adversary_fraction},
            {"warnings", report.warnings}};
}

/// Human-readable report, one fact per line.
inline std::string format_report(const GraphReport& report) {
    std::ostringstream out;
    out << "nodes: " << report.n_nodes << "\n";
    for (std::size_t k = 0; k < report.graphs.size(); ++k) {
        const auto& d = report.graphs[k];
        const std::string prefix = report.graphs.size() == 1 ? "" : "graph " + std::to_string(k) + " ";
        out << prefix << "connectivity: " << (d.connected ? "true" : "false") << "\n";
        out << prefix << "degrees:";
        for (auto deg : d.degrees) out << ' ' << deg;
        out << "\n";
        for (std::size_t r = 0; r < d.robust.size(); ++r)
            out << prefix << (r + 1) << "-robust: " << (d.robust[r] ? "true" : "false") << "\n";
    }
    out << "adversaries:";
    for (auto a : report.adversaries) out << ' ' << a;
    out << "\n";
    out << "F-local: " << (report.f_local ? "true" : "false") << " (F = " << report.trim << ")\n";
    if (!report.adversary_fraction.empty()) {
        out << "adversary fraction g:";
        for (double g : report.adversary_fraction) out << ' ' << g;
        out << "\n";
    }
    for (const auto& w : report.warnings) out << w << "\n";
    return out.str();
}

} // namespace resmarl
