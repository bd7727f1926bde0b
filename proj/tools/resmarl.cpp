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

#include "resmarl/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr const char* kOutputRootEnv = "RESMARL_OUTPUT_ROOT";

resmarl::fs::path default_output(const std::string& config_output, const std::string& hash) {
    if (!config_output.empty()) return config_output;
    const char* root = std::getenv(kOutputRootEnv);
    return resmarl::fs::path(root != nullptr && *root != '\0' ? root : "runs") / hash;
}

resmarl::ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(resmarl::read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw resmarl::ConfigError("", path + " is not valid JSON: " + e.what());
    }
    if (seed) doc["seed"] = *seed;
    return resmarl::parse_config(doc);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decentralized actor-critic with trimmed consensus"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::size_t jobs = 1;
    bool quiet = false;
    bool as_json = false;

    auto* run_cmd = app.add_subcommand("run", "Run one experiment");
    run_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--seed", seed, "Override the master seed");
    run_cmd->add_option("--out", out, std::string("Output directory (default: config output, else $") +
                                          kOutputRootEnv + "/<config hash>)");
    run_cmd->add_flag("--quiet", quiet, "Print nothing on success");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run a list of config overrides");
    sweep_cmd->add_option("--config", config_path, "Sweep document {base, runs}")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--seed", seed, "Override the base seed");
    sweep_cmd->add_option("--out", out, "Output directory");
    sweep_cmd->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
    sweep_cmd->add_flag("--quiet", quiet, "Print nothing on success");

    auto* graph_cmd = app.add_subcommand("check-graph", "Graph and adversary-placement diagnostics");
    graph_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    graph_cmd->add_option("--seed", seed, "Override the master seed (affects random placement)");
    graph_cmd->add_flag("--json", as_json, "Print the report as JSON");

    CLI11_PARSE(app, argc, argv);

    const resmarl::fs::path base_dir = resmarl::fs::path(config_path).parent_path();
    try {
        if (*run_cmd) {
            const auto config = load_config(config_path, seed);
            const auto dir = out.empty() ? default_output(config.output, resmarl::config_hash(config))
                                         : resmarl::fs::path(out);
            const auto artifacts = resmarl::run_experiment(config, dir, base_dir);
            if (!quiet) std::cout << artifacts.summary.dump(2) << "\nwrote " << dir.string() << "\n";
        } else if (*sweep_cmd) {
            nlohmann::json doc;
            try {
                doc = nlohmann::json::parse(resmarl::read_text_file(config_path));
            } catch (const nlohmann::json::parse_error& e) {
                throw resmarl::ConfigError("", config_path + " is not valid JSON: " + e.what());
            }
            if (seed && doc.contains("base")) doc["base"]["seed"] = *seed;
            const auto dir = out.empty() ? default_output("", "sweep") : resmarl::fs::path(out);
            const auto summaries = resmarl::run_sweep(doc, dir, jobs, base_dir);
            if (!quiet) {
                for (std::size_t k = 0; k < summaries.size(); ++k)
                    std::cout << "run " << k << ": " << summaries[k].dump() << "\n";
                std::cout << "wrote " << dir.string() << "\n";
            }
        } else if (*graph_cmd) {
            const auto config = load_config(config_path, seed);
            const auto report = resmarl::check_graph(config);
            if (as_json)
                std::cout << resmarl::to_json(report).dump(2) << "\n";
            else
                std::cout << resmarl::format_report(report);
        }
    } catch (const resmarl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const resmarl::PlacementError& e) {
        std::cerr << "placement error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
