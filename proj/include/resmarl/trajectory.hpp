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

#include <nlohmann/json.hpp>

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace resmarl {

inline constexpr int kTrajectoryFormatVersion = 1;

/// How often regular agent `agent` discarded sender `sender` (counted per
/// coordinate) over one logging window.
struct TrimTally {
    std::size_t agent = 0;
    std::size_t sender = 0;
    std::uint64_t coordinates = 0;
    friend bool operator==(const TrimTally&, const TrimTally&) = default;
};

struct ParameterSnapshot {
    std::vector<std::vector<double>> theta;
    std::vector<std::vector<double>> omega;
    friend bool operator==(const ParameterSnapshot&, const ParameterSnapshot&) = default;
};

struct MetricsRow {
    long round = 0;
    /// Exact long-run globally averaged reward of the current joint policy.
    double j_oracle = 0.0;
    /// Mean of the globally averaged observed reward since the previous row
    /// (0 for the initial row).
    double avg_reward_window = 0.0;
    /// max over regular pairs of ||omega^i - omega^j||_inf.
    double disagreement = 0.0;
    std::vector<double> mu;
    std::vector<TrimTally> trimmed;
    std::optional<ParameterSnapshot> snapshot;
    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

struct RunMetadata {
    std::string config_hash;
    std::uint64_t seed = 0;
    /// Fully resolved configuration the run was produced from.
    nlohmann::json config = nlohmann::json::object();
    friend bool operator==(const RunMetadata&, const RunMetadata&) = default;
};

struct TrajectoryLog {
    RunMetadata metadata;
    std::vector<MetricsRow> rows;

    void append(MetricsRow row) {
        if (!rows.empty() && row.round <= rows.back().round)
            throw Error("trajectory rounds must be strictly increasing");
        rows.push_back(std::move(row));
    }

    friend bool operator==(const TrajectoryLog&, const TrajectoryLog&) = default;
};

inline nlohmann::json to_json(const MetricsRow& row) {
    nlohmann::json j;
    j["record"] = "metrics";
    j["round"] = row.round;
    j["j_oracle"] = row.j_oracle;
    j["avg_reward_window"] = row.avg_reward_window;
    j["disagreement"] = row.disagreement;
    j["mu"] = row.mu;
    nlohmann::json trims = nlohmann::json::array();
    for (const auto& t : row.trimmed) trims.push_back({t.agent, t.sender, t.coordinates});
    j["trimmed"] = std::move(trims);
    if (row.snapshot) j["snapshot"] = {{"theta", row.snapshot->theta}, {"omega", row.snapshot->omega}};
    return j;
}

inline MetricsRow metrics_row_from_json(const nlohmann::json& j) {
    MetricsRow row;
    row.round = j.at("round").get<long>();
    row.j_oracle = j.at("j_oracle").get<double>();
    row.avg_reward_window = j.at("avg_reward_window").get<double>();
    row.disagreement = j.at("disagreement").get<double>();
    row.mu = j.at("mu").get<std::vector<double>>();
    for (const auto& t : j.at("trimmed"))
        row.trimmed.push_back({t.at(0).get<std::size_t>(), t.at(1).get<std::size_t>(), t.at(2).get<std::uint64_t>()});
    if (j.contains("snapshot"))
        row.snapshot = ParameterSnapshot{j["snapshot"].at("theta").get<std::vector<std::vector<double>>>(),
                                         j["snapshot"].at("omega").get<std::vector<std::vector<double>>>()};
    return row;
}

/// Line-delimited JSON: one header record, then one record per MetricsRow.
inline void write_jsonl(std::ostream& out, const TrajectoryLog& log) {
    nlohmann::json header{{"record", "header"},
                          {"format_version", kTrajectoryFormatVersion},
                          {"config_hash", log.metadata.config_hash},
                          {"seed", log.metadata.seed},
                          {"config", log.metadata.config}};
    out << header.dump() << '\n';
    for (const auto& row : log.rows) out << to_json(row).dump() << '\n';
}

inline std::string to_jsonl(const TrajectoryLog& log) {
    std::ostringstream out;
    write_jsonl(out, log);
    return out.str();
}

inline TrajectoryLog read_jsonl(std::istream& in) {
    TrajectoryLog log;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        const auto kind = j.at("record").get<std::string>();
        if (kind == "header") {
            if (j.at("format_version").get<int>() != kTrajectoryFormatVersion)
                throw Error("unsupported trajectory format version");
            log.metadata.config_hash = j.at("config_hash").get<std::string>();
            log.metadata.seed = j.at("seed").get<std::uint64_t>();
            log.metadata.config = j.at("config");
            have_header = true;
        } else if (kind == "metrics") {
            log.append(metrics_row_from_json(j));
        } else {
            throw Error("unknown trajectory record '" + kind + "'");
        }
    }
    if (!have_header) throw Error("trajectory log has no header record");
    return log;
}

} // namespace resmarl
