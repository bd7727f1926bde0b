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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace resmarl {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An index (state, action, node, agent) outside its valid range.
class IndexError : public Error {
  public:
    using Error::Error;
};

/// Shapes or sizes of two inputs do not agree.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// Construction request exceeds a configured size cap.
class SizeCapError : public Error {
  public:
    using Error::Error;
};

/// The Markov chain is reducible or periodic.
class NonErgodicError : public Error {
  public:
    using Error::Error;
};

/// No adversary placement satisfying the locality bound was found.
class PlacementError : public Error {
  public:
    using Error::Error;
};

/// Consensus weights for a coordinate do not form a probability vector.
class WeightNormalizationError : public Error {
  public:
    using Error::Error;
};

/// A regular agent's combined value left the hull of its inputs.
class SafetyViolation : public Error {
  public:
    SafetyViolation(long round, std::size_t agent, std::size_t coordinate, const std::string& what)
        : Error(what), round_(round), agent_(agent), coordinate_(coordinate) {}

    long round() const noexcept { return round_; }
    std::size_t agent() const noexcept { return agent_; }
    std::size_t coordinate() const noexcept { return coordinate_; }

  private:
    long round_;
    std::size_t agent_;
    std::size_t coordinate_;
};

/// A parameter vector became NaN or infinite.
class NonFiniteError : public Error {
  public:
    NonFiniteError(long round, std::size_t agent, const std::string& what)
        : Error(what), round_(round), agent_(agent) {}

    long round() const noexcept { return round_; }
    std::size_t agent() const noexcept { return agent_; }

  private:
    long round_;
    std::size_t agent_;
};

/// Invalid experiment configuration. `path()` names the offending field,
/// e.g. `graph.topology`.
class ConfigError : public Error {
  public:
    ConfigError(std::string path, const std::string& message)
        : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

  private:
    std::string path_;
};

} // namespace resmarl
