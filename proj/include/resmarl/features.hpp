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
#include "resmarl/mdp.hpp"
#include "resmarl/random.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace resmarl {

/**
 * Critic features phi(s, a) over (state, joint action) pairs.
 *
 * - Tabular: one-hot of dimension |S| * |A|, index `s * |A| + a`. Q is exact.
 * - Random projection: dense Gaussian features N(0, 1/U) of a chosen
 *   dimension U, fixed by a seed.
 */
class FeatureMap {
  public:
    enum class Kind { tabular, random_projection };

    static FeatureMap tabular(std::size_t n_states, std::size_t n_joint_actions) {
        FeatureMap f;
        f.kind_ = Kind::tabular;
        f.n_states_ = n_states;
        f.n_joint_ = n_joint_actions;
        f.dimension_ = n_states * n_joint_actions;
        return f;
    }

    static FeatureMap random_projection(std::size_t n_states, std::size_t n_joint_actions, std::size_t dimension,
                                        std::uint64_t seed) {
        if (dimension == 0) throw Error("feature dimension must be positive");
        FeatureMap f;
        f.kind_ = Kind::random_projection;
        f.n_states_ = n_states;
        f.n_joint_ = n_joint_actions;
        f.dimension_ = dimension;
        f.table_.resize(n_states * n_joint_actions * dimension);
        Rng rng(derive_seed(seed, 0x66656174));
        std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(dimension)));
        for (double& x : f.table_) x = normal(rng);
        return f;
    }

    Kind kind() const noexcept { return kind_; }
    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_joint_actions() const noexcept { return n_joint_; }

    std::vector<double> evaluate(StateId s, JointAction a) const {
        check(s, a);
        std::vector<double> phi(dimension_, 0.0);
        if (kind_ == Kind::tabular) {
            phi[s * n_joint_ + a] = 1.0;
        } else {
            const double* row = table_.data() + (s * n_joint_ + a) * dimension_;
            phi.assign(row, row + dimension_);
        }
        return phi;
    }

    /// phi(s, a)^T w.
    double dot(StateId s, JointAction a, std::span<const double> w) const {
        check(s, a);
        if (w.size() != dimension_) throw DimensionError("weight vector length does not match the feature dimension");
        if (kind_ == Kind::tabular) return w[s * n_joint_ + a];
        const double* row = table_.data() + (s * n_joint_ + a) * dimension_;
        double total = 0.0;
        for (std::size_t k = 0; k < dimension_; ++k) total += row[k] * w[k];
        return total;
    }

    /// w += alpha * phi(s, a).
    void axpy(StateId s, JointAction a, double alpha, std::span<double> w) const {
        check(s, a);
        if (w.size() != dimension_) throw DimensionError("weight vector length does not match the feature dimension");
        if (kind_ == Kind::tabular) {
            w[s * n_joint_ + a] += alpha;
            return;
        }
        const double* row = table_.data() + (s * n_joint_ + a) * dimension_;
        for (std::size_t k = 0; k < dimension_; ++k) w[k] += alpha * row[k];
    }

  private:
    FeatureMap() = default;

    void check(StateId s, JointAction a) const {
        if (s >= n_states_ || a >= n_joint_) throw IndexError("feature index out of range");
    }

    Kind kind_ = Kind::tabular;
    std::size_t n_states_ = 0;
    std::size_t n_joint_ = 0;
    std::size_t dimension_ = 0;
    std::vector<double> table_;
};

} // namespace resmarl
