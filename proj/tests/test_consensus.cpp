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

#include "resmarl/consensus.hpp"

#include <gtest/gtest.h>

namespace resmarl {
namespace {

std::vector<ParameterMessage> scalar_messages(const std::vector<double>& values, std::size_t degree = 4) {
    std::vector<ParameterMessage> msgs;
    for (std::size_t j = 0; j < values.size(); ++j) msgs.push_back({j, {values[j]}, degree});
    return msgs;
}

/// One synchronous trim-and-combine round over all regular agents; adversaries
/// broadcast `attack` and keep their own value.
std::vector<std::vector<double>> consensus_round(const GraphSchedule& g, long round,
                                                 const std::vector<std::vector<double>>& values,
                                                 const AdversaryStrategy& attack) {
    const Graph& graph = g.at(round);
    std::vector<std::vector<double>> next = values;
    for (NodeId i = 0; i < graph.n_nodes(); ++i) {
        if (g.is_adversary(i)) continue;
        std::vector<ParameterMessage> msgs;
        for (NodeId j : graph.neighbors(i)) {
            AgentState sender;
            sender.id = j;
            sender.critic = {values[j], values[j]};
            const auto payload = g.is_adversary(j) ? adversary_message(attack, sender, round) : values[j];
            msgs.push_back({j, payload, graph.degree(j)});
        }
        const TrimResult kept = trim(values[i], msgs, g.trim());
        next[i] = consensus_combine(values[i], msgs, kept, graph.degree(i));
    }
    return next;
}

TEST(Trim, DropsExtremesOfScalarPayloads) {
    const auto msgs = scalar_messages({0.1, 0.5, 0.9, 2.0});
    const std::vector<double> own{0.0};
    const TrimResult kept = trim(own, msgs, 1);
    EXPECT_EQ(kept.retained_values(0, msgs), (std::vector<double>{0.5, 0.9}));
    EXPECT_EQ(kept.trimmed_count(0), 1u);
    EXPECT_EQ(kept.trimmed_count(1), 0u);
}

TEST(Trim, ZeroKeepsEverything) {
    const auto msgs = scalar_messages({3.0, -1.0, 7.0});
    const std::vector<double> own{0.0};
    EXPECT_EQ(trim(own, msgs, 0).retained_values(0, msgs), (std::vector<double>{3.0, -1.0, 7.0}));
}

TEST(Trim, IsCoordinatewise) {
    const std::vector<ParameterMessage> msgs{{0, {0.0, 5.0}, 2}, {1, {1.0, 1.0}, 2}, {2, {2.0, 0.0}, 2}};
    const std::vector<double> own{0.0, 0.0};
    const TrimResult kept = trim(own, msgs, 1);
    EXPECT_EQ(kept.retained_values(0, msgs), (std::vector<double>{1.0}));
    EXPECT_EQ(kept.retained_values(1, msgs), (std::vector<double>{1.0}));
    EXPECT_TRUE(kept.kept(0, 1));
    EXPECT_TRUE(kept.kept(1, 1));
}

TEST(Trim, TooFewMessagesKeepNothing) {
    const auto msgs = scalar_messages({1.0, 2.0});
    const std::vector<double> own{0.0};
    EXPECT_TRUE(trim(own, msgs, 1).retained_values(0, msgs).empty());
    EXPECT_TRUE(trim(own, scalar_messages({1.0, 2.0, 3.0, 4.0}), 2).retained_values(0, msgs).empty());
    EXPECT_TRUE(trim(own, std::vector<ParameterMessage>{}, 0).retained_values(0, msgs).empty());
}

TEST(Trim, TiesBreakBySenderId) {
    // Three equal values: sender 0 counts as smallest, sender 2 as largest.
    std::vector<ParameterMessage> msgs{{2, {1.0}, 2}, {0, {1.0}, 2}, {1, {1.0}, 2}};
    const std::vector<double> own{0.0};
    const TrimResult kept = trim(own, msgs, 1);
    EXPECT_FALSE(kept.kept(0, 0));
    EXPECT_FALSE(kept.kept(0, 1));
    EXPECT_TRUE(kept.kept(0, 2));
}

TEST(Trim, RejectsMismatchedPayloads) {
    const std::vector<double> own{0.0, 0.0};
    EXPECT_THROW(trim(own, scalar_messages({1.0}), 0), DimensionError);
}

TEST(ConsensusCombine, FixedPointAndHalfway) {
    const std::vector<double> values{2.5, 2.5};
    const std::vector<double> weights{0.25, 0.25};
    EXPECT_EQ(consensus_combine(2.5, values, weights, 0.5), 2.5);
    EXPECT_EQ(consensus_combine(0.0, std::vector<double>{1.0}, std::vector<double>{0.5}, 0.5), 0.5);
}

TEST(ConsensusCombine, RejectsUnnormalizedWeights) {
    EXPECT_THROW(consensus_combine(0.0, std::vector<double>{1.0}, std::vector<double>{0.6}, 0.5),
                 WeightNormalizationError);
    EXPECT_THROW(consensus_combine(0.0, std::vector<double>{1.0}, std::vector<double>{1.5}, -0.5),
                 WeightNormalizationError);
    EXPECT_NO_THROW(consensus_combine(0.0, std::vector<double>{1.0}, std::vector<double>{0.5 + 5e-10}, 0.5));
}

TEST(ConsensusCombine, VectorFormRejectsMoreMessagesThanDegree) {
    const auto msgs = scalar_messages({1.0, 2.0, 3.0});
    const std::vector<double> own{0.0};
    EXPECT_THROW(consensus_combine(own, msgs, trim(own, msgs, 0), 2), WeightNormalizationError);
}

TEST(ConsensusCombine, SelfWeightAbsorbsTrimmedMass) {
    // Degrees 4 everywhere: pair weight 1/5, two survivors, self weight 3/5.
    const auto msgs = scalar_messages({0.1, 0.5, 0.9, 2.0});
    const std::vector<double> own{1.0};
    const auto out = consensus_combine(own, msgs, trim(own, msgs, 1), 4);
    EXPECT_NEAR(out[0], 0.6 * 1.0 + 0.2 * 0.5 + 0.2 * 0.9, 1e-15);
}

TEST(ConsensusCombine, StaysInsideTheRetainedHull) {
    Rng rng(1);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t dim = 1 + rng() % 4;
        const std::size_t m = rng() % 7;
        const std::size_t degree = m + rng() % 3;
        std::vector<ParameterMessage> msgs;
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<double> payload(dim);
            for (double& x : payload) x = 20.0 * uniform01(rng) - 10.0;
            msgs.push_back({j + 1, payload, 1 + rng() % 6});
        }
        std::vector<double> own(dim);
        for (double& x : own) x = 20.0 * uniform01(rng) - 10.0;
        const TrimResult kept = trim(own, msgs, rng() % 3);
        const auto out = consensus_combine(own, msgs, kept, degree);
        EXPECT_FALSE(hull_violation(own, msgs, kept, out).has_value());
        for (std::size_t k = 0; k < dim; ++k) {
            double lo = own[k], hi = own[k];
            for (double v : kept.retained_values(k, msgs)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            EXPECT_GE(out[k], lo - 1e-12);
            EXPECT_LE(out[k], hi + 1e-12);
        }
    }
}

TEST(HullViolation, ReportsTheOffendingCoordinate) {
    const auto msgs = scalar_messages({1.0, 2.0});
    const std::vector<double> own{0.0, 0.0};
    std::vector<ParameterMessage> two_dim{{0, {1.0, 1.0}, 2}, {1, {2.0, 2.0}, 2}};
    const TrimResult kept = trim(own, two_dim, 0);
    EXPECT_FALSE(hull_violation(own, two_dim, kept, std::vector<double>{1.5, 0.0}).has_value());
    EXPECT_EQ(hull_violation(own, two_dim, kept, std::vector<double>{1.0, 2.5}), std::optional<std::size_t>(1));
}

TEST(FLocalFiltering, CombinedValueStaysInsideRegularRange) {
    Rng rng(2);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const Graph graph = Graph::erdos_renyi(4 + rng() % 8, 0.4 + 0.5 * uniform01(rng), rng());
        const std::size_t f = 1 + rng() % 2;
        const std::size_t count = 1 + rng() % 3;
        if (count >= graph.n_nodes()) continue;
        const GraphSchedule bare(graph, {}, f);
        std::vector<NodeId> adversaries;
        try {
            adversaries = place_adversaries(bare, count, f, rng, 200);
        } catch (const PlacementError&) {
            continue;
        }
        const GraphSchedule g = bare.with_adversaries(adversaries);
        const std::size_t dim = 3;
        std::vector<std::vector<double>> payload(graph.n_nodes(), std::vector<double>(dim));
        for (NodeId j = 0; j < graph.n_nodes(); ++j)
            for (double& x : payload[j]) x = g.is_adversary(j) ? 1e3 * (2.0 * uniform01(rng) - 1.0) : uniform01(rng);
        for (NodeId i = 0; i < graph.n_nodes(); ++i) {
            if (g.is_adversary(i)) continue;
            std::vector<ParameterMessage> msgs;
            for (NodeId j : graph.neighbors(i)) msgs.push_back({j, payload[j], graph.degree(j)});
            const auto out = consensus_combine(payload[i], msgs, trim(payload[i], msgs, f), graph.degree(i));
            for (std::size_t k = 0; k < dim; ++k) {
                double lo = payload[i][k], hi = payload[i][k];
                for (NodeId j : graph.neighbors(i))
                    if (!g.is_adversary(j)) {
                        lo = std::min(lo, payload[j][k]);
                        hi = std::max(hi, payload[j][k]);
                    }
                EXPECT_GE(out[k], lo - 1e-12);
                EXPECT_LE(out[k], hi + 1e-12);
            }
            ++checked;
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(Reduction, UntrimmedRoundEqualsMetropolisAveraging) {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Graph graph = Graph::erdos_renyi(2 + rng() % 9, 0.5, rng());
        const GraphSchedule g(graph);
        const std::size_t dim = 2;
        std::vector<std::vector<double>> x(graph.n_nodes(), std::vector<double>(dim));
        for (auto& v : x)
            for (double& e : v) e = uniform01(rng);
        const auto next = consensus_round(g, 0, x, SelfishAttack{});
        for (NodeId i = 0; i < graph.n_nodes(); ++i)
            for (std::size_t k = 0; k < dim; ++k) {
                double neighbor_mass = 0.0;
                for (NodeId j : graph.neighbors(i)) neighbor_mass += metropolis_weight(graph.degree(i), graph.degree(j));
                double expected = (1.0 - neighbor_mass) * x[i][k];
                for (NodeId j : graph.neighbors(i))
                    expected += metropolis_weight(graph.degree(i), graph.degree(j)) * x[j][k];
                EXPECT_EQ(next[i][k], expected);
            }
    }
}

TEST(PureAveraging, TrimmingKeepsRegularValuesBounded) {
    const std::vector<NodeId> adversaries{0};
    const GraphSchedule g(Graph::complete(6), adversaries, 1);
    ASSERT_TRUE(is_r_local(g, adversaries, 1));
    std::vector<std::vector<double>> x{{0.0}, {0.1}, {0.4}, {-0.3}, {0.2}, {0.05}};
    for (int t = 0; t < 10000; ++t) {
        x = consensus_round(g, t, x, ConstantAttack{{50.0}});
        for (NodeId i = 1; i < 6; ++i) {
            ASSERT_GE(x[i][0], -0.3 - 1e-12);
            ASSERT_LE(x[i][0], 0.4 + 1e-12);
        }
    }
}

TEST(PureAveraging, WithoutTrimmingTheAdversaryWins) {
    const GraphSchedule g(Graph::complete(6), {0}, 0);
    std::vector<std::vector<double>> x{{0.0}, {0.1}, {0.4}, {-0.3}, {0.2}, {0.05}};
    for (int t = 0; t < 10000; ++t) x = consensus_round(g, t, x, ConstantAttack{{50.0}});
    for (NodeId i = 1; i < 6; ++i) EXPECT_NEAR(x[i][0], 50.0, 1e-6);
}

TEST(AdversaryMessage, StrategyExamples) {
    AgentState adversary;
    adversary.id = 3;
    adversary.critic = CriticParams::zeros(2);
    adversary.critic.omega_tilde = {0.25, -0.75};

    EXPECT_EQ(adversary_message(ConstantAttack{{3.0, 3.0}}, adversary, 17), (std::vector<double>{3.0, 3.0}));
    EXPECT_EQ(adversary_message(ConstantAttack{{3.0}}, adversary, 0), (std::vector<double>{3.0, 3.0}));
    const auto drift = adversary_message(DriftAttack{{0.0}, 0.1}, adversary, 10);
    for (double x : drift) EXPECT_NEAR(x, 1.0, 1e-15);
    EXPECT_EQ(adversary_message(SelfishAttack{}, adversary, 5), adversary.critic.omega_tilde);
    EXPECT_THROW(adversary_message(ConstantAttack{{1.0, 2.0, 3.0}}, adversary, 0), DimensionError);
}

TEST(AdversaryMessage, NoiseIsReproducibleAndVaries) {
    AgentState adversary;
    adversary.id = 1;
    adversary.critic = CriticParams::zeros(4);
    const NoiseAttack noise{2.0, 77};
    EXPECT_EQ(adversary_message(noise, adversary, 9), adversary_message(noise, adversary, 9));
    EXPECT_NE(adversary_message(noise, adversary, 9), adversary_message(noise, adversary, 10));
    AgentState other = adversary;
    other.id = 2;
    EXPECT_NE(adversary_message(noise, adversary, 9), adversary_message(noise, other, 9));

    double sum = 0.0, sq = 0.0;
    const int rounds = 5000;
    for (int t = 0; t < rounds; ++t)
        for (double x : adversary_message(noise, adversary, t)) {
            sum += x;
            sq += x * x;
        }
    const double n = rounds * 4.0;
    EXPECT_NEAR(sum / n, 0.0, 0.1);
    EXPECT_NEAR(std::sqrt(sq / n), 2.0, 0.1);
}

} // namespace
} // namespace resmarl
