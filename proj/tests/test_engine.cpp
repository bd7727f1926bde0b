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

#include "resmarl/engine.hpp"

#include "reference_algorithm.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace resmarl {
namespace {

Mdp small_mdp(std::size_t n_agents, std::size_t n_states, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    RandomMdpSpec spec;
    spec.n_agents = n_agents;
    spec.n_states = n_states;
    spec.actions_per_agent = 2;
    spec.reward_low = lo;
    spec.reward_high = hi;
    spec.seed = seed;
    return generate_random_mdp(spec);
}

Experiment experiment(Mdp mdp, GraphSchedule graph, long rounds) {
    FeatureMap features = FeatureMap::tabular(mdp.n_states(), mdp.n_joint_actions());
    Experiment e{std::move(mdp),
                 std::move(graph),
                 std::move(features),
                 StepSizeSchedule::critic_default(),
                 StepSizeSchedule::actor_default(),
                 ConstantAttack{{0.0}},
                 EngineOptions{}};
    e.options.rounds = rounds;
    return e;
}

reference::Problem as_problem(const Experiment& e) {
    reference::Problem p;
    p.n_agents = e.mdp.n_agents();
    p.n_states = e.mdp.n_states();
    p.actions = e.mdp.codec().arities();
    p.transition = e.mdp.transition_table();
    p.reward = e.mdp.reward_table();
    for (NodeId i = 0; i < e.graph.n_nodes(); ++i) p.neighbors.push_back(e.graph.at(0).neighbors(i));
    p.critic_scale = e.critic_steps.scale;
    p.critic_exponent = e.critic_steps.exponent;
    p.actor_scale = e.actor_steps.scale;
    p.actor_exponent = e.actor_steps.exponent;
    p.initial_state = e.options.initial_state;
    return p;
}

TEST(StepSize, Examples) {
    const auto poly = StepSizeSchedule::polynomial(1.0, 0.65);
    EXPECT_EQ(step_size(poly, 0), 1.0);
    for (long t = 0; t < 1000; ++t) EXPECT_LT(step_size(poly, t + 1), step_size(poly, t));
    for (long t : {0L, 5L, 123456L}) EXPECT_EQ(step_size(StepSizeSchedule::constant(0.01), t), 0.01);
    EXPECT_THROW(step_size(poly, -1), Error);
    EXPECT_TRUE(two_timescale(StepSizeSchedule::critic_default(), StepSizeSchedule::actor_default()));
    EXPECT_FALSE(two_timescale(StepSizeSchedule::actor_default(), StepSizeSchedule::critic_default()));
    EXPECT_THROW(StepSizeSchedule::constant(0.0).validate(), Error);
}

TEST(ComputeMetrics, Examples) {
    const Mdp mdp = small_mdp(3, 3, 1);
    std::vector<AgentState> agents(3);
    for (std::size_t i = 0; i < 3; ++i) {
        agents[i].id = i;
        agents[i].actor = ActorParams::zeros(3, 2);
        agents[i].critic = {{0.5, -1.0}, {0.5, -1.0}};
        agents[i].mu = 0.1 * static_cast<double>(i);
    }
    const std::vector<double> window{1.0, 2.0, 3.0};
    MetricsRow row = compute_metrics(7, agents, mdp, window);
    EXPECT_EQ(row.round, 7);
    EXPECT_EQ(row.disagreement, 0.0);
    EXPECT_DOUBLE_EQ(row.avg_reward_window, 2.0);
    EXPECT_EQ(row.mu, (std::vector<double>{0.0, 0.1, 0.2}));
    EXPECT_NEAR(row.j_oracle, global_return(mdp, JointPolicy::uniform(mdp)), 1e-15);

    agents[1].critic.omega = {0.7, -1.5};
    EXPECT_DOUBLE_EQ(compute_metrics(7, agents, mdp, window).disagreement, 0.5);
    // Adversaries do not count towards disagreement.
    agents[1].adversary = ConstantAttack{{1.0}};
    EXPECT_EQ(compute_metrics(7, agents, mdp, window).disagreement, 0.0);

    const Mdp single = small_mdp(1, 3, 2);
    std::vector<AgentState> one(1);
    one[0].actor = ActorParams::zeros(3, 2);
    one[0].critic = CriticParams::zeros(6);
    EXPECT_EQ(compute_metrics(0, one, single, {}).disagreement, 0.0);

    const Mdp flat = small_mdp(3, 3, 3, 0.4, 0.4);
    for (auto& a : agents) a.actor.theta = {3.0, -1.0, 0.0, 2.0, -2.0, 0.5};
    EXPECT_NEAR(compute_metrics(0, agents, flat, {}).j_oracle, 0.4, 1e-12);
}

TEST(Run, ZeroRoundsLogsOnlyTheInitialRow) {
    const Experiment e = experiment(small_mdp(2, 3, 4), GraphSchedule(Graph::ring(2)), 0);
    const RunResult result = run(e, 1);
    ASSERT_EQ(result.log.rows.size(), 1u);
    EXPECT_EQ(result.log.rows[0].round, 0);
    EXPECT_NEAR(result.log.rows[0].j_oracle, global_return(e.mdp, JointPolicy::uniform(e.mdp)), 1e-15);
    EXPECT_EQ(result.rounds_executed, 0);
}

TEST(Run, LogsAtIntervalAndAtTheEnd) {
    Experiment e = experiment(small_mdp(3, 3, 5), GraphSchedule(Graph::ring(3)), 250);
    e.options.log_interval = 100;
    const RunResult result = run(e, 2);
    std::vector<long> rounds;
    for (const auto& r : result.log.rows) rounds.push_back(r.round);
    EXPECT_EQ(rounds, (std::vector<long>{0, 100, 200, 250}));
}

TEST(Run, SameSeedIsByteIdentical) {
    Experiment e = experiment(small_mdp(3, 4, 6), GraphSchedule(Graph::complete(3), {2}, 0), 3000);
    e.strategy = NoiseAttack{0.5, 9};
    e.options.log_interval = 500;
    e.options.snapshots = true;
    EXPECT_EQ(to_jsonl(run(e, 77).log), to_jsonl(run(e, 77).log));
    EXPECT_NE(to_jsonl(run(e, 77).log), to_jsonl(run(e, 78).log));
}

TEST(Run, MatchesStraightLineReference) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        Experiment e = experiment(small_mdp(2, 3, 40 + seed), GraphSchedule(Graph::ring(2)), 1000);
        e.critic_steps = StepSizeSchedule::polynomial(0.8, 0.6);
        e.actor_steps = StepSizeSchedule::polynomial(0.5, 0.9);
        const auto expected = reference::run(as_problem(e), seed, 1000);
        Simulation sim(e, seed);
        for (long t = 0; t <= 1000; ++t) {
            if (t > 0) sim.step();
            const auto& ref = expected[static_cast<std::size_t>(t)];
            for (std::size_t i = 0; i < 2; ++i) {
                ASSERT_EQ(sim.agents()[i].actor.theta, ref.theta[i]) << "round " << t << " agent " << i;
                ASSERT_EQ(sim.agents()[i].critic.omega, ref.omega[i]) << "round " << t << " agent " << i;
                ASSERT_EQ(sim.agents()[i].mu, ref.mu[i]) << "round " << t << " agent " << i;
            }
        }
    }
}

TEST(Run, MatchesReferenceOnALargerNetwork) {
    Experiment e = experiment(small_mdp(4, 3, 61), GraphSchedule(Graph::path(4)), 500);
    const auto expected = reference::run(as_problem(e), 5, 500);
    const RunResult result = run(e, 5);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(result.final_agents[i].actor.theta, expected.back().theta[i]);
        EXPECT_EQ(result.final_agents[i].critic.omega, expected.back().omega[i]);
    }
}

TEST(Run, NonFiniteParametersAbortWithRoundAndAgent) {
    Experiment e = experiment(small_mdp(2, 2, 7, 1e10, 2e10), GraphSchedule(Graph::ring(2)), 10);
    e.critic_steps = StepSizeSchedule::constant(1e300);
    try {
        run(e, 1);
        FAIL() << "expected NonFiniteError";
    } catch (const NonFiniteError& err) {
        EXPECT_EQ(err.round(), 1);
        EXPECT_EQ(err.agent(), 0u);
    }
}

TEST(Run, RejectsInconsistentExperiments) {
    EXPECT_THROW(Simulation(experiment(small_mdp(3, 2, 1), GraphSchedule(Graph::ring(4)), 1), 1), DimensionError);
    Experiment e = experiment(small_mdp(2, 2, 1), GraphSchedule(Graph::ring(2)), 1);
    e.options.initial_state = 2;
    EXPECT_THROW(Simulation(e, 1), IndexError);
    e.options.initial_state = 0;
    e.features = FeatureMap::tabular(3, 4);
    EXPECT_THROW(Simulation(e, 1), DimensionError);
}

TEST(Run, TrimmedDefenseStaysSafeAndRecordsTrims) {
    Experiment e = experiment(small_mdp(5, 3, 8), GraphSchedule(Graph::complete(5), {4}, 1), 2000);
    e.strategy = ConstantAttack{{100.0}};
    e.options.log_interval = 1000;
    const RunResult result = run(e, 3);
    const MetricsRow& last = result.log.rows.back();
    std::vector<bool> trimmed_adversary(4, false);
    for (const auto& t : last.trimmed)
        if (t.sender == 4) trimmed_adversary[t.agent] = t.coordinates > 0;
    for (bool b : trimmed_adversary) EXPECT_TRUE(b);
    for (std::size_t i = 0; i < 4; ++i)
        for (double w : result.final_agents[i].critic.omega) EXPECT_LT(std::abs(w), 10.0);
}

TEST(Run, AdversariesKeepTheirOwnCriticValues) {
    // The adversary receives messages but never mixes: with the critic frozen its
    // omega stays at zero while it broadcasts 5.
    Experiment e = experiment(small_mdp(3, 2, 9), GraphSchedule(Graph::complete(3), {0}, 0), 50);
    e.strategy = ConstantAttack{{5.0}};
    e.options.freeze_critic = true;
    Simulation sim(e, 1);
    for (int t = 0; t < 50; ++t) sim.step();
    for (double w : sim.agents()[0].critic.omega) EXPECT_EQ(w, 0.0);
    for (double w : sim.agents()[1].critic.omega) EXPECT_GT(w, 4.0);
}

TEST(Run, FrozenActorKeepsUniformPolicy) {
    Experiment e = experiment(small_mdp(2, 3, 10), GraphSchedule(Graph::ring(2)), 300);
    e.options.freeze_actor = true;
    const RunResult result = run(e, 4);
    for (const auto& a : result.final_agents)
        for (double x : a.actor.theta) EXPECT_EQ(x, 0.0);
    for (const auto& row : result.log.rows) EXPECT_NEAR(row.j_oracle, result.log.rows[0].j_oracle, 1e-15);
}

TEST(Run, EarlyStopAfterPatienceWindow) {
    Experiment e = experiment(small_mdp(2, 2, 11), GraphSchedule(Graph::ring(2)), 10000);
    e.options.freeze_actor = true;
    e.options.freeze_critic = true;
    e.options.early_stop = {true, 1e-9, 1e-9, 25};
    const RunResult result = run(e, 1);
    EXPECT_TRUE(result.early_stopped);
    EXPECT_EQ(result.rounds_executed, 25);
    EXPECT_EQ(result.log.rows.back().round, 25);
}

TEST(Run, FrozenActorMuTracksOwnAverageReward) {
    Experiment e = experiment(small_mdp(2, 3, 12), GraphSchedule(Graph::ring(2)), 200000);
    e.options.freeze_actor = true;
    e.options.log_interval = 200000;
    const RunResult result = run(e, 6);
    const JointPolicy uniform = JointPolicy::uniform(e.mdp);
    for (std::size_t i = 0; i < 2; ++i)
        EXPECT_NEAR(result.final_agents[i].mu, agent_average_reward(e.mdp, uniform, i), 2e-2);
}

TEST(TrajectoryLog, JsonlRoundTripAndOrdering) {
    Experiment e = experiment(small_mdp(2, 2, 13), GraphSchedule(Graph::ring(2)), 300);
    e.options.snapshots = true;
    RunMetadata meta;
    meta.config_hash = "00ff";
    meta.config = {{"note", "x"}};
    const RunResult result = run(e, 8, meta);
    std::istringstream in(to_jsonl(result.log));
    const TrajectoryLog back = read_jsonl(in);
    EXPECT_EQ(back, result.log);
    EXPECT_EQ(back.metadata.seed, 8u);

    TrajectoryLog log;
    MetricsRow row;
    row.round = 5;
    log.append(row);
    EXPECT_THROW(log.append(row), Error);
    std::istringstream empty("");
    EXPECT_THROW(read_jsonl(empty), Error);
}

} // namespace
} // namespace resmarl
