#include "fixtures.hpp"

#include "skillrt/errors.hpp"
#include "skillrt/signal_scorer/scorer.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace skillrt;
namespace st = skillrt::testing;

namespace {

// FINAL proposed at step 2 of 5 with nothing read, rewritten to READ by one skill.
StepRecord rescue_step() {
    StepRecord s = st::step(ActionType::Final, "Sam", 2);
    s.ctx_snapshot.step_count = 2;
    s.ctx_snapshot.max_steps = 5;
    s.ctx_snapshot.read_count = 0;
    s.a_final = {ActionType::Read, "doc_0"};
    s.was_modified = true;
    s.fired = {{"insufficient_exploration", InterventionKind::ModifyAction, "forcing read", true}};
    return s;
}

SignalWeights fine_weights() {
    SignalWeights w;
    w.fine_mode = true;
    return w;
}

}  // namespace

TEST(Scorer, WorkedRescueExampleSumsTo190) {
    const auto b = score_step(rescue_step(), 1, 4, fine_weights());
    EXPECT_NEAR(b.a_step, 1.90, 1e-12);
    EXPECT_NEAR(b.fine_values.at("s1.tp"), 0.25, 1e-12);
    EXPECT_NEAR(b.fine_values.at("s1.phase"), 0.05 * 0.6, 1e-12);
    EXPECT_NEAR(b.fine_values.at("s3.semantic"), 0.5 * 0.7, 1e-12);
    EXPECT_NEAR(b.fine_values.at("s4.local"), 0.4 * 0.8, 1e-12);
    EXPECT_DOUBLE_EQ(b.fine_values.at("s4.cost"), 0.0);
}

TEST(Scorer, WorkedRescueExampleCoarse) {
    // Family scores by hand: 0.28/0.5, 0.35/1.0, 0.55/1.0, 0.72/1.0.
    const auto b = score_step(rescue_step(), 1, 4, SignalWeights{});
    EXPECT_NEAR(b.z[0], 0.56, 1e-12);
    EXPECT_NEAR(b.z[1], 0.35, 1e-12);
    EXPECT_NEAR(b.z[2], 0.55, 1e-12);
    EXPECT_NEAR(b.z[3], 0.72, 1e-12);
    EXPECT_NEAR(b.a_step, 0.6165, 1e-12);
    SignalWeights normalized = fine_weights();
    normalized.normalize_fine = true;
    EXPECT_NEAR(score_step(rescue_step(), 1, 4, normalized).a_step, 1.90 / 3.5, 1e-12);
}

TEST(Scorer, RiskClassification) {
    StepContext c;
    c.step_count = 4;
    c.read_count = 1;
    EXPECT_FALSE(classify_risky(c, {ActionType::Final, "x"}));
    c.read_count = 0;
    EXPECT_TRUE(classify_risky(c, {ActionType::Final, "x"}));
    c.read_count = 1;
    c.step_count = 2;
    EXPECT_TRUE(classify_risky(c, {ActionType::Final, "x"}));
    EXPECT_FALSE(classify_risky(c, {ActionType::Search, "x"}));
    c.empty_results = true;
    EXPECT_TRUE(classify_risky(c, {ActionType::Search, "x"}));
    EXPECT_FALSE(classify_risky(c, {ActionType::Read, "doc_0"}));
}

TEST(Scorer, MissedRiskAndSideEffect) {
    StepRecord s = st::step(ActionType::Final, "Sam", 0);
    s.ctx_snapshot.max_steps = 5;
    const auto b = score_step(s, 0, 1, fine_weights());
    EXPECT_NEAR(b.fine_values.at("s1.fn"), -0.10, 1e-12);
    EXPECT_DOUBLE_EQ(b.fine_values.at("s3.semantic"), 0.0);
    EXPECT_DOUBLE_EQ(b.fine_values.at("s1.phase"), 0.0);

    StepRecord m = rescue_step();
    EXPECT_NEAR(score_step(m, 0, 4, fine_weights()).fine_values.at("s4.side_effect"), -0.10, 1e-12);
}

TEST(Scorer, TeacherAndDomainChecks) {
    auto teacher = st::teacher_with("step_score", "0.9");
    EXPECT_NEAR(score_step(rescue_step(), 1, 4, fine_weights(), &teacher).fine_values.at("s3.semantic"), 0.45, 1e-12);
    auto wild = st::teacher_with("step_score", "7");
    EXPECT_NEAR(score_step(rescue_step(), 1, 4, fine_weights(), &wild).fine_values.at("s3.semantic"), 0.35, 1e-12);

    const std::vector<DomainCheck> checks{[](const StepRecord&) { return 1.0; },
                                          [](const StepRecord&) { return 0.0; }};
    EXPECT_NEAR(score_step(rescue_step(), 1, 4, fine_weights(), nullptr, checks).fine_values.at("s3.domain"), 0.15,
                1e-12);
}

TEST(Scorer, LocalOutcomeTable) {
    const ActionProposal f{ActionType::Final, "a"}, r{ActionType::Read, "doc_0"}, s{ActionType::Search, "q"};
    EXPECT_DOUBLE_EQ(local_outcome_value(f, r, true), 0.8);
    EXPECT_DOUBLE_EQ(local_outcome_value(f, s, true), 0.7);
    EXPECT_DOUBLE_EQ(local_outcome_value(s, s, true), 0.5);
    EXPECT_DOUBLE_EQ(local_outcome_value(r, s, true), 0.3);
    EXPECT_DOUBLE_EQ(local_outcome_value(f, r, false), 0.0);
}

TEST(Scorer, EpisodeAggregates) {
    Trajectory t;
    EXPECT_THROW(trajectory_pf_score(t), EmptyTrajectory);
    EXPECT_THROW(episode_reward({}, 1, 0.5), EmptyTrajectory);
    t.em = 1;
    t.steps = {rescue_step(), st::step(ActionType::Final, "Sam Walton", 3)};
    EXPECT_THROW(trajectory_pf_score(t), Error);
    score_trajectory(t, SignalWeights{});
    const double mean = (t.steps[0].signals->a_step + t.steps[1].signals->a_step) / 2.0;
    EXPECT_NEAR(trajectory_pf_score(t), mean, 1e-12);
    EXPECT_NEAR(trajectory_score(t, SignalWeights{}), 0.5 + 0.5 * mean, 1e-12);
    const std::vector<SignalBreakdown> bs{*t.steps[0].signals, *t.steps[1].signals};
    EXPECT_NEAR(episode_reward(bs, 1, 0.25), 0.25 * mean + 0.75, 1e-12);
}

TEST(Scorer, FamilyIds) {
    EXPECT_EQ(fine_signal_ids().size(), 15u);
    EXPECT_EQ(family_of("s3.domain"), 2);
    EXPECT_THROW(family_of("x9"), Error);
}

// Family scores stay within [-1, 1] and the fine sum equals the per-id total.
TEST(ScorerProperty, BoundedFamilies) {
    std::mt19937_64 rng(7);
    const ActionType types[] = {ActionType::Search, ActionType::Read, ActionType::Final};
    for (int n = 0; n < 2000; ++n) {
        StepRecord s = st::step(types[rng() % 3], rng() % 2 ? "x" : "", static_cast<int>(rng() % 6));
        s.ctx_snapshot.max_steps = 6;
        s.ctx_snapshot.read_count = static_cast<int>(rng() % 2);
        if (rng() % 2) {
            s.a_final = {types[rng() % 3], "y"};
            s.was_modified = s.a_final != s.a_orig;
            s.fired = {{"k", InterventionKind::ModifyAction, "r", true}};
        }
        const auto b = score_step(s, static_cast<int>(rng() % 2), static_cast<int>(rng() % 40), SignalWeights{});
        for (double z : b.z) {
            EXPECT_GE(z, -1.0);
            EXPECT_LE(z, 1.0);
        }
        double total = 0.0;
        for (const auto& [id, v] : b.fine_values) total += v;
        EXPECT_NEAR(fine_sum(b), total, 1e-12);
    }
}
