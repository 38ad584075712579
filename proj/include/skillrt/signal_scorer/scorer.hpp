#pragma once

#include "skillrt/harness/trajectory.hpp"
#include "skillrt/ports.hpp"
#include "skillrt/signal_scorer/breakdown.hpp"

#include <array>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace skillrt {

// The 15 canonical sub-signal ids, grouped by family (s1..s4).
const std::vector<std::string>& fine_signal_ids();
int family_of(const std::string& signal_id);  // 0..3

struct SignalWeights {
    std::array<double, 4> coarse{0.15, 0.10, 0.25, 0.50};
    std::map<std::string, double> fine;
    double beta_em = 0.5;
    double beta_pf = 0.5;
    double blend = 0.5;
    bool fine_mode = false;       // a_step = plain weighted sum instead of lambda . z
    bool normalize_fine = false;  // divide the fine sum by the total absolute weight

    SignalWeights();
    double weight(const std::string& id) const;
};

// Semantic fallbacks and local-outcome values used without a teacher.
inline constexpr double kSemanticRescue = 0.7;
inline constexpr double kSemanticOtherModification = 0.5;
inline constexpr double kSemanticUnmodified = 0.3;

bool classify_risky(const StepContext& ctx, const ActionProposal& proposal);

// Value of the local-outcome sub-signal for an (original, final) pair.
double local_outcome_value(const ActionProposal& orig, const ActionProposal& final_action, bool was_modified);

double cost_value(int trajectory_length);  // clip((T - 15) / 10, 0, 1)

using DomainCheck = std::function<double(const StepRecord&)>;

SignalBreakdown score_step(const StepRecord& step, int episode_em, int trajectory_length, const SignalWeights& weights,
                           TeacherPort* teacher = nullptr, std::span<const DomainCheck> domain_checks = {});

// lambda . z over the family scores.
double coarse_step_score(const std::array<double, 4>& z, const std::array<double, 4>& lambda);

double fine_sum(const SignalBreakdown& b);

// Throws EmptyTrajectory.
double episode_reward(std::span<const SignalBreakdown> steps, int em, double blend);

// Scores every step in place.
void score_trajectory(Trajectory& traj, const SignalWeights& weights, TeacherPort* teacher = nullptr,
                      std::span<const DomainCheck> domain_checks = {});

// Mean step score over a scored trajectory. Throws EmptyTrajectory.
double trajectory_pf_score(const Trajectory& traj);

// beta_em * em + beta_pf * mean step score.
double trajectory_score(const Trajectory& traj, const SignalWeights& weights);

}  // namespace skillrt
