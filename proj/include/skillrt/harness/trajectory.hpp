#pragma once

#include "skillrt/signal_scorer/breakdown.hpp"
#include "skillrt/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace skillrt {

// One entry of the fired-skill metadata of a step. Downgraded and
// rate-limited rewrites are recorded as noops with the cause in `reason`.
struct FiredEntry {
    std::string skill_id;
    InterventionKind kind = InterventionKind::Noop;
    std::string reason;
    bool effective = false;

    friend bool operator==(const FiredEntry&, const FiredEntry&) = default;
};

struct StepRecord {
    int step_index = 0;
    StepContext ctx_snapshot;
    ActionProposal a_orig;
    ActionProposal a_final;
    std::vector<std::pair<std::string, std::string>> injected_contexts;  // (skill_id, text)
    std::vector<FiredEntry> fired;
    std::vector<std::string> phase_instructions;  // rendered lines
    std::string observation;
    bool was_modified = false;
    bool executed = true;  // false when a budget blocked the action
    std::string delta_feedback;
    std::optional<SignalBreakdown> signals;

    bool any_fired() const { return !fired.empty(); }
    bool effective_modify() const;
    bool any_inject() const;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct Trajectory {
    std::string id;
    std::string dataset;
    std::string question;
    std::vector<std::string> gold_answers;
    std::vector<StepRecord> steps;
    std::optional<std::string> final_answer;
    int em = 0;
    double f1 = 0.0;
    std::uint64_t episode_seed = 0;
    bool failed = false;
    std::string error;

    int length() const { return static_cast<int>(steps.size()); }

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

}  // namespace skillrt
