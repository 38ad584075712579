#pragma once

#include "skillrt/config.hpp"
#include "skillrt/harness/trajectory.hpp"
#include "skillrt/ports.hpp"
#include "skillrt/skill_store/library.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace skillrt {

struct DispatchResult {
    ActionProposal final_action;
    std::vector<std::pair<std::string, std::string>> contexts;
    std::vector<FiredEntry> fired;
    std::vector<std::string> diagnostics;

    bool modified() const;
};

// Priority descending, ties by skill id.
std::vector<ProgramPtr> dispatch_order(std::span<const ProgramPtr> programs);

bool enforce_rate_limits(const StepContext& ctx, const std::string& skill_id, InterventionKind kind,
                         const RunConfig& cfg);

// The intervention operator. Updates ctx.fire_counters for every non-noop fire.
DispatchResult dispatch(StepContext& ctx, const ActionProposal& proposal, std::span<const ProgramPtr> active,
                        const RunConfig& cfg, TeacherPort* teacher = nullptr);

struct HandlerSpec {
    std::string skill_id;
    std::function<std::optional<std::string>(const StepContext&, const std::string&)> verify;
    std::function<ActionProposal(const StepContext&, const std::string&)> override_action;
};

std::vector<HandlerSpec> handlers_from(std::span<const ProgramPtr> programs);

struct VoteResult {
    std::optional<ActionProposal> override_action;
    std::vector<std::pair<std::string, std::string>> objections;  // (skill_id, reason)
};

// Overrides FINAL when objections strictly exceed the threshold and no
// override happened yet; increments ctx.final_override_count on override.
VoteResult handler_vote(StepContext& ctx, const std::string& final_arg, std::span<const HandlerSpec> handlers,
                        int threshold);

enum class Phase { PostSearch, PostRead, PreFinal };
std::string_view to_string(Phase phase);

bool condition_holds(const std::string& condition, const StepContext& ctx);

struct PhaseLine {
    std::string skill_id;
    std::string text;
};

std::vector<PhaseLine> render_phase_instructions(Phase phase, const StepContext& ctx,
                                                 std::span<const ProgramPtr> skills, int cap);

}  // namespace skillrt
