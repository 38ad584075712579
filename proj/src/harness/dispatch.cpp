#include "skillrt/harness/dispatch.hpp"

#include "skillrt/failure_miner/text_metrics.hpp"
#include "skillrt/rule_engine/evaluator.hpp"

#include <algorithm>

namespace skillrt {

bool StepRecord::effective_modify() const {
    return std::any_of(fired.begin(), fired.end(), [](const FiredEntry& f) {
        return f.effective && f.kind == InterventionKind::ModifyAction;
    });
}

bool StepRecord::any_inject() const {
    return std::any_of(fired.begin(), fired.end(), [](const FiredEntry& f) {
        return f.effective && f.kind == InterventionKind::InjectContext;
    });
}

bool DispatchResult::modified() const {
    return std::any_of(fired.begin(), fired.end(), [](const FiredEntry& f) {
        return f.effective && f.kind == InterventionKind::ModifyAction;
    });
}

std::vector<ProgramPtr> dispatch_order(std::span<const ProgramPtr> programs) {
    std::vector<ProgramPtr> out(programs.begin(), programs.end());
    std::stable_sort(out.begin(), out.end(), [](const ProgramPtr& a, const ProgramPtr& b) {
        if (a->priority != b->priority) return a->priority > b->priority;
        return a->base_id < b->base_id;
    });
    return out;
}

bool enforce_rate_limits(const StepContext& ctx, const std::string& skill_id, InterventionKind kind,
                         const RunConfig& cfg) {
    auto it = ctx.fire_counters.find(skill_id);
    const int fires = it == ctx.fire_counters.end() ? 0 : it->second;
    switch (kind) {
    case InterventionKind::Noop: return true;
    case InterventionKind::ModifyAction: {
        auto cap = cfg.modify_cap_overrides.find(skill_id);
        return fires < (cap == cfg.modify_cap_overrides.end() ? cfg.modify_cap : cap->second);
    }
    case InterventionKind::InjectContext: {
        auto cap = cfg.inject_caps.find(skill_id);
        return cap == cfg.inject_caps.end() || fires < cap->second;
    }
    }
    return false;
}

DispatchResult dispatch(StepContext& ctx, const ActionProposal& proposal, std::span<const ProgramPtr> active,
                        const RunConfig& cfg, TeacherPort* teacher) {
    DispatchResult out;
    out.final_action = proposal;
    bool rewritten = false;
    for (const auto& program : dispatch_order(active)) {
        if (!program->rule) continue;
        const std::string& id = program->base_id;
        const auto ev = rules::evaluate(*program->rule, id, ctx, proposal, program->needs_teacher ? teacher : nullptr);
        for (const auto& d : ev.diagnostics) out.diagnostics.push_back(id + ": " + d);
        if (!ev.activated) continue;
        const Intervention& iv = ev.intervention;
        switch (iv.kind) {
        case InterventionKind::Noop:
            out.fired.push_back({id, InterventionKind::Noop, iv.reason, false});
            break;
        case InterventionKind::ModifyAction:
            if (rewritten) {
                out.fired.push_back({id, InterventionKind::Noop, "downgraded: " + iv.reason, false});
            } else if (!iv.new_action_type) {
                out.fired.push_back({id, InterventionKind::Noop, "malformed rewrite: " + iv.reason, false});
            } else if (!enforce_rate_limits(ctx, id, iv.kind, cfg)) {
                out.fired.push_back({id, InterventionKind::Noop, "rate limited: " + iv.reason, false});
            } else {
                out.final_action = {*iv.new_action_type, iv.new_action_arg.value_or(proposal.arg)};
                rewritten = true;
                ++ctx.fire_counters[id];
                out.fired.push_back({id, InterventionKind::ModifyAction, iv.reason, true});
            }
            break;
        case InterventionKind::InjectContext:
            if (iv.context_text.empty()) {
                out.fired.push_back({id, InterventionKind::Noop, "empty injection: " + iv.reason, false});
            } else if (!enforce_rate_limits(ctx, id, iv.kind, cfg)) {
                out.fired.push_back({id, InterventionKind::Noop, "rate limited: " + iv.reason, false});
            } else {
                ++ctx.fire_counters[id];
                out.contexts.emplace_back(id, iv.context_text);
                out.fired.push_back({id, InterventionKind::InjectContext, iv.reason, true});
            }
            break;
        }
    }
    return out;
}

std::vector<HandlerSpec> handlers_from(std::span<const ProgramPtr> programs) {
    std::vector<HandlerSpec> out;
    for (const auto& program : dispatch_order(programs)) {
        if (!program->has_handler()) continue;
        const auto rule = program->rule;
        const std::string id = program->base_id;
        HandlerSpec h;
        h.skill_id = id;
        h.verify = [rule, id](const StepContext& ctx, const std::string& arg) {
            return rules::handler_objection(*rule->handler, id, ctx, arg);
        };
        h.override_action = [rule](const StepContext& ctx, const std::string& arg) {
            return rules::handler_override(*rule->handler, ctx, arg);
        };
        out.push_back(std::move(h));
    }
    return out;
}

VoteResult handler_vote(StepContext& ctx, const std::string& final_arg, std::span<const HandlerSpec> handlers,
                        int threshold) {
    VoteResult out;
    const HandlerSpec* first = nullptr;
    for (const auto& h : handlers) {
        auto objection = h.verify ? h.verify(ctx, final_arg) : std::nullopt;
        if (!objection || objection->empty()) continue;
        if (!first) first = &h;
        out.objections.emplace_back(h.skill_id, *objection);
    }
    const int count = static_cast<int>(out.objections.size());
    if (count > threshold && ctx.final_override_count < 1 && first) {
        out.override_action = first->override_action ? first->override_action(ctx, final_arg)
                                                     : ActionProposal{ActionType::Search, ctx.question};
        out.override_action->type = ActionType::Search;
        ++ctx.final_override_count;
    }
    return out;
}

std::string_view to_string(Phase phase) {
    switch (phase) {
    case Phase::PostSearch: return "post_search";
    case Phase::PostRead: return "post_read";
    case Phase::PreFinal: return "pre_final";
    }
    return "post_search";
}

bool condition_holds(const std::string& condition, const StepContext& ctx) {
    if (condition == "search_empty") return ctx.empty_results;
    if (condition == "no_read_yet") return ctx.read_count == 0;
    if (condition == "has_case_analysis") return text::to_lower(ctx.thought).find("case") != std::string::npos;
    if (condition == "contradictory_sources") return ctx.contradictory_sources;
    if (condition == "multi_part_question") return text::is_multi_part(ctx.question);
    if (condition == "low_step_count") return ctx.step_count < 3;
    return false;
}

std::vector<PhaseLine> render_phase_instructions(Phase phase, const StepContext& ctx,
                                                 std::span<const ProgramPtr> skills, int cap) {
    struct Candidate {
        double rank;
        std::string id;
        std::string text;
    };
    std::vector<Candidate> eligible;
    const std::string key(to_string(phase));
    for (const auto& skill : skills) {
        auto it = skill->phase_instructions.find(key);
        if (it == skill->phase_instructions.end() || !it->second.text || it->second.text->empty()) continue;
        const auto& conds = it->second.conditions;
        if (!std::all_of(conds.begin(), conds.end(), [&](const std::string& c) { return condition_holds(c, ctx); }))
            continue;
        eligible.push_back({skill->priority + it->second.priority_boost, skill->base_id, *it->second.text});
    }
    std::stable_sort(eligible.begin(), eligible.end(), [](const Candidate& a, const Candidate& b) {
        if (a.rank != b.rank) return a.rank > b.rank;
        return a.id < b.id;
    });
    std::vector<PhaseLine> out;
    for (const auto& c : eligible) {
        if (static_cast<int>(out.size()) >= cap) break;
        out.push_back({c.id, c.text});
    }
    return out;
}

}  // namespace skillrt
