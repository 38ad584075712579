#pragma once

#include "skillrt/ports.hpp"
#include "skillrt/rule_engine/ast.hpp"
#include "skillrt/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace skillrt::rules {

struct Evaluation {
    Intervention intervention;
    bool activated = false;
    std::vector<std::string> diagnostics;
};

// Evaluates activate, then the first matching branch. Type errors and
// unresolved placeholders never throw: they surface as diagnostics and a noop.
Evaluation evaluate(const RuleAst& ast, const std::string& skill_id, const StepContext& ctx,
                    const ActionProposal& proposal, TeacherPort* teacher = nullptr);

// Result of evaluating only the activation predicate.
struct Activation {
    bool active = false;
    std::vector<std::string> diagnostics;
};
Activation evaluate_activation(const RuleAst& ast, const StepContext& ctx, const ActionProposal& proposal);

// Handler verify: a reason string when the handler objects to FINAL(final_arg).
std::optional<std::string> handler_objection(const HandlerRule& handler, const std::string& skill_id,
                                             const StepContext& ctx, const std::string& final_arg);

// The override SEARCH a handler proposes when the vote passes.
ActionProposal handler_override(const HandlerRule& handler, const StepContext& ctx, const std::string& final_arg);

// Substitutes {name} placeholders. Returns nullopt and appends a diagnostic
// when a placeholder cannot be resolved.
std::optional<std::string> render_template(const std::string& text, const StepContext& ctx,
                                           const ActionProposal& proposal,
                                           const std::optional<std::string>& teacher_reply,
                                           std::vector<std::string>& diagnostics);

// Teacher reply accepted for a purpose, cleaned; nullopt when unusable.
std::optional<std::string> accept_teacher_reply(const std::string& purpose, const std::string& reply);

}  // namespace skillrt::rules
