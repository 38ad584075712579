#include "skillrt/types.hpp"

namespace skillrt {

std::string_view to_string(ActionType type) {
    switch (type) {
    case ActionType::Search: return "SEARCH";
    case ActionType::Read: return "READ";
    case ActionType::Final: return "FINAL";
    }
    return "SEARCH";
}

std::optional<ActionType> parse_action_type(std::string_view text) {
    if (text == "SEARCH") return ActionType::Search;
    if (text == "READ") return ActionType::Read;
    if (text == "FINAL") return ActionType::Final;
    return std::nullopt;
}

std::string describe(const ActionProposal& action) {
    return std::string(to_string(action.type)) + "(" + action.arg + ")";
}

std::string_view to_string(InterventionKind kind) {
    switch (kind) {
    case InterventionKind::Noop: return "noop";
    case InterventionKind::ModifyAction: return "modify_action";
    case InterventionKind::InjectContext: return "inject_context";
    }
    return "noop";
}

std::optional<InterventionKind> parse_intervention_kind(std::string_view text) {
    if (text == "noop") return InterventionKind::Noop;
    if (text == "modify_action") return InterventionKind::ModifyAction;
    if (text == "inject_context") return InterventionKind::InjectContext;
    return std::nullopt;
}

bool well_formed(const Intervention& iv) {
    switch (iv.kind) {
    case InterventionKind::Noop:
        return !iv.new_action_type && !iv.new_action_arg;
    case InterventionKind::ModifyAction:
        return iv.new_action_type.has_value();
    case InterventionKind::InjectContext:
        return !iv.context_text.empty() && !iv.new_action_type;
    }
    return false;
}

std::string last_query(const StepContext& ctx) {
    for (auto it = ctx.action_history.rbegin(); it != ctx.action_history.rend(); ++it) {
        if (it->first == ActionType::Search) return it->second;
    }
    return {};
}

}  // namespace skillrt
