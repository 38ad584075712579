#include "skillrt/rule_engine/ast.hpp"

namespace skillrt::rules {
namespace {

bool has_placeholder(const std::string& text) { return text.find('{') != std::string::npos; }

bool template_is_constant_inject_or_noop(const InterventionTemplate& t) {
    if (t.delegate_to_teacher) return false;
    if (t.kind == InterventionKind::ModifyAction) return false;
    if (t.kind == InterventionKind::InjectContext)
        return t.context_template.has_value() && !has_placeholder(*t.context_template);
    return true;
}

}  // namespace

std::vector<std::string> template_problems(const InterventionTemplate& t) {
    std::vector<std::string> out;
    if (t.delegate_to_teacher) {
        if (!t.fallback) out.push_back("delegated intervention has no fallback");
        if (t.delegated)
            for (auto& p : template_problems(*t.delegated)) out.push_back("delegated: " + p);
        if (t.fallback)
            for (auto& p : template_problems(*t.fallback)) out.push_back("fallback: " + p);
        return out;
    }
    switch (t.kind) {
    case InterventionKind::Noop:
        if (t.new_action_type || t.arg_template) out.push_back("noop carries an action");
        break;
    case InterventionKind::ModifyAction:
        if (!t.new_action_type) out.push_back("modify has no target action type");
        break;
    case InterventionKind::InjectContext:
        if (!t.context_template || t.context_template->empty()) out.push_back("inject has no context text");
        break;
    }
    return out;
}

bool is_prompt_equivalent(const RuleAst& ast) {
    for (const auto& b : ast.branches)
        if (!template_is_constant_inject_or_noop(b.action)) return false;
    return true;
}

bool uses_teacher(const RuleAst& ast) {
    for (const auto& b : ast.branches)
        if (b.action.delegate_to_teacher) return true;
    return false;
}

}  // namespace skillrt::rules
