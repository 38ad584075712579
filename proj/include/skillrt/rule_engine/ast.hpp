#pragma once

#include "skillrt/types.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace skillrt::rules {

// Runtime value of a rule expression.
using Value = std::variant<bool, double, std::string, ActionType, std::vector<std::string>>;

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Literal, Field, Call, Not, And, Or, Compare, In, Add, Sub, Neg };

    Kind kind = Kind::Literal;
    Value literal;                // Literal
    std::string name;             // Field (canonical name) or Call (function name)
    CmpOp cmp = CmpOp::Eq;        // Compare
    std::vector<ExprPtr> args;    // operands, call arguments
    std::vector<Value> set_items; // In
    std::size_t position = 0;     // source offset for diagnostics
};

struct InterventionTemplate {
    InterventionKind kind = InterventionKind::Noop;
    std::optional<ActionType> new_action_type;
    std::optional<std::string> arg_template;
    std::optional<std::string> context_template;
    std::string reason;
    bool delegate_to_teacher = false;
    std::string teacher_purpose;
    std::shared_ptr<const InterventionTemplate> delegated;  // used when the teacher replies
    std::shared_ptr<const InterventionTemplate> fallback;   // used otherwise
};

struct Branch {
    ExprPtr guard;  // null for `otherwise`
    InterventionTemplate action;
};

// FINAL-time verifier: a true predicate is an objection, and the template
// (a modify to SEARCH) is the override proposed when the vote passes.
struct HandlerRule {
    ExprPtr objects;
    InterventionTemplate override_action;
};

struct RuleAst {
    ExprPtr activate;  // null when the section is absent
    std::vector<Branch> branches;
    std::optional<HandlerRule> handler;
    std::set<std::string> declared_fields;
    std::size_t node_count = 0;
    bool has_intervene_section = false;
};

// Problems found by the template invariant check, empty when the template is sound.
std::vector<std::string> template_problems(const InterventionTemplate& t);

// True when no branch can rewrite the action and every injected text is constant.
bool is_prompt_equivalent(const RuleAst& ast);

bool uses_teacher(const RuleAst& ast);

}  // namespace skillrt::rules
