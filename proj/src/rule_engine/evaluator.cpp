#include "skillrt/rule_engine/evaluator.hpp"

#include "skillrt/failure_miner/text_metrics.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace skillrt::rules {
namespace {

struct TypeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string type_name(const Value& v) {
    switch (v.index()) {
    case 0: return "bool";
    case 1: return "number";
    case 2: return "string";
    case 3: return "action";
    default: return "list";
    }
}

struct Scope {
    const StepContext& ctx;
    const ActionProposal& proposal;
};

Value field_value(const std::string& name, const Scope& s) {
    const StepContext& c = s.ctx;
    if (name == "question") return c.question;
    if (name == "step_count") return static_cast<double>(c.step_count);
    if (name == "has_read") return c.has_read;
    if (name == "search_count") return static_cast<double>(c.search_count);
    if (name == "read_count") return static_cast<double>(c.read_count);
    if (name == "empty_results") return c.empty_results;
    if (name == "contradictory_sources") return c.contradictory_sources;
    if (name == "max_steps") return static_cast<double>(c.max_steps);
    if (name == "last_search_results_text") return c.last_search_results_text;
    if (name == "all_read_contents") return c.all_read_contents;
    if (name == "thought") return c.thought;
    if (name == "final_override_count") return static_cast<double>(c.final_override_count);
    if (name == "last_query") return last_query(c);
    if (name == "action") return s.proposal.type;
    if (name == "arg") return s.proposal.arg;
    if (name == "action_history") {
        std::vector<std::string> out;
        for (const auto& [type, arg] : c.action_history) out.push_back(describe({type, arg}));
        return out;
    }
    throw TypeMismatch("unknown field " + name);
}

Value eval(const Expr& e, const Scope& s);

bool as_bool(const Value& v, const char* where) {
    if (auto b = std::get_if<bool>(&v)) return *b;
    throw TypeMismatch(std::string(where) + " expects bool, got " + type_name(v));
}
double as_number(const Value& v, const char* where) {
    if (auto d = std::get_if<double>(&v)) return *d;
    throw TypeMismatch(std::string(where) + " expects number, got " + type_name(v));
}
const std::string& as_string(const Value& v, const char* where) {
    if (auto str = std::get_if<std::string>(&v)) return *str;
    throw TypeMismatch(std::string(where) + " expects string, got " + type_name(v));
}

bool contains_ci(const std::string& hay, const std::string& needle) {
    return text::to_lower(hay).find(text::to_lower(needle)) != std::string::npos;
}

bool values_equal(const Value& a, const Value& b) {
    if (a.index() != b.index()) throw TypeMismatch("cannot compare " + type_name(a) + " with " + type_name(b));
    if (a.index() == 4) throw TypeMismatch("lists are not comparable");
    return a == b;
}

bool compare(CmpOp op, const Value& a, const Value& b) {
    if (op == CmpOp::Eq) return values_equal(a, b);
    if (op == CmpOp::Ne) return !values_equal(a, b);
    if (a.index() != b.index()) throw TypeMismatch("cannot order " + type_name(a) + " against " + type_name(b));
    auto order = [op](const auto& x, const auto& y) {
        switch (op) {
        case CmpOp::Lt: return x < y;
        case CmpOp::Le: return x <= y;
        case CmpOp::Gt: return x > y;
        case CmpOp::Ge: return x >= y;
        default: return false;
        }
    };
    if (auto x = std::get_if<double>(&a)) return order(*x, std::get<double>(b));
    if (auto x = std::get_if<std::string>(&a)) return order(*x, std::get<std::string>(b));
    throw TypeMismatch("values of type " + type_name(a) + " are not ordered");
}

Value call(const Expr& e, const Scope& s) {
    const std::string& fn = e.name;
    if (fn == "fires") {
        const auto& id = std::get<std::string>(e.args[0]->literal);
        auto it = s.ctx.fire_counters.find(id);
        return static_cast<double>(it == s.ctx.fire_counters.end() ? 0 : it->second);
    }
    std::vector<Value> args;
    args.reserve(e.args.size());
    for (const auto& a : e.args) args.push_back(eval(*a, s));
    if (fn == "contains") {
        const std::string& needle = as_string(args[1], "contains()");
        if (auto list = std::get_if<std::vector<std::string>>(&args[0])) {
            for (const auto& item : *list)
                if (contains_ci(item, needle)) return true;
            return false;
        }
        return contains_ci(as_string(args[0], "contains()"), needle);
    }
    if (fn == "word_count") return static_cast<double>(text::word_count(as_string(args[0], "word_count()")));
    if (fn == "token_jaccard_with_last_query") {
        const std::string& text_arg = as_string(args[0], "token_jaccard_with_last_query()");
        const std::string last = last_query(s.ctx);
        if (last.empty()) return 0.0;
        return text::token_jaccard(text_arg, last);
    }
    if (fn == "len") {
        if (auto list = std::get_if<std::vector<std::string>>(&args[0])) return static_cast<double>(list->size());
        return static_cast<double>(as_string(args[0], "len()").size());
    }
    if (fn == "lower") return text::to_lower(as_string(args[0], "lower()"));
    if (fn == "starts_with") {
        return text::to_lower(as_string(args[0], "starts_with()"))
            .starts_with(text::to_lower(as_string(args[1], "starts_with()")));
    }
    if (fn == "is_multi_hop") return text::is_multi_hop(as_string(args[0], "is_multi_hop()"));
    if (fn == "is_multi_part") return text::is_multi_part(as_string(args[0], "is_multi_part()"));
    throw TypeMismatch("unknown function " + fn);
}

Value eval(const Expr& e, const Scope& s) {
    switch (e.kind) {
    case Expr::Kind::Literal: return e.literal;
    case Expr::Kind::Field: return field_value(e.name, s);
    case Expr::Kind::Call: return call(e, s);
    case Expr::Kind::Not: return !as_bool(eval(*e.args[0], s), "not");
    case Expr::Kind::And:
        return as_bool(eval(*e.args[0], s), "and") && as_bool(eval(*e.args[1], s), "and");
    case Expr::Kind::Or:
        return as_bool(eval(*e.args[0], s), "or") || as_bool(eval(*e.args[1], s), "or");
    case Expr::Kind::Compare: return compare(e.cmp, eval(*e.args[0], s), eval(*e.args[1], s));
    case Expr::Kind::In: {
        const Value lhs = eval(*e.args[0], s);
        for (const auto& item : e.set_items)
            if (values_equal(lhs, item)) return true;
        return false;
    }
    case Expr::Kind::Add: return as_number(eval(*e.args[0], s), "+") + as_number(eval(*e.args[1], s), "+");
    case Expr::Kind::Sub: return as_number(eval(*e.args[0], s), "-") - as_number(eval(*e.args[1], s), "-");
    case Expr::Kind::Neg: return -as_number(eval(*e.args[0], s), "-");
    }
    throw TypeMismatch("unsupported expression");
}

// Evaluates a predicate; a type error yields false plus a diagnostic.
bool predicate(const Expr& e, const Scope& s, std::vector<std::string>& diagnostics) {
    try {
        return as_bool(eval(e, s), "predicate");
    } catch (const TypeMismatch& err) {
        diagnostics.push_back("type error at offset " + std::to_string(e.position) + ": " + err.what());
        return false;
    } catch (const std::bad_variant_access&) {
        diagnostics.push_back("type error at offset " + std::to_string(e.position));
        return false;
    }
}

std::string format_number(int n) { return std::to_string(n); }

Intervention noop(const std::string& skill_id, std::string reason) {
    Intervention iv;
    iv.skill_id = skill_id;
    iv.reason = std::move(reason);
    return iv;
}

std::optional<Intervention> instantiate(const InterventionTemplate& t, const std::string& skill_id,
                                        const StepContext& ctx, const ActionProposal& proposal,
                                        const std::optional<std::string>& teacher_reply,
                                        std::vector<std::string>& diagnostics) {
    Intervention iv;
    iv.kind = t.kind;
    iv.skill_id = skill_id;
    iv.reason = t.reason;
    iv.new_action_type = t.new_action_type;
    if (t.arg_template) {
        auto arg = render_template(*t.arg_template, ctx, proposal, teacher_reply, diagnostics);
        if (!arg) return std::nullopt;
        iv.new_action_arg = std::move(arg);
    }
    if (t.context_template) {
        auto text_value = render_template(*t.context_template, ctx, proposal, teacher_reply, diagnostics);
        if (!text_value) return std::nullopt;
        iv.context_text = std::move(*text_value);
    }
    return iv;
}

}  // namespace

std::optional<std::string> render_template(const std::string& text, const StepContext& ctx,
                                           const ActionProposal& proposal,
                                           const std::optional<std::string>& teacher_reply,
                                           std::vector<std::string>& diagnostics) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '{' && i + 1 < text.size() && text[i + 1] == '{') {
            out.push_back('{');
            i += 2;
            continue;
        }
        if (c == '}' && i + 1 < text.size() && text[i + 1] == '}') {
            out.push_back('}');
            i += 2;
            continue;
        }
        if (c != '{') {
            out.push_back(c);
            ++i;
            continue;
        }
        const std::size_t close = text.find('}', i);
        if (close == std::string::npos) {
            diagnostics.push_back("unterminated placeholder in template");
            return std::nullopt;
        }
        const std::string name = text.substr(i + 1, close - i - 1);
        if (name == "question") out += ctx.question;
        else if (name == "arg") out += proposal.arg;
        else if (name == "arg_short") out += text::smart_shorten(proposal.arg);
        else if (name == "action") out += to_string(proposal.type);
        else if (name == "step_count") out += format_number(ctx.step_count);
        else if (name == "read_count") out += format_number(ctx.read_count);
        else if (name == "search_count") out += format_number(ctx.search_count);
        else if (name == "last_query") out += last_query(ctx);
        else if (name == "teacher" && teacher_reply) out += *teacher_reply;
        else {
            diagnostics.push_back("unresolved placeholder {" + name + "}");
            return std::nullopt;
        }
        i = close + 1;
    }
    return out;
}

std::optional<std::string> accept_teacher_reply(const std::string& purpose, const std::string& reply) {
    auto is_trim = [](char c) {
        return c == '"' || c == '\'' || std::isspace(static_cast<unsigned char>(c)) != 0;
    };
    std::size_t b = 0, e = reply.size();
    while (b < e && is_trim(reply[b])) ++b;
    while (e > b && is_trim(reply[e - 1])) --e;
    std::string clean = reply.substr(b, e - b);
    if (clean.empty()) return std::nullopt;
    if (purpose == "query_rewrite") {
        const int words = text::word_count(clean);
        if (words <= 1 || words > 20) return std::nullopt;
    }
    return clean;
}

Activation evaluate_activation(const RuleAst& ast, const StepContext& ctx, const ActionProposal& proposal) {
    Activation out;
    if (!ast.activate) return out;
    out.active = predicate(*ast.activate, Scope{ctx, proposal}, out.diagnostics);
    return out;
}

Evaluation evaluate(const RuleAst& ast, const std::string& skill_id, const StepContext& ctx,
                    const ActionProposal& proposal, TeacherPort* teacher) {
    Evaluation out;
    auto act = evaluate_activation(ast, ctx, proposal);
    out.diagnostics = std::move(act.diagnostics);
    if (!act.active) {
        out.intervention = noop(skill_id, "not activated");
        return out;
    }
    out.activated = true;
    const Scope scope{ctx, proposal};
    for (const auto& branch : ast.branches) {
        if (branch.guard && !predicate(*branch.guard, scope, out.diagnostics)) continue;
        const InterventionTemplate& t = branch.action;
        std::optional<Intervention> made;
        if (t.delegate_to_teacher) {
            std::optional<std::string> reply;
            if (teacher) {
                TeacherRequest req;
                req.purpose = t.teacher_purpose;
                req.payload = {{"question", ctx.question},
                               {"action", std::string(to_string(proposal.type))},
                               {"arg", proposal.arg.substr(0, 500)},
                               {"step_count", ctx.step_count},
                               {"skill_id", skill_id}};
                if (auto raw = teacher->request(req)) reply = accept_teacher_reply(t.teacher_purpose, *raw);
            }
            if (reply && t.delegated) {
                made = instantiate(*t.delegated, skill_id, ctx, proposal, reply, out.diagnostics);
            } else if (t.fallback) {
                made = instantiate(*t.fallback, skill_id, ctx, proposal, std::nullopt, out.diagnostics);
            } else {
                made = noop(skill_id, "teacher unavailable and no fallback");
            }
        } else {
            made = instantiate(t, skill_id, ctx, proposal, std::nullopt, out.diagnostics);
        }
        out.intervention = made ? std::move(*made) : noop(skill_id, "template could not be rendered");
        return out;
    }
    out.intervention = noop(skill_id, "no branch matched");
    return out;
}

std::optional<std::string> handler_objection(const HandlerRule& handler, const std::string& skill_id,
                                             const StepContext& ctx, const std::string& final_arg) {
    const ActionProposal proposal{ActionType::Final, final_arg};
    std::vector<std::string> diagnostics;
    if (!handler.objects || !predicate(*handler.objects, Scope{ctx, proposal}, diagnostics)) return std::nullopt;
    if (!handler.override_action.reason.empty()) return handler.override_action.reason;
    return skill_id + " objects to FINAL";
}

ActionProposal handler_override(const HandlerRule& handler, const StepContext& ctx, const std::string& final_arg) {
    const ActionProposal proposal{ActionType::Final, final_arg};
    std::vector<std::string> diagnostics;
    ActionProposal out{ActionType::Search, ctx.question};
    if (handler.override_action.arg_template) {
        if (auto arg = render_template(*handler.override_action.arg_template, ctx, proposal, std::nullopt,
                                       diagnostics))
            out.arg = std::move(*arg);
    }
    return out;
}

}  // namespace skillrt::rules
