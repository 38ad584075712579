#include "skillrt/rule_engine/parser.hpp"

#include "skillrt/errors.hpp"

#include <cctype>
#include <map>

namespace skillrt::rules {
namespace {

enum class Tok { Ident, Number, String, Op, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    std::size_t pos = 0;
};

const std::set<std::string> kKeywords = {
    "activate", "intervene", "handler", "when", "otherwise", "noop",  "modify", "inject",
    "delegate", "as",        "fallback", "reason", "and",    "or",    "not",    "in",
    "true",     "false",     "SEARCH",  "READ",   "FINAL"};

const std::map<std::string, std::size_t> kArity = {
    {"contains", 2}, {"word_count", 1},   {"token_jaccard_with_last_query", 1},
    {"fires", 1},    {"len", 1},          {"lower", 1},
    {"starts_with", 2}, {"is_multi_hop", 1}, {"is_multi_part", 1}};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        Token t;
        t.pos = i;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.') {
                ++j;
                if (j >= src.size() || !std::isdigit(static_cast<unsigned char>(src[j])))
                    throw SyntaxError("malformed number", i);
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            t.kind = Tok::Number;
            t.text = std::string(src.substr(i, j - i));
            t.number = std::stod(t.text);
            i = j;
        } else if (c == '"') {
            std::string value;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < src.size()) {
                if (src[j] == '\\' && j + 1 < src.size()) {
                    const char e = src[j + 1];
                    value.push_back(e == 'n' ? '\n' : e);
                    j += 2;
                } else if (src[j] == '"') {
                    closed = true;
                    ++j;
                    break;
                } else {
                    value.push_back(src[j++]);
                }
            }
            if (!closed) throw SyntaxError("unterminated string", i);
            t.kind = Tok::String;
            t.text = std::move(value);
            i = j;
        } else {
            static const std::pair<std::string_view, std::string_view> kOps[] = {
                {"=>", "=>"}, {"==", "="}, {"!=", "!="}, {"<=", "<="}, {">=", ">="},
                {"\xE2\x89\xA0", "!="}, {"\xE2\x89\xA4", "<="}, {"\xE2\x89\xA5", ">="},
                {"=", "="},   {"<", "<"},  {">", ">"},   {"(", "("},   {")", ")"},
                {"{", "{"},   {"}", "}"},  {",", ","},   {":", ":"},   {"+", "+"}, {"-", "-"}};
            bool matched = false;
            for (const auto& [spelling, canonical] : kOps) {
                if (src.substr(i).starts_with(spelling)) {
                    t.kind = Tok::Op;
                    t.text = std::string(canonical);
                    i += spelling.size();
                    matched = true;
                    break;
                }
            }
            if (!matched) throw SyntaxError(std::string("unexpected character '") + c + "'", i);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.pos = src.size();
    out.push_back(end);
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    RuleAst parse() {
        RuleAst ast;
        bool seen_activate = false;
        while (peek().kind != Tok::End) {
            const Token& head = peek();
            if (head.kind != Tok::Ident) throw SyntaxError("expected section name", head.pos);
            const std::string section = head.text;
            if (section != "activate" && section != "intervene" && section != "handler")
                throw SyntaxError("unknown section '" + section + "'", head.pos);
            advance();
            expect_op(":");
            if (section == "activate") {
                if (seen_activate) throw SyntaxError("duplicate activate section", head.pos);
                seen_activate = true;
                ast.activate = parse_expr();
            } else if (section == "intervene") {
                if (ast.has_intervene_section) throw SyntaxError("duplicate intervene section", head.pos);
                ast.has_intervene_section = true;
                while (is_ident("when") || is_ident("otherwise")) ast.branches.push_back(parse_branch());
            } else {
                if (ast.handler) throw SyntaxError("duplicate handler section", head.pos);
                HandlerRule h;
                h.objects = parse_expr();
                expect_op("=>");
                const std::size_t at = peek().pos;
                h.override_action = parse_template(false);
                if (h.override_action.kind != InterventionKind::ModifyAction ||
                    h.override_action.new_action_type != ActionType::Search)
                    throw SyntaxError("handler override must be a modify to SEARCH", at);
                ast.handler = std::move(h);
            }
        }
        ast.declared_fields = std::move(fields_);
        ast.node_count = nodes_;
        return ast;
    }

private:
    const Token& peek() const { return toks_[idx_]; }
    const Token& advance() { return toks_[idx_ < toks_.size() - 1 ? idx_++ : idx_]; }
    bool is_ident(std::string_view text) const { return peek().kind == Tok::Ident && peek().text == text; }
    bool is_op(std::string_view text) const { return peek().kind == Tok::Op && peek().text == text; }

    void expect_op(std::string_view text) {
        if (!is_op(text)) throw SyntaxError("expected '" + std::string(text) + "'", peek().pos);
        advance();
    }
    void expect_ident(std::string_view text) {
        if (!is_ident(text)) throw SyntaxError("expected '" + std::string(text) + "'", peek().pos);
        advance();
    }

    std::shared_ptr<Expr> node(Expr::Kind kind, std::size_t pos) {
        if (++nodes_ > kMaxExpressionNodes)
            throw SyntaxError("expression exceeds " + std::to_string(kMaxExpressionNodes) + " nodes", pos);
        auto e = std::make_shared<Expr>();
        e->kind = kind;
        e->position = pos;
        return e;
    }

    Branch parse_branch() {
        Branch b;
        if (is_ident("when")) {
            advance();
            b.guard = parse_expr();
        } else {
            expect_ident("otherwise");
        }
        expect_op("=>");
        b.action = parse_template(true);
        return b;
    }

    std::optional<std::string> optional_string() {
        if (peek().kind != Tok::String) return std::nullopt;
        return advance().text;
    }

    std::string optional_reason() {
        if (!is_ident("reason")) return {};
        advance();
        if (peek().kind != Tok::String) throw SyntaxError("expected reason string", peek().pos);
        return advance().text;
    }

    InterventionTemplate parse_template(bool allow_delegate) {
        InterventionTemplate t;
        const Token& head = peek();
        if (head.kind != Tok::Ident) throw SyntaxError("expected intervention", head.pos);
        if (head.text == "noop") {
            advance();
            t.kind = InterventionKind::Noop;
            t.reason = optional_reason();
        } else if (head.text == "modify") {
            advance();
            t.kind = InterventionKind::ModifyAction;
            if (peek().kind == Tok::Ident) {
                if (auto type = parse_action_type(peek().text)) {
                    t.new_action_type = type;
                    advance();
                }
            }
            t.arg_template = optional_string();
            t.reason = optional_reason();
        } else if (head.text == "inject") {
            advance();
            t.kind = InterventionKind::InjectContext;
            t.context_template = optional_string();
            t.reason = optional_reason();
        } else if (head.text == "delegate") {
            if (!allow_delegate) throw SyntaxError("delegate is not allowed here", head.pos);
            advance();
            if (peek().kind != Tok::Ident || kKeywords.count(peek().text))
                throw SyntaxError("expected teacher purpose", peek().pos);
            t.teacher_purpose = advance().text;
            expect_ident("as");
            auto inner = std::make_shared<InterventionTemplate>(parse_template(false));
            if (is_ident("fallback")) {
                advance();
                t.fallback = std::make_shared<InterventionTemplate>(parse_template(false));
            }
            t.delegate_to_teacher = true;
            t.kind = inner->kind;
            t.reason = inner->reason;
            t.delegated = std::move(inner);
        } else {
            throw SyntaxError("unknown intervention '" + head.text + "'", head.pos);
        }
        return t;
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        auto lhs = parse_and();
        while (is_ident("or")) {
            const std::size_t pos = advance().pos;
            auto e = node(Expr::Kind::Or, pos);
            e->args = {lhs, parse_and()};
            lhs = e;
        }
        return lhs;
    }

    ExprPtr parse_and() {
        auto lhs = parse_not();
        while (is_ident("and")) {
            const std::size_t pos = advance().pos;
            auto e = node(Expr::Kind::And, pos);
            e->args = {lhs, parse_not()};
            lhs = e;
        }
        return lhs;
    }

    ExprPtr parse_not() {
        if (is_ident("not")) {
            const std::size_t pos = advance().pos;
            auto e = node(Expr::Kind::Not, pos);
            e->args = {parse_not()};
            return e;
        }
        return parse_compare();
    }

    ExprPtr parse_compare() {
        auto lhs = parse_add();
        static const std::map<std::string, CmpOp> kCmp = {{"=", CmpOp::Eq}, {"!=", CmpOp::Ne},
                                                          {"<", CmpOp::Lt}, {"<=", CmpOp::Le},
                                                          {">", CmpOp::Gt}, {">=", CmpOp::Ge}};
        if (peek().kind == Tok::Op) {
            auto it = kCmp.find(peek().text);
            if (it != kCmp.end()) {
                const std::size_t pos = advance().pos;
                auto e = node(Expr::Kind::Compare, pos);
                e->cmp = it->second;
                e->args = {lhs, parse_add()};
                return e;
            }
        }
        bool negated = false;
        std::size_t pos = peek().pos;
        if (is_ident("not") && idx_ + 1 < toks_.size() && toks_[idx_ + 1].kind == Tok::Ident &&
            toks_[idx_ + 1].text == "in") {
            advance();
            negated = true;
        }
        if (is_ident("in")) {
            advance();
            auto e = node(Expr::Kind::In, pos);
            e->args = {lhs};
            expect_op("{");
            if (!is_op("}")) {
                e->set_items.push_back(parse_set_literal());
                while (is_op(",")) {
                    advance();
                    e->set_items.push_back(parse_set_literal());
                }
            }
            expect_op("}");
            if (!negated) return e;
            auto n = node(Expr::Kind::Not, pos);
            n->args = {e};
            return n;
        }
        if (negated) throw SyntaxError("expected 'in'", peek().pos);
        return lhs;
    }

    Value parse_set_literal() {
        const Token& t = peek();
        if (is_op("-")) {
            advance();
            if (peek().kind != Tok::Number) throw SyntaxError("expected number", peek().pos);
            return -advance().number;
        }
        if (t.kind == Tok::Number) return advance().number;
        if (t.kind == Tok::String) return advance().text;
        if (t.kind == Tok::Ident) {
            if (t.text == "true" || t.text == "false") return advance().text == "true";
            if (auto type = parse_action_type(t.text)) {
                advance();
                return *type;
            }
        }
        throw SyntaxError("expected literal in set", t.pos);
    }

    ExprPtr parse_add() {
        auto lhs = parse_unary();
        while (is_op("+") || is_op("-")) {
            const Token& op = advance();
            auto e = node(op.text == "+" ? Expr::Kind::Add : Expr::Kind::Sub, op.pos);
            e->args = {lhs, parse_unary()};
            lhs = e;
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (is_op("-")) {
            const std::size_t pos = advance().pos;
            auto e = node(Expr::Kind::Neg, pos);
            e->args = {parse_unary()};
            return e;
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        const Token t = peek();
        switch (t.kind) {
        case Tok::End: throw SyntaxError("expected expression", t.pos);
        case Tok::Number: {
            advance();
            auto e = node(Expr::Kind::Literal, t.pos);
            e->literal = t.number;
            return e;
        }
        case Tok::String: {
            advance();
            auto e = node(Expr::Kind::Literal, t.pos);
            e->literal = t.text;
            return e;
        }
        case Tok::Op: {
            if (t.text != "(") throw SyntaxError("expected expression", t.pos);
            advance();
            auto inner = parse_expr();
            expect_op(")");
            return inner;
        }
        case Tok::Ident: break;
        }
        if (t.text == "true" || t.text == "false") {
            advance();
            auto e = node(Expr::Kind::Literal, t.pos);
            e->literal = (t.text == "true");
            return e;
        }
        if (auto type = parse_action_type(t.text)) {
            advance();
            auto e = node(Expr::Kind::Literal, t.pos);
            e->literal = *type;
            return e;
        }
        if (kKeywords.count(t.text)) throw SyntaxError("expected expression", t.pos);
        advance();
        if (is_op("(")) return parse_call(t);
        std::string name = t.text;
        if (name.starts_with("ctx.")) name = name.substr(4);
        if (!field_vocabulary().count(name)) throw UnknownField(t.text);
        fields_.insert(name);
        auto e = node(Expr::Kind::Field, t.pos);
        e->name = name;
        return e;
    }

    ExprPtr parse_call(const Token& fn) {
        auto arity = kArity.find(fn.text);
        if (arity == kArity.end()) throw UnknownFunction(fn.text);
        expect_op("(");
        auto e = node(Expr::Kind::Call, fn.pos);
        e->name = fn.text;
        if (fn.text == "fires") {
            const Token& arg = peek();
            if (arg.kind != Tok::Ident && arg.kind != Tok::String)
                throw SyntaxError("fires() takes a skill id", arg.pos);
            auto lit = node(Expr::Kind::Literal, arg.pos);
            lit->literal = arg.text;
            advance();
            e->args.push_back(lit);
        } else if (!is_op(")")) {
            e->args.push_back(parse_expr());
            while (is_op(",")) {
                advance();
                e->args.push_back(parse_expr());
            }
        }
        expect_op(")");
        if (e->args.size() != arity->second)
            throw SyntaxError(fn.text + "() takes " + std::to_string(arity->second) + " argument(s)", fn.pos);
        return e;
    }

    std::vector<Token> toks_;
    std::size_t idx_ = 0;
    std::size_t nodes_ = 0;
    std::set<std::string> fields_;
};

}  // namespace

const std::set<std::string>& field_vocabulary() {
    static const std::set<std::string> fields = {
        "question",        "step_count",        "has_read",     "search_count",
        "read_count",      "empty_results",     "contradictory_sources",
        "max_steps",       "action_history",    "last_search_results_text",
        "all_read_contents", "thought",         "final_override_count",
        "last_query",      "action",            "arg"};
    return fields;
}

const std::set<std::string>& function_vocabulary() {
    static const std::set<std::string> names = [] {
        std::set<std::string> s;
        for (const auto& [name, arity] : kArity) s.insert(name);
        return s;
    }();
    return names;
}

RuleAst parse_rule(std::string_view source) { return Parser(lex(source)).parse(); }

std::optional<std::string> extract_rule_block(std::string_view markdown) {
    std::size_t pos = 0;
    while (pos <= markdown.size()) {
        std::size_t eol = markdown.find('\n', pos);
        if (eol == std::string_view::npos) eol = markdown.size();
        std::string_view line = markdown.substr(pos, eol - pos);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
        if (line == "```rule") {
            const std::size_t body = eol + 1;
            std::size_t scan = body;
            while (scan < markdown.size()) {
                std::size_t end = markdown.find('\n', scan);
                if (end == std::string_view::npos) end = markdown.size();
                std::string_view l = markdown.substr(scan, end - scan);
                while (!l.empty() && (l.back() == '\r' || l.back() == ' ')) l.remove_suffix(1);
                if (l == "```") return std::string(markdown.substr(body, scan - body));
                scan = end + 1;
            }
            return std::nullopt;
        }
        pos = eol + 1;
    }
    return std::nullopt;
}

}  // namespace skillrt::rules
