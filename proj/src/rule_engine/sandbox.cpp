#include "skillrt/rule_engine/sandbox.hpp"

#include "skillrt/errors.hpp"
#include "skillrt/rule_engine/evaluator.hpp"
#include "skillrt/rule_engine/parser.hpp"
#include "skillrt/skill_store/skill_doc.hpp"

namespace skillrt::rules {
namespace {

constexpr const char* kMockQuestion =
    "Which river flows through the capital of the country that hosted the 2016 Summer Olympics?";
constexpr const char* kMockQuery = "country that hosted the 2016 Summer Olympics";

const std::vector<std::string> kCandidateKeys = {"skill_id", "name", "error_category", "applicable_phases"};

}  // namespace

std::array<StepContext, 3> canonical_mock_contexts() {
    StepContext base;
    base.question = kMockQuestion;
    base.max_steps = 15;

    StepContext a = base;
    a.step_count = 1;
    a.search_count = 1;
    a.action_history = {{ActionType::Search, kMockQuery}};
    a.last_search_results_text = "doc_0: The 2016 Summer Olympics were held in Rio de Janeiro, Brazil.";

    StepContext b = base;
    b.step_count = 5;
    b.search_count = 3;
    b.read_count = 2;
    b.has_read = true;
    b.all_read_contents = {"Brasilia is the capital of Brazil.", "The Paranoa river borders Brasilia."};
    b.action_history = {{ActionType::Search, kMockQuery},
                        {ActionType::Read, "doc_0"},
                        {ActionType::Search, "capital of Brazil"},
                        {ActionType::Read, "doc_0"},
                        {ActionType::Search, "river Brasilia"}};
    b.last_search_results_text = "doc_0: Lake Paranoa and the Paranoa river.";

    StepContext c = base;
    c.step_count = 12;
    c.search_count = 12;
    c.empty_results = true;
    c.contradictory_sources = true;
    for (int i = 0; i < 12; ++i) c.action_history.emplace_back(ActionType::Search, kMockQuery);

    return {a, b, c};
}

ActionProposal mock_proposal(ActionType type) {
    switch (type) {
    case ActionType::Search: return {ActionType::Search, kMockQuery};
    case ActionType::Read: return {ActionType::Read, "doc_0"};
    case ActionType::Final: return {ActionType::Final, "Paranoa river"};
    }
    return {};
}

ExecReport validate_candidate(const CandidateSkill& cand) {
    ExecReport report;
    auto finish = [&report] {
        report.q_exec = report.passed() / 4.0;
        return report;
    };

    std::string source = cand.rule_source;
    std::optional<SkillDoc> doc;
    try {
        doc = split_skill_doc(cand.doc_text);
    } catch (const SkillDocError& e) {
        report.diagnostics.push_back(std::string("document: ") + e.what());
    }
    if (source.empty()) {
        if (auto block = extract_rule_block(doc ? doc->body : cand.doc_text)) source = *block;
    }

    // 1. syntax
    RuleAst ast;
    if (source.empty()) {
        report.diagnostics.push_back("syntax: no rule source");
        return finish();
    }
    try {
        ast = parse_rule(source);
    } catch (const RuleParseError& e) {
        report.diagnostics.push_back(std::string("syntax: ") + e.what());
        return finish();
    }
    report.syntax_ok = true;

    // 2. interface
    bool iface = true;
    if (!ast.activate) {
        report.diagnostics.push_back("interface: missing activate section");
        iface = false;
    }
    if (ast.branches.empty()) {
        report.diagnostics.push_back("interface: no intervene branch");
        iface = false;
    }
    if (!doc) {
        report.diagnostics.push_back("interface: document has no readable metadata block");
        iface = false;
    } else {
        for (const auto& key : kCandidateKeys) {
            auto it = doc->frontmatter.find(key);
            if (it == doc->frontmatter.end() || it->is_null()) {
                report.diagnostics.push_back("interface: missing frontmatter key '" + key + "'");
                iface = false;
            }
        }
    }
    if (!iface) return finish();
    report.interface_ok = true;

    // 3. mock execution
    const std::string skill_id = cand.base_id.empty() ? "candidate" : cand.base_id;
    std::vector<Intervention> produced;
    bool clean = true;
    for (const auto& ctx : canonical_mock_contexts()) {
        for (ActionType type : {ActionType::Search, ActionType::Read, ActionType::Final}) {
            const Evaluation ev = evaluate(ast, skill_id, ctx, mock_proposal(type), nullptr);
            ++report.invocations_run;
            for (const auto& d : ev.diagnostics) {
                report.diagnostics.push_back("mock_exec [step " + std::to_string(ctx.step_count) + ", " +
                                             std::string(to_string(type)) + "]: " + d);
                clean = false;
            }
            produced.push_back(ev.intervention);
        }
    }
    if (!clean) return finish();
    report.mock_exec_ok = true;

    // 4. return type
    bool shapes = true;
    for (const auto& iv : produced) {
        if (!well_formed(iv)) {
            report.diagnostics.push_back("return_type: produced malformed " + std::string(to_string(iv.kind)));
            shapes = false;
        }
    }
    for (std::size_t i = 0; i < ast.branches.size(); ++i) {
        for (const auto& p : template_problems(ast.branches[i].action)) {
            report.diagnostics.push_back("return_type: branch " + std::to_string(i + 1) + ": " + p);
            shapes = false;
        }
    }
    if (ast.handler)
        for (const auto& p : template_problems(ast.handler->override_action)) {
            report.diagnostics.push_back("return_type: handler: " + p);
            shapes = false;
        }
    report.return_type_ok = shapes;
    return finish();
}

}  // namespace skillrt::rules
