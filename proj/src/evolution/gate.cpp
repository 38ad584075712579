#include "skillrt/evolution/evolution.hpp"

#include <cmath>

namespace skillrt {
namespace {

constexpr double kEps = 1e-9;

bool at_least(double value, double bound) { return value + kEps >= bound; }

bool in_unit(const Json& v) { return v.is_number() && v.get<double>() >= 0.0 && v.get<double>() <= 1.0; }

}  // namespace

std::string_view to_string(GateMode mode) { return mode == GateMode::Audit ? "audit" : "strict"; }

std::optional<GateMode> parse_gate_mode(std::string_view text) {
    if (text == "strict") return GateMode::Strict;
    if (text == "audit") return GateMode::Audit;
    return std::nullopt;
}

double composite_q(const ReviewScores& r) {
    return 0.25 * r.concept_score + 0.20 * r.trigger + 0.20 * r.intervene + 0.20 * r.exec_review +
           0.15 * r.validation;
}

Decision decide_admission(double q_exec, double exec_review, double composite, std::optional<Decision> decision_line,
                          bool is_new_group, const GateConfig& g) {
    if (q_exec < 1.0 - kEps) return Decision::Reject;
    if (exec_review < g.eta_exec - kEps) return Decision::Reject;
    const double group_bound = is_new_group ? g.new_group_threshold : g.same_group_threshold;
    if (decision_line) {
        if (*decision_line != Decision::Accept) return *decision_line;
        return at_least(composite, group_bound) ? Decision::Accept : Decision::Revise;
    }
    if (at_least(composite, g.accept_threshold) && at_least(composite, group_bound)) return Decision::Accept;
    if (at_least(composite, g.revise_threshold)) return Decision::Revise;
    return Decision::Reject;
}

Decision decide_admission(const rules::ExecReport& exec, const ReviewScores& r, bool is_new_group,
                          const GateConfig& g) {
    return decide_admission(exec.q_exec, r.exec_review, composite_q(r), r.decision_line, is_new_group, g);
}

double skill_reward(double q_skill, double delta_em_val, double lambda) { return q_skill + lambda * delta_em_val; }

TeacherRequest review_request(const CandidateSkill& cand, const rules::ExecReport& exec) {
    TeacherRequest req;
    req.purpose = "skill_review";
    req.max_tokens = 300;
    req.payload = {{"base_id", cand.base_id},
                   {"doc_text", cand.doc_text},
                   {"rule_source", cand.rule_source},
                   {"origin_category", cand.origin_category},
                   {"is_new_group", cand.is_new_group},
                   {"checks_passed", exec.passed()},
                   {"q_exec", exec.q_exec},
                   {"diagnostics", exec.diagnostics}};
    return req;
}

std::optional<ReviewScores> parse_review(const std::string& reply, std::string& diagnostic) {
    Json j;
    try {
        j = Json::parse(reply);
    } catch (const Json::exception&) {
        diagnostic = "review reply is not JSON";
        return std::nullopt;
    }
    if (!j.is_object()) {
        diagnostic = "review reply is not an object";
        return std::nullopt;
    }
    auto score = [&](std::initializer_list<const char*> keys, double& out) {
        for (const char* key : keys) {
            auto it = j.find(key);
            if (it == j.end()) continue;
            if (!in_unit(*it)) {
                diagnostic = std::string("review score '") + key + "' is not a number in [0,1]";
                return false;
            }
            out = it->get<double>();
            return true;
        }
        diagnostic = std::string("review lacks score '") + *keys.begin() + "'";
        return false;
    };
    ReviewScores r;
    if (!score({"q_concept", "concept"}, r.concept_score) || !score({"q_trigger", "trigger"}, r.trigger) ||
        !score({"q_intervene", "intervene"}, r.intervene) ||
        !score({"q_exec_review", "q_exec", "exec"}, r.exec_review) || !score({"q_val", "validation"}, r.validation))
        return std::nullopt;
    if (auto it = j.find("decision"); it != j.end() && !it->is_null()) {
        if (!it->is_string() || !(r.decision_line = parse_decision(it->get<std::string>()))) {
            diagnostic = "review decision must be ACCEPT, REVISE or REJECT";
            return std::nullopt;
        }
    }
    if (auto it = j.find("feedback"); it != j.end() && it->is_string()) r.feedback = it->get<std::string>();
    return r;
}

}  // namespace skillrt
