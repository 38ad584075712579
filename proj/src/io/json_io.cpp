#include "skillrt/io/json_io.hpp"

#include "skillrt/errors.hpp"

#include <fstream>
#include <sstream>

namespace skillrt {
namespace {

ActionType action_type_from(const Json& j) {
    const auto t = parse_action_type(j.get<std::string>());
    if (!t) throw Error("unknown action type '" + j.get<std::string>() + "'");
    return *t;
}

template <class T>
void read_optional(const Json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) it->get_to(out);
}

}  // namespace

void to_json(Json& j, const ActionProposal& a) { j = {{"type", to_string(a.type)}, {"arg", a.arg}}; }

void from_json(const Json& j, ActionProposal& a) {
    a.type = action_type_from(j.at("type"));
    a.arg = j.at("arg").get<std::string>();
}

void to_json(Json& j, const StepContext& c) {
    Json history = Json::array();
    for (const auto& [type, arg] : c.action_history) history.push_back({to_string(type), arg});
    j = {{"question", c.question},
         {"step_count", c.step_count},
         {"has_read", c.has_read},
         {"search_count", c.search_count},
         {"read_count", c.read_count},
         {"empty_results", c.empty_results},
         {"contradictory_sources", c.contradictory_sources},
         {"max_steps", c.max_steps},
         {"action_history", history},
         {"last_search_results_text", c.last_search_results_text},
         {"all_read_contents", c.all_read_contents},
         {"thought", c.thought},
         {"fire_counters", c.fire_counters},
         {"final_override_count", c.final_override_count}};
}

void from_json(const Json& j, StepContext& c) {
    c = StepContext{};
    j.at("question").get_to(c.question);
    j.at("step_count").get_to(c.step_count);
    j.at("has_read").get_to(c.has_read);
    j.at("search_count").get_to(c.search_count);
    j.at("read_count").get_to(c.read_count);
    j.at("empty_results").get_to(c.empty_results);
    j.at("contradictory_sources").get_to(c.contradictory_sources);
    j.at("max_steps").get_to(c.max_steps);
    for (const auto& item : j.at("action_history"))
        c.action_history.emplace_back(action_type_from(item.at(0)), item.at(1).get<std::string>());
    j.at("last_search_results_text").get_to(c.last_search_results_text);
    j.at("all_read_contents").get_to(c.all_read_contents);
    j.at("thought").get_to(c.thought);
    j.at("fire_counters").get_to(c.fire_counters);
    j.at("final_override_count").get_to(c.final_override_count);
}

void to_json(Json& j, const FiredEntry& f) {
    j = {{"skill_id", f.skill_id}, {"kind", to_string(f.kind)}, {"reason", f.reason}, {"effective", f.effective}};
}

void from_json(const Json& j, FiredEntry& f) {
    j.at("skill_id").get_to(f.skill_id);
    const auto kind = parse_intervention_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error("unknown intervention kind in fired entry");
    f.kind = *kind;
    j.at("reason").get_to(f.reason);
    j.at("effective").get_to(f.effective);
}

void to_json(Json& j, const SignalBreakdown& s) {
    j = {{"fine_values", s.fine_values}, {"z", s.z}, {"a_step", s.a_step}};
}

void from_json(const Json& j, SignalBreakdown& s) {
    j.at("fine_values").get_to(s.fine_values);
    j.at("z").get_to(s.z);
    j.at("a_step").get_to(s.a_step);
}

void to_json(Json& j, const StepRecord& s) {
    Json injected = Json::array();
    for (const auto& [id, text] : s.injected_contexts) injected.push_back({{"skill_id", id}, {"text", text}});
    j = {{"step_index", s.step_index},
         {"ctx_snapshot", s.ctx_snapshot},
         {"a_orig", s.a_orig},
         {"a_final", s.a_final},
         {"injected_contexts", injected},
         {"fired", s.fired},
         {"phase_instructions", s.phase_instructions},
         {"observation", s.observation},
         {"was_modified", s.was_modified},
         {"executed", s.executed},
         {"delta_feedback", s.delta_feedback},
         {"signals", s.signals ? Json(*s.signals) : Json(nullptr)}};
}

void from_json(const Json& j, StepRecord& s) {
    s = StepRecord{};
    j.at("step_index").get_to(s.step_index);
    j.at("ctx_snapshot").get_to(s.ctx_snapshot);
    j.at("a_orig").get_to(s.a_orig);
    j.at("a_final").get_to(s.a_final);
    for (const auto& item : j.at("injected_contexts"))
        s.injected_contexts.emplace_back(item.at("skill_id").get<std::string>(), item.at("text").get<std::string>());
    j.at("fired").get_to(s.fired);
    j.at("phase_instructions").get_to(s.phase_instructions);
    j.at("observation").get_to(s.observation);
    j.at("was_modified").get_to(s.was_modified);
    j.at("executed").get_to(s.executed);
    j.at("delta_feedback").get_to(s.delta_feedback);
    if (auto it = j.find("signals"); it != j.end() && !it->is_null()) s.signals = it->get<SignalBreakdown>();
}

void to_json(Json& j, const Trajectory& t) {
    j = {{"id", t.id},
         {"dataset", t.dataset},
         {"question", t.question},
         {"gold_answers", t.gold_answers},
         {"steps", t.steps},
         {"final_answer", t.final_answer ? Json(*t.final_answer) : Json(nullptr)},
         {"em", t.em},
         {"f1", t.f1},
         {"episode_seed", t.episode_seed},
         {"failed", t.failed},
         {"error", t.error}};
}

void from_json(const Json& j, Trajectory& t) {
    t = Trajectory{};
    j.at("id").get_to(t.id);
    j.at("dataset").get_to(t.dataset);
    j.at("question").get_to(t.question);
    j.at("gold_answers").get_to(t.gold_answers);
    j.at("steps").get_to(t.steps);
    if (auto it = j.find("final_answer"); it != j.end() && !it->is_null()) t.final_answer = it->get<std::string>();
    j.at("em").get_to(t.em);
    j.at("f1").get_to(t.f1);
    j.at("episode_seed").get_to(t.episode_seed);
    j.at("failed").get_to(t.failed);
    j.at("error").get_to(t.error);
}

void to_json(Json& j, const FailurePattern& p) {
    j = {{"category", p.category},
         {"abstraction", p.abstraction},
         {"trigger", p.trigger},
         {"intervention_hint", p.intervention_hint},
         {"source_trajectory_id", p.source_trajectory_id},
         {"detector", to_string(p.detector)}};
}

void from_json(const Json& j, FailurePattern& p) {
    j.at("category").get_to(p.category);
    j.at("abstraction").get_to(p.abstraction);
    j.at("trigger").get_to(p.trigger);
    j.at("intervention_hint").get_to(p.intervention_hint);
    j.at("source_trajectory_id").get_to(p.source_trajectory_id);
    p.detector = j.at("detector").get<std::string>() == "llm" ? DetectorKind::Llm : DetectorKind::Heuristic;
}

void to_json(Json& j, const FailureCluster& c) {
    Json members = Json::array();
    for (const auto& m : c.members) members.push_back(m.source_trajectory_id);
    j = {{"representative", c.representative},
         {"member_trajectories", members},
         {"size", c.size},
         {"novelty", c.novelty},
         {"is_new_category", c.is_new_category}};
}

void to_json(Json& j, const ReviewScores& r) {
    j = {{"q_concept", r.concept_score},
         {"q_trigger", r.trigger},
         {"q_intervene", r.intervene},
         {"q_exec_review", r.exec_review},
         {"q_val", r.validation},
         {"decision_line", r.decision_line ? Json(to_string(*r.decision_line)) : Json(nullptr)},
         {"feedback", r.feedback}};
}

void from_json(const Json& j, ReviewScores& r) {
    r = ReviewScores{};
    j.at("q_concept").get_to(r.concept_score);
    j.at("q_trigger").get_to(r.trigger);
    j.at("q_intervene").get_to(r.intervene);
    j.at("q_exec_review").get_to(r.exec_review);
    j.at("q_val").get_to(r.validation);
    if (auto it = j.find("decision_line"); it != j.end() && it->is_string())
        r.decision_line = parse_decision(it->get<std::string>());
    read_optional(j, "feedback", r.feedback);
}

void to_json(Json& j, const CandidateSkill& c) {
    j = {{"base_id", c.base_id},
         {"doc_text", c.doc_text},
         {"rule_source", c.rule_source},
         {"origin_category", c.origin_category},
         {"origin_cluster", c.origin_cluster},
         {"is_new_group", c.is_new_group},
         {"proposer_meta", c.proposer_meta}};
}

void from_json(const Json& j, CandidateSkill& c) {
    c = CandidateSkill{};
    j.at("base_id").get_to(c.base_id);
    j.at("doc_text").get_to(c.doc_text);
    read_optional(j, "rule_source", c.rule_source);
    read_optional(j, "origin_category", c.origin_category);
    read_optional(j, "origin_cluster", c.origin_cluster);
    read_optional(j, "is_new_group", c.is_new_group);
    read_optional(j, "proposer_meta", c.proposer_meta);
}

void to_json(Json& j, const AdmissionEvent& e) {
    j = {{"base_id", e.base_id},
         {"version", e.version},
         {"decision", to_string(e.decision)},
         {"review", e.review ? Json(*e.review) : Json(nullptr)},
         {"exec", e.exec ? Json(*e.exec) : Json(nullptr)},
         {"timestamp", e.timestamp}};
}

namespace rules {

void to_json(Json& j, const ExecReport& r) {
    j = {{"syntax_ok", r.syntax_ok},
         {"interface_ok", r.interface_ok},
         {"mock_exec_ok", r.mock_exec_ok},
         {"return_type_ok", r.return_type_ok},
         {"checks_passed", r.passed()},
         {"invocations_run", r.invocations_run},
         {"q_exec", r.q_exec},
         {"diagnostics", r.diagnostics}};
}

}  // namespace rules

namespace io {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::vector<Json> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            rows.push_back(Json::parse(line));
        } catch (const Json::exception& e) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows) {
    std::string text;
    for (const auto& row : rows) text += row.dump() + "\n";
    write_text(path, text);
}

void write_json(const std::filesystem::path& path, const Json& value) { write_text(path, value.dump(2) + "\n"); }

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path) {
    std::vector<Trajectory> out;
    for (const auto& row : read_jsonl(path)) out.push_back(row.get<Trajectory>());
    return out;
}

void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& trajs) {
    std::vector<Json> rows;
    rows.reserve(trajs.size());
    for (const auto& t : trajs) rows.push_back(t);
    write_jsonl(path, rows);
}

}  // namespace io
}  // namespace skillrt
