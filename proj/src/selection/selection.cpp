#include "skillrt/selection/selection.hpp"

#include "skillrt/failure_miner/text_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace skillrt {
namespace {

std::optional<int> first_digit_score(const std::string& reply) {
    for (char c : reply)
        if (c >= '1' && c <= '5') return c - '0';
    return std::nullopt;
}

std::vector<std::string> parse_id_list(const std::string& reply) {
    std::vector<std::string> ids;
    try {
        const Json j = Json::parse(reply);
        if (j.is_array()) {
            for (const auto& item : j)
                if (item.is_string()) ids.push_back(item.get<std::string>());
            return ids;
        }
    } catch (const Json::exception&) {
    }
    std::string cur;
    auto flush = [&] {
        std::string t;
        for (char c : cur)
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') t.push_back(c);
        if (!t.empty()) ids.push_back(t);
        cur.clear();
    };
    for (char c : reply) {
        if (c == ',' || c == '\n') flush();
        else cur.push_back(c);
    }
    flush();
    return ids;
}

void push_unique(std::vector<std::string>& out, const std::string& id) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
}

bool arms(const LibraryState& lib, const std::string& id, const RunConfig& cfg) {
    const auto p = lib.find(id);
    if (!p || !p->rule) return false;
    return cfg.enable_prompt_only_skills || !p->prompt_equivalent;
}

}  // namespace

int heuristic_difficulty(const std::string& question) {
    int score = 1;
    if (text::word_count(question) > 20) ++score;
    if (text::count_possessives(question) > 0 || text::count_of_the(question) > 0) ++score;
    if (text::has_relative_pronoun_chain(question)) ++score;
    if (text::has_negation(question)) ++score;
    if (text::has_numeric_constraint(question)) ++score;
    return std::min(score, 5);
}

DifficultyResult difficulty_gate(const std::string& question, TeacherPort* teacher, const RunConfig& cfg) {
    DifficultyResult out;
    if (!cfg.enable_difficulty_gating) return out;
    std::optional<int> score;
    if (teacher) {
        TeacherRequest req{"difficulty", {{"question", question}}, 0.0, 8};
        if (auto reply = teacher->request(req)) score = first_digit_score(*reply);
        out.from_teacher = score.has_value();
    }
    out.score = score.value_or(heuristic_difficulty(question));
    out.bypass = out.score < cfg.difficulty_threshold;
    return out;
}

double prompt_rank_score(const SkillProgram& skill, const std::string& question, Mode mode) {
    const std::string mode_name(to_string(mode));
    const double mode_match =
        (skill.applicable_modes.count(mode_name) || skill.applicable_modes.count("all")) ? 1.0 : 0.0;
    double keyword_match = 0.0;
    if (!skill.trigger_keywords.empty()) {
        const auto words = text::token_set(question);
        std::size_t hits = 0;
        for (const auto& k : skill.trigger_keywords) hits += words.count(k);
        keyword_match = static_cast<double>(hits) / static_cast<double>(skill.trigger_keywords.size());
    }
    return 0.5 * mode_match + 0.5 * keyword_match;
}

std::vector<std::string> rank_skills_for_prompt(const LibraryState& lib, const std::string& question, Mode mode,
                                                int cap) {
    struct Scored {
        double score;
        double priority;
        std::string id;
    };
    std::vector<Scored> scored;
    for (const auto& p : lib.active()) scored.push_back({prompt_rank_score(*p, question, mode), p->priority, p->base_id});
    std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.priority != b.priority) return a.priority > b.priority;
        return a.id < b.id;
    });
    std::vector<std::string> out;
    for (const auto& s : scored) {
        if (static_cast<int>(out.size()) >= cap) break;
        out.push_back(s.id);
    }
    return out;
}

QuestionClass classify_question(const std::string& question) {
    if (text::is_computation(question)) return QuestionClass::Computation;
    if (text::is_multi_hop(question)) return QuestionClass::MultiHop;
    return QuestionClass::SimpleFactoid;
}

ActivePFSet select_pfs(const LibraryState& lib, const std::string& question, TeacherPort* teacher,
                       const RunConfig& cfg) {
    ActivePFSet out;
    if (!cfg.enable_program_functions) {
        out.rationale = "program functions disabled";
        return out;
    }
    if (teacher && cfg.teacher_selection) {
        Json candidates = Json::array();
        for (const auto& p : lib.active())
            if (arms(lib, p->base_id, cfg)) candidates.push_back({{"skill_id", p->base_id}, {"summary", p->system_summary}});
        TeacherRequest req{"pf_select", {{"question", question}, {"candidates", candidates}, {"top_k", cfg.pf_top_k}},
                           0.0, 200};
        if (auto reply = teacher->request(req)) {
            const auto ids = parse_id_list(*reply);
            if (!ids.empty()) {
                for (const auto& id : ids) {
                    if (static_cast<int>(out.armed.size()) >= cfg.pf_top_k) break;
                    if (arms(lib, id, cfg)) push_unique(out.armed, id);
                }
                for (const auto& id : kMandatoryPfs)
                    if (arms(lib, id, cfg)) push_unique(out.armed, id);
                out.rationale = "teacher selection plus mandatory set";
                return out;
            }
        }
    }
    std::vector<std::string> wanted(kMandatoryPfs.begin(), kMandatoryPfs.end());
    switch (classify_question(question)) {
    case QuestionClass::Computation: out.rationale = "computation: mandatory set"; break;
    case QuestionClass::MultiHop:
        out.rationale = "multi-hop: mandatory set, decomposition, entity focus, exploration";
        wanted.insert(wanted.end(), {"decompose_complex_question", "wrong_entity_confusion", "insufficient_exploration"});
        break;
    case QuestionClass::SimpleFactoid:
        out.rationale = "simple factoid: mandatory set, completeness";
        wanted.push_back("answer_completeness");
        break;
    }
    for (const auto& id : wanted)
        if (arms(lib, id, cfg)) push_unique(out.armed, id);
    return out;
}

ActivePFSet select_skills(const LibraryState& lib, const std::string& question, TeacherPort* teacher,
                          const RunConfig& cfg) {
    ActivePFSet out;
    if (!cfg.skills_enabled) {
        out.rationale = "skills disabled";
        return out;
    }
    const DifficultyResult gate = difficulty_gate(question, teacher, cfg);
    if (gate.bypass) {
        out.rationale = "difficulty " + std::to_string(gate.score) + " below threshold; skills bypassed";
        return out;
    }
    out = select_pfs(lib, question, teacher, cfg);
    if (!cfg.pf_only_mode) {
        for (const auto& id : rank_skills_for_prompt(lib, question, cfg.mode, cfg.max_skills_in_prompt)) {
            const auto p = lib.find(id);
            if (!cfg.enable_prompt_only_skills && (!p->rule || p->prompt_equivalent)) continue;
            out.prompt_skills.push_back(id);
        }
    }
    return out;
}

ArmedSkills resolve(const LibraryState& lib, const ActivePFSet& set) {
    ArmedSkills out;
    for (const auto& id : set.armed)
        if (auto p = lib.find(id)) out.programs.push_back(p);
    for (const auto& id : set.prompt_skills)
        if (auto p = lib.find(id)) out.prompt_skills.push_back(p);
    return out;
}

}  // namespace skillrt
