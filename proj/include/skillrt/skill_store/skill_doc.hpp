#pragma once

#include "skillrt/ports.hpp"
#include "skillrt/rule_engine/ast.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace skillrt {

// A SKILL.md split into its metadata block and markdown body.
struct SkillDoc {
    std::string raw_text;
    Json frontmatter = Json::object();
    std::string frontmatter_text;
    std::string body;
    std::vector<std::pair<std::string, std::string>> body_sections;  // (heading, text)
};

// Throws MissingFrontmatter or MalformedFrontmatter.
SkillDoc split_skill_doc(std::string_view text);

inline const std::set<std::string> kPhaseNames = {"pre_final", "post_search", "post_read"};
inline const std::set<std::string> kConditionVocabulary = {
    "search_empty", "no_read_yet", "has_case_analysis", "contradictory_sources", "multi_part_question",
    "low_step_count"};

struct PhaseInstruction {
    std::vector<std::string> conditions;
    double priority_boost = 0.0;
    std::string action;
    std::optional<std::string> text;
};

struct SkillProgram {
    std::string skill_id;
    std::string base_id;
    std::string name;
    int version = 1;
    double priority = 0.5;
    std::string error_category;
    std::set<std::string> applicable_modes;
    std::set<std::string> applicable_phases;
    std::string system_summary;
    std::map<std::string, PhaseInstruction> phase_instructions;
    std::shared_ptr<const rules::RuleAst> rule;  // null for prompt-only skills
    bool needs_teacher = false;
    bool prompt_equivalent = true;
    std::vector<std::string> trigger_keywords;
    std::string doc_text;
    std::vector<std::string> load_diagnostics;

    bool has_handler() const { return rule && rule->handler.has_value(); }
};

// Splits "<base>__v<N>"; nullopt when there is no version suffix.
std::optional<std::pair<std::string, int>> split_version_suffix(std::string_view skill_id);

// Throws MissingFrontmatter, MissingKey, MalformedFrontmatter, RuleParseError.
SkillProgram parse_skill_doc(std::string_view text);

// Returns `text` with the frontmatter skill_id and version rewritten.
std::string restamp_version(std::string_view text, const std::string& base_id, int version);

}  // namespace skillrt
