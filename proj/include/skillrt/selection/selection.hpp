#pragma once

#include "skillrt/config.hpp"
#include "skillrt/harness/episode.hpp"
#include "skillrt/ports.hpp"
#include "skillrt/skill_store/library.hpp"

#include <array>
#include <string>
#include <vector>

namespace skillrt {

inline const std::array<std::string, 3> kMandatoryPfs = {"format_extraction_error", "retrieval_failure",
                                                         "relevant_content_extractor"};

struct DifficultyResult {
    int score = 5;
    bool bypass = false;
    bool from_teacher = false;
};

// Base 1, plus one per feature: more than 20 words, possessive or "of the"
// chain, relative-pronoun chain, negation, numeric constraint. Clipped to 5.
int heuristic_difficulty(const std::string& question);

DifficultyResult difficulty_gate(const std::string& question, TeacherPort* teacher, const RunConfig& cfg);

double prompt_rank_score(const SkillProgram& skill, const std::string& question, Mode mode);

std::vector<std::string> rank_skills_for_prompt(const LibraryState& lib, const std::string& question, Mode mode,
                                                int cap);

enum class QuestionClass { Computation, MultiHop, SimpleFactoid };
QuestionClass classify_question(const std::string& question);

struct ActivePFSet {
    std::vector<std::string> armed;
    std::vector<std::string> prompt_skills;
    std::string rationale;
};

// Program selection only: teacher ranking plus the mandatory triple, or the
// heuristic classifier when no teacher answers.
ActivePFSet select_pfs(const LibraryState& lib, const std::string& question, TeacherPort* teacher,
                       const RunConfig& cfg);

// Master switches, difficulty gate, prompt ranking and program selection.
ActivePFSet select_skills(const LibraryState& lib, const std::string& question, TeacherPort* teacher,
                          const RunConfig& cfg);

ArmedSkills resolve(const LibraryState& lib, const ActivePFSet& set);

}  // namespace skillrt
