#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace skillrt {

enum class Mode { Web, Math, Code };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

struct Budgets {
    int max_steps = 5;
    int max_search_calls = 3;
    int max_read_calls = 2;
};

struct RunConfig {
    bool skills_enabled = true;
    bool enable_program_functions = true;
    bool enable_skill_handlers = true;
    bool enable_prompt_only_skills = true;
    bool pf_only_mode = false;
    bool enable_difficulty_gating = false;
    bool teacher_selection = true;
    int difficulty_threshold = 3;
    int pf_top_k = 6;
    int max_skills_in_prompt = 5;
    int max_phase_instructions = 3;
    int pre_final_step_threshold = 2;
    Mode mode = Mode::Web;
    int handler_vote_threshold = 4;
    Budgets budgets;
    int modify_cap = 2;
    std::map<std::string, int> modify_cap_overrides = {{"retrieval_failure", 3}};
    std::map<std::string, int> inject_caps;  // absent means uncapped
};

// Web keeps the multi-step budgets; math and code run single-step without handlers.
RunConfig defaults_for(Mode mode);

}  // namespace skillrt
