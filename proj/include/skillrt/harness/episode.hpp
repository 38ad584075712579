#pragma once

#include "skillrt/config.hpp"
#include "skillrt/harness/dispatch.hpp"
#include "skillrt/harness/ports.hpp"
#include "skillrt/harness/trajectory.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace skillrt {

struct EpisodeInput {
    std::string id;
    std::string dataset;
    std::string question;
    std::vector<std::string> gold_answers;
    std::uint64_t seed = 0;
};

// Programs armed for dispatch and skills whose summaries enter the prompt.
struct ArmedSkills {
    std::vector<ProgramPtr> programs;
    std::vector<ProgramPtr> prompt_skills;
};

// True when at least three conflict markers appear in the text.
bool detect_contradiction(const std::string& results_text);

// Runs one episode. Policy and environment failures end the episode with
// `failed` set and the error appended to the last step's feedback.
Trajectory run_episode(PolicyPort& policy, EnvironmentPort& env, const ArmedSkills& skills, const RunConfig& cfg,
                       const EpisodeInput& input, TeacherPort* teacher = nullptr);

}  // namespace skillrt
