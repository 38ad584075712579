#pragma once

// Shared helpers for unit and acceptance tests.

#include "skillrt/errors.hpp"
#include "skillrt/harness/episode.hpp"
#include "skillrt/io/json_io.hpp"
#include "skillrt/runner/library_io.hpp"
#include "skillrt/runner/scripted.hpp"
#include "skillrt/runner/sim.hpp"
#include "skillrt/skill_store/library.hpp"
#include "skillrt/skill_store/skill_doc.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace skillrt::testing {

inline std::filesystem::path fixture(const std::string& rel) {
    return std::filesystem::path(SKILLRT_FIXTURE_DIR) / rel;
}

inline std::string skill_doc(const std::string& id, const std::string& rule, double priority = 0.5,
                             const std::string& phases = "[answer]", const std::string& summary = "test skill") {
    std::string doc = "---\nskill_id: " + id + "\nname: " + id + "\nversion: 1\npriority: " +
                      std::to_string(priority) + "\nerror_category: " + id + "\napplicable_phases: " + phases +
                      "\nsystem_summary: \"" + summary + "\"\n---\n\n# " + id + "\n";
    if (!rule.empty()) doc += "\n```rule\n" + rule + "\n```\n";
    return doc;
}

inline ProgramPtr program(const std::string& id, const std::string& rule, double priority = 0.5,
                          const std::string& phases = "[answer]") {
    return std::make_shared<const SkillProgram>(parse_skill_doc(skill_doc(id, rule, priority, phases)));
}

inline ProgramPtr library_skill(const LibraryState& lib, const std::string& id) {
    auto p = lib.find(id);
    if (!p) throw Error("fixture library lacks " + id);
    return p;
}

inline const std::string kWaltonQuestion =
    "Who was the husband of the prominent Walton family member who died after John died in 2005?";

inline EpisodeInput walton_input() { return {"walton", "musique", kWaltonQuestion, {"Sam Walton"}, 7}; }

inline sim::ScriptedPolicy walton_policy() {
    auto book = Json::parse(io::read_text(fixture("scripts.json")));
    return sim::ScriptedPolicy(sim::script_from_json(book["scripts"][kWaltonQuestion]));
}

inline sim::ScriptedTeacher teacher_with(const std::string& purpose, const std::string& reply) {
    sim::ScriptedTeacher t;
    t.set(purpose, {reply});
    return t;
}

inline StepRecord step(ActionType orig, const std::string& arg, int index = 0) {
    StepRecord s;
    s.step_index = index;
    s.a_orig = {orig, arg};
    s.a_final = s.a_orig;
    return s;
}

}  // namespace skillrt::testing
