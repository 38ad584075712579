#pragma once

#include <string>

namespace skillrt {

// A proposed skill awaiting validation, review and admission.
struct CandidateSkill {
    std::string base_id;
    std::string doc_text;     // full SKILL.md source
    std::string rule_source;  // empty means: take the ```rule block of doc_text
    std::string origin_category;
    int origin_cluster = -1;
    bool is_new_group = false;
    std::string proposer_meta;
};

}  // namespace skillrt
