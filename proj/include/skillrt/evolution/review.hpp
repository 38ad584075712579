#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace skillrt {

enum class Decision { Accept, Revise, Reject };

std::string_view to_string(Decision d);
std::optional<Decision> parse_decision(std::string_view text);  // ACCEPT / accept, etc.

// Five review dimensions, each in [0,1].
struct ReviewScores {
    double concept_score = 0.0;
    double trigger = 0.0;
    double intervene = 0.0;
    double exec_review = 0.0;
    double validation = 0.0;
    std::optional<Decision> decision_line;
    std::string feedback;
};

}  // namespace skillrt
