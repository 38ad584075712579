#include "skillrt/config.hpp"

namespace skillrt {

std::string_view to_string(Mode mode) {
    switch (mode) {
    case Mode::Web: return "web";
    case Mode::Math: return "math";
    case Mode::Code: return "code";
    }
    return "web";
}

std::optional<Mode> parse_mode(std::string_view text) {
    if (text == "web") return Mode::Web;
    if (text == "math") return Mode::Math;
    if (text == "code") return Mode::Code;
    return std::nullopt;
}

RunConfig defaults_for(Mode mode) {
    RunConfig cfg;
    cfg.mode = mode;
    if (mode != Mode::Web) {
        cfg.budgets = {1, 0, 0};
        cfg.enable_skill_handlers = false;
        cfg.handler_vote_threshold = 3;
    }
    return cfg;
}

}  // namespace skillrt
