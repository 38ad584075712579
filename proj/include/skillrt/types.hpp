#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace skillrt {

enum class ActionType { Search, Read, Final };

std::string_view to_string(ActionType type);
std::optional<ActionType> parse_action_type(std::string_view text);

struct ActionProposal {
    ActionType type = ActionType::Search;
    std::string arg;

    friend bool operator==(const ActionProposal&, const ActionProposal&) = default;
};

std::string describe(const ActionProposal& action);  // e.g. READ(doc_0)

enum class InterventionKind { Noop, ModifyAction, InjectContext };

std::string_view to_string(InterventionKind kind);
std::optional<InterventionKind> parse_intervention_kind(std::string_view text);

struct Intervention {
    InterventionKind kind = InterventionKind::Noop;
    std::optional<ActionType> new_action_type;
    std::optional<std::string> new_action_arg;
    std::string context_text;
    std::string reason;
    std::string skill_id;

    friend bool operator==(const Intervention&, const Intervention&) = default;
};

// True when the intervention respects the shape rules of its kind:
// modify needs a target action, inject needs non-empty text, noop carries no action.
bool well_formed(const Intervention& iv);

// The runtime state s_t a skill predicate sees at a decision point.
struct StepContext {
    std::string question;
    int step_count = 0;
    bool has_read = false;
    int search_count = 0;
    int read_count = 0;
    bool empty_results = false;
    bool contradictory_sources = false;
    int max_steps = 5;
    std::vector<std::pair<ActionType, std::string>> action_history;
    std::string last_search_results_text;
    std::vector<std::string> all_read_contents;
    std::string thought;
    std::map<std::string, int> fire_counters;
    int final_override_count = 0;

    friend bool operator==(const StepContext&, const StepContext&) = default;
};

// Most recent executed SEARCH argument, empty when there was none.
std::string last_query(const StepContext& ctx);

}  // namespace skillrt
