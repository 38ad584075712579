#pragma once

#include "skillrt/candidate.hpp"
#include "skillrt/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace skillrt::rules {

struct ExecReport {
    bool syntax_ok = false;
    bool interface_ok = false;
    bool mock_exec_ok = false;
    bool return_type_ok = false;
    int invocations_run = 0;
    double q_exec = 0.0;
    std::vector<std::string> diagnostics;

    int passed() const { return int(syntax_ok) + int(interface_ok) + int(mock_exec_ok) + int(return_type_ok); }
};

// (a) step 1 with no reads, (b) step 5 with two reads, (c) step 12 with empty
// results and contradictory sources. Other fields hold benign defaults.
std::array<StepContext, 3> canonical_mock_contexts();

// The proposal used for each action type during mock execution.
ActionProposal mock_proposal(ActionType type);

// Runs syntax, interface, mock execution and return-type checks in order,
// stopping at the first failure. Never performs I/O or calls a model.
ExecReport validate_candidate(const CandidateSkill& cand);

}  // namespace skillrt::rules
