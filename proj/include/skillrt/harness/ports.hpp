#pragma once

#include "skillrt/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace skillrt {

// What the policy sees before proposing an action.
struct PolicyView {
    std::string question;
    std::vector<std::string> observations;
    std::vector<std::pair<std::string, std::string>> injected_contexts;  // from the previous step
    int step_count = 0;
};

class PolicyPort {
public:
    virtual ~PolicyPort() = default;
    virtual void begin_episode(const std::string& /*question*/, std::uint64_t /*seed*/) {}
    // Throws PolicyProtocolError or Timeout.
    virtual ActionProposal propose(const PolicyView& view) = 0;
    // Reasoning text that accompanied the last proposal, if the policy shares it.
    virtual std::string last_thought() const { return {}; }
};

struct SearchOutcome {
    std::string text;
    bool empty = true;
    std::vector<std::string> doc_ids;  // ranked; doc_k refers to doc_ids[k]
};

class EnvironmentPort {
public:
    virtual ~EnvironmentPort() = default;
    // Throws EnvironmentError on backend failure.
    virtual SearchOutcome search(const std::string& query) = 0;
    // Full text of a document, nullopt when unknown.
    virtual std::optional<std::string> read(const std::string& doc_id) = 0;
};

}  // namespace skillrt
