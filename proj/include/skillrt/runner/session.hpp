#pragma once

#include "skillrt/harness/episode.hpp"
#include "skillrt/runner/app_config.hpp"
#include "skillrt/runner/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

namespace skillrt::app {

// JSONL rows {"id"?, "question", "answers" | "gold_answers", "dataset"?}.
// Episode seeds are base_seed + row index. Throws ConfigError.
std::vector<EpisodeInput> read_questions(const std::filesystem::path& path, std::uint64_t base_seed = 0);

// Ports built from their specs; absent members were configured as "none".
struct Session {
    std::unique_ptr<PolicyPort> policy;
    std::unique_ptr<ModelPort> teacher;
    std::unique_ptr<ModelPort> own_proposer;
    ModelPort* proposer = nullptr;
    std::unique_ptr<sim::SimCorpus> corpus;
    std::unique_ptr<EnvironmentPort> env;
};

struct SessionNeeds {
    bool policy = false;
    bool environment = false;
};

Session open_session(const AppConfig& cfg, SessionNeeds needs);

}  // namespace skillrt::app
