#pragma once

#include "skillrt/config.hpp"
#include "skillrt/data_forge/data_forge.hpp"
#include "skillrt/evolution/evolution.hpp"
#include "skillrt/signal_scorer/scorer.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace skillrt::app {

// Port specs: "none", "script:<path>", "cmd:<shell command>", "replay:<trajectories.jsonl>",
// "template" (proposer only) or "teacher" (proposer only: reuse the teacher port).
struct PortSpecs {
    std::string policy = "none";
    std::string teacher = "none";
    std::string proposer = "template";
    std::string environment = "sim";  // sim | teacher_snippet
    int timeout_s = 60;
};

struct Paths {
    std::string library;
    std::string corpus;
    std::string questions;
    std::string out = "out";
};

struct DataConfig {
    int test_boundary = 0;
    std::uint64_t shuffle_seed = forge::kDefaultShuffleSeed;
    double min_score = forge::kRsMinScore;
    double sft_floor = forge::kSftFloor;
};

struct AppConfig {
    RunConfig run;
    SignalWeights weights;
    GateConfig gate;
    GateMode gate_mode = GateMode::Strict;
    bool lite = false;
    double reward_lambda = kSkillRewardLambda;
    DataConfig data;
    PortSpecs ports;
    Paths paths;
};

// Every settable dotted key, e.g. "run.pf_top_k" or "budgets.max_steps".
// Map-valued settings take a trailing key: "run.modify_cap_overrides.<skill>",
// "run.inject_caps.<skill>", "weights.fine.<signal id>".
std::vector<std::string> known_keys();

// Applies (dotted key, value) overrides. "run.mode" resets run settings to
// that mode's defaults before the other keys apply. Throws ConfigError.
AppConfig build_config(const std::vector<std::pair<std::string, std::string>>& settings);

// Flattens a YAML document into dotted settings. Throws ConfigError.
std::vector<std::pair<std::string, std::string>> flatten_yaml(const std::string& text);

// Environment overrides for port commands and the output root.
std::vector<std::pair<std::string, std::string>> environment_settings();

Json to_json(const AppConfig& cfg);

}  // namespace skillrt::app
