#pragma once

#include "skillrt/harness/trajectory.hpp"
#include "skillrt/ports.hpp"
#include "skillrt/skill_store/library.hpp"

#include <span>
#include <string>
#include <vector>

namespace skillrt {

enum class DetectorKind { Heuristic, Llm };
std::string_view to_string(DetectorKind kind);

struct FailurePattern {
    std::string category;
    std::string abstraction;
    std::string trigger;
    std::string intervention_hint;
    std::string source_trajectory_id;
    DetectorKind detector = DetectorKind::Heuristic;

    friend bool operator==(const FailurePattern&, const FailurePattern&) = default;
};

struct FailureCluster {
    FailurePattern representative;
    std::vector<FailurePattern> members;
    int size = 0;
    double novelty = 1.0;
    bool is_new_category = true;
};

struct DetectorConfig {
    int min_steps = 3;
    double repeated_search_jaccard = 0.8;  // fires strictly above
    int broad_query_tokens = 3;            // fires strictly below
    int narrow_query_tokens = 15;          // fires strictly above
    double entity_overlap = 0.30;          // fires strictly below
    double grounding = 0.30;               // fires strictly below
    int max_answer_tokens = 20;
};

// The twelve heuristic categories, in detector order.
const std::vector<std::string>& heuristic_categories();

// Fraction of gold tokens present in the prediction, best over golds.
double entity_overlap(const std::string& prediction, std::span<const std::string> golds);

// Runs on failed trajectories only; returns nothing when em = 1.
std::vector<FailurePattern> detect_heuristic(const Trajectory& traj, const DetectorConfig& cfg = {});

struct ClusterConfig {
    double merge_jaccard = 0.5;
    int min_cluster_size = 3;
    double novelty_threshold = 0.3;
};

// Clusters ordered by (is_new_category desc, size desc, category asc).
std::vector<FailureCluster> cluster(std::span<const FailurePattern> patterns, const LibraryState& lib,
                                    const ClusterConfig& cfg = {});

struct SummaryResult {
    std::vector<FailurePattern> patterns;
    std::vector<std::string> diagnostics;
    int requests = 0;
};

inline constexpr double kSummarizerTemperature = 0.3;
inline constexpr int kSummarizerMaxTokens = 400;

// Builds the summarizer request for one failed trajectory.
TeacherRequest summary_request(const Trajectory& traj);

// Strict JSON parse of a summarizer reply; nullopt plus diagnostic when malformed.
std::optional<FailurePattern> parse_summary_reply(const std::string& reply, const std::string& traj_id,
                                                  std::string& diagnostic);

SummaryResult summarize_failures(std::span<const Trajectory> failures, TeacherPort* teacher);

}  // namespace skillrt
