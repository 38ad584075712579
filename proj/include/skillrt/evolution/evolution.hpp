#pragma once

#include "skillrt/candidate.hpp"
#include "skillrt/config.hpp"
#include "skillrt/data_forge/data_forge.hpp"
#include "skillrt/evolution/review.hpp"
#include "skillrt/failure_miner/miner.hpp"
#include "skillrt/harness/episode.hpp"
#include "skillrt/harness/ports.hpp"
#include "skillrt/ports.hpp"
#include "skillrt/rule_engine/sandbox.hpp"
#include "skillrt/signal_scorer/scorer.hpp"
#include "skillrt/skill_store/library.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace skillrt {

struct GateConfig {
    double eta_exec = 0.30;  // hard reject below this reviewed executability
    double accept_threshold = 0.60;
    double revise_threshold = 0.42;
    double new_group_threshold = 0.75;
    double same_group_threshold = 0.60;
    int max_candidates_per_epoch = 5;
};

enum class GateMode { Strict, Audit };
std::string_view to_string(GateMode mode);
std::optional<GateMode> parse_gate_mode(std::string_view text);

double composite_q(const ReviewScores& r);

// Decision table on already-computed quantities.
Decision decide_admission(double q_exec, double exec_review, double composite, std::optional<Decision> decision_line,
                          bool is_new_group, const GateConfig& g = {});
Decision decide_admission(const rules::ExecReport& exec, const ReviewScores& r, bool is_new_group,
                          const GateConfig& g = {});

inline constexpr double kSkillRewardLambda = 0.5;
double skill_reward(double q_skill, double delta_em_val, double lambda = kSkillRewardLambda);

struct ProposalBatch {
    std::vector<CandidateSkill> candidates;
    std::vector<std::string> diagnostics;
    int requests = 0;
};

TeacherRequest proposal_request(const FailureCluster& cluster, const LibraryState& lib);

// Expects {"base_id", "doc_text", "rule_source"?}; nullopt plus diagnostic otherwise.
std::optional<CandidateSkill> parse_proposal(const std::string& reply, std::string& diagnostic);

// One request per cluster in order until `cap` requests are spent; malformed
// replies are skipped but still count against the cap.
ProposalBatch propose_candidates(std::span<const FailureCluster> clusters, const LibraryState& lib,
                                 ProposerPort* proposer, int cap);

// Deterministic in-process proposer: one templated skill per failure category.
class TemplateProposer : public ModelPort {
public:
    std::optional<std::string> request(const TeacherRequest& req) override;
};

TeacherRequest review_request(const CandidateSkill& cand, const rules::ExecReport& exec);

// Expects the five scores in [0,1] plus optional "decision" and "feedback".
std::optional<ReviewScores> parse_review(const std::string& reply, std::string& diagnostic);

struct EpochConfig {
    int epoch_index = 0;
    RunConfig run;
    SignalWeights weights;
    GateConfig gate;
    GateMode gate_mode = GateMode::Strict;
    bool lite = false;  // no teacher calls: builtin proposer, no review
    DetectorConfig detectors;
    ClusterConfig clustering;
    double reward_lambda = kSkillRewardLambda;
    forge::ForgeConfig forge;
    std::optional<std::filesystem::path> out_dir;  // epoch_<i>/ is created below it
};

struct CandidateOutcome {
    CandidateSkill candidate;
    rules::ExecReport exec;
    std::optional<ReviewScores> review;
    double q_skill = 0.0;
    Decision decision = Decision::Reject;
    std::string note;
    double r_skill = 0.0;
};

struct EpochArtifacts {
    std::vector<Trajectory> trajectories;
    std::vector<FailurePattern> failures;
    std::vector<FailureCluster> clusters;
    std::vector<CandidateOutcome> candidates;
    std::vector<AdmissionEvent> admissions;
    std::optional<double> val_em_before;
    std::optional<double> val_em_after;
    double delta_em = 0.0;
    forge::TrainingSet training;
    std::vector<std::string> diagnostics;
};

struct EpochResult {
    LibraryState library;
    EpochArtifacts artifacts;
};

// One self-improving epoch. Port failures degrade their phase; a rollout
// phase where every episode fails throws Error.
EpochResult run_epoch(PolicyPort& student, EnvironmentPort& env, TeacherPort* teacher, ProposerPort* proposer,
                      const LibraryState& lib, std::span<const EpisodeInput> seed_split,
                      std::span<const EpisodeInput> val_split, const EpochConfig& cfg);

// Rolls out every input with skills selected per question.
std::vector<Trajectory> rollout(PolicyPort& policy, EnvironmentPort& env, const LibraryState& lib,
                                std::span<const EpisodeInput> inputs, const RunConfig& cfg, TeacherPort* teacher);

}  // namespace skillrt
