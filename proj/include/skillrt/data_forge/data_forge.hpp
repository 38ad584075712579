#pragma once

#include "skillrt/candidate.hpp"
#include "skillrt/evolution/review.hpp"
#include "skillrt/harness/trajectory.hpp"
#include "skillrt/ports.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace skillrt::forge {

inline constexpr int kDefaultSplitCount = 50;
inline constexpr std::uint64_t kDefaultShuffleSeed = 42;

struct SplitSpec {
    std::string dataset_name;
    int total = 0;
    int test_boundary = 0;
    int seed_count = 0;
    int val_count = 0;
    std::uint64_t shuffle_seed = kDefaultShuffleSeed;
    bool skipped = false;
    std::vector<int> seed_indices;  // row indices into the full dataset
    std::vector<int> val_indices;
};

// Draws seed and val rows from the shuffled tail after the test boundary.
// Throws ConfigError when boundary is outside [0, total].
SplitSpec make_splits(int total, int boundary, std::uint64_t seed = kDefaultShuffleSeed, std::string dataset = {});

struct RsVerdict {
    bool keep = false;
    double score = 0.0;
};

inline constexpr double kRsMinScore = 0.15;

double step_economy(int trajectory_length, int max_steps);  // clip(1 - (T-1)/max_steps, 0, 1)
RsVerdict rs_filter(const Trajectory& traj, int max_steps, double min_score = kRsMinScore);

enum class RecordKind { SftCorrection, DpoPair, PromptOnly, SftSkillAuthor, DpoSkillAuthor };
std::string_view to_string(RecordKind kind);

struct TrainRecord {
    RecordKind kind = RecordKind::SftCorrection;
    std::string trajectory_id;  // or candidate base id for skill-author records
    int step_index = -1;
    Json input_state = Json::object();
    std::string target;
    std::optional<std::string> chosen;
    std::optional<std::string> rejected;
    double sample_weight = 1.0;
    std::optional<SignalBreakdown> signals;
};

Json to_json(const TrainRecord& r);

inline constexpr double kSftFloor = 0.25;

// One record per step whose score reaches the floor; target is the corrected action.
std::vector<TrainRecord> build_sft(std::span<const Trajectory> kept, double floor = kSftFloor);

// One chosen/rejected pair per modified step.
std::vector<TrainRecord> build_dpo(std::span<const Trajectory> trajs);

// Same steps as build_sft without the floor, all with weight 1.
std::vector<TrainRecord> build_prompt_only(std::span<const Trajectory> kept);

struct AuthoredCandidate {
    CandidateSkill candidate;
    Decision decision = Decision::Reject;
    double r_skill = 0.0;
};

// SFT records for accepted candidates, DPO pairs of accepted vs rejected
// candidates from the same cluster.
std::vector<TrainRecord> build_skill_author_data(std::span<const AuthoredCandidate> candidates);

struct SkillFireCounts {
    int modify = 0;
    int inject = 0;
    int total() const { return modify + inject; }
};

struct TriggerReport {
    std::map<std::string, SkillFireCounts> per_skill;
    std::map<std::string, int> per_dataset;
    int action_level = 0;
    int context_level = 0;
    std::optional<double> action_pct;  // absent when nothing fired
    std::optional<double> context_pct;
};

// Counts effective modify and inject fires.
TriggerReport trigger_stats(std::span<const Trajectory> trajs);
Json to_json(const TriggerReport& report);
std::string render(const TriggerReport& report);

struct TrainingSet {
    std::vector<TrainRecord> sft;
    std::vector<TrainRecord> dpo;
    std::vector<TrainRecord> prompt_only;
    std::vector<TrainRecord> skill_author_sft;
    std::vector<TrainRecord> skill_author_dpo;
    int trajectories_in = 0;
    int trajectories_kept = 0;
};

struct ForgeConfig {
    int max_steps = 5;
    double min_score = kRsMinScore;
    double sft_floor = kSftFloor;
};

// Filters scored trajectories and builds every record family.
TrainingSet build_training_set(std::span<const Trajectory> scored, std::span<const AuthoredCandidate> authored,
                               const ForgeConfig& cfg);

// Writes sft.jsonl, dpo.jsonl, prompt_only.jsonl and skill_author_{sft,dpo}.jsonl.
void write_training_set(const std::filesystem::path& dir, const TrainingSet& set);

}  // namespace skillrt::forge
