#pragma once

#include "skillrt/failure_miner/miner.hpp"
#include "skillrt/harness/trajectory.hpp"
#include "skillrt/ports.hpp"
#include "skillrt/skill_store/library.hpp"

#include <filesystem>
#include <string>
#include <vector>

// nlohmann adapters for the runtime's value types. Objects serialize with
// sorted keys, so equal values always produce identical bytes.
namespace skillrt {

void to_json(Json& j, const ActionProposal& a);
void from_json(const Json& j, ActionProposal& a);
void to_json(Json& j, const StepContext& c);
void from_json(const Json& j, StepContext& c);
void to_json(Json& j, const FiredEntry& f);
void from_json(const Json& j, FiredEntry& f);
void to_json(Json& j, const SignalBreakdown& s);
void from_json(const Json& j, SignalBreakdown& s);
void to_json(Json& j, const StepRecord& s);
void from_json(const Json& j, StepRecord& s);
void to_json(Json& j, const Trajectory& t);
void from_json(const Json& j, Trajectory& t);
void to_json(Json& j, const FailurePattern& p);
void from_json(const Json& j, FailurePattern& p);
void to_json(Json& j, const FailureCluster& c);
void to_json(Json& j, const ReviewScores& r);
void from_json(const Json& j, ReviewScores& r);
void to_json(Json& j, const CandidateSkill& c);
void from_json(const Json& j, CandidateSkill& c);
void to_json(Json& j, const AdmissionEvent& e);

namespace rules {
void to_json(Json& j, const ExecReport& r);
}

namespace io {

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);  // creates parent dirs

std::vector<Json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows);
void write_json(const std::filesystem::path& path, const Json& value);

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);
void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& trajs);

}  // namespace io
}  // namespace skillrt
