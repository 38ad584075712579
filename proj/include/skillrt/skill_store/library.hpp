#pragma once

#include "skillrt/candidate.hpp"
#include "skillrt/evolution/review.hpp"
#include "skillrt/rule_engine/sandbox.hpp"
#include "skillrt/skill_store/skill_doc.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace skillrt {

using ProgramPtr = std::shared_ptr<const SkillProgram>;

struct AdmissionEvent {
    std::string base_id;
    int version = 0;
    Decision decision = Decision::Reject;
    std::optional<ReviewScores> review;
    std::optional<rules::ExecReport> exec;
    std::uint64_t timestamp = 0;
    ProgramPtr program;  // set on accept
};

inline constexpr std::size_t kDefaultLibrarySize = 50;

// Immutable value: every mutation returns a new state. Entries are a cache of
// the accept events in the history.
class LibraryState {
public:
    explicit LibraryState(std::size_t max_size = kDefaultLibrarySize) : max_size_(max_size) {}

    std::size_t max_size() const { return max_size_; }
    const std::map<std::string, std::vector<ProgramPtr>>& entries() const { return entries_; }
    const std::vector<AdmissionEvent>& history() const { return history_; }

    // Latest version of each base id, ordered by base id.
    std::vector<ProgramPtr> active() const;
    std::size_t active_size() const { return entries_.size(); }
    ProgramPtr find(const std::string& base_id) const;
    std::optional<int> highest_version(const std::string& base_id) const;

    // Appends an event, applying it to the entries when it is an accept.
    // Throws DuplicateVersion or CapacityExceeded.
    LibraryState with_event(AdmissionEvent event) const;

private:
    std::size_t max_size_;
    std::map<std::string, std::vector<ProgramPtr>> entries_;
    std::vector<AdmissionEvent> history_;
};

// Parses every document; throws DuplicateVersion, CapacityExceeded or a parse error.
LibraryState load_library(std::span<const std::string> docs, std::size_t max_size = kDefaultLibrarySize);
LibraryState load_library(std::span<const SkillDoc> docs, std::size_t max_size = kDefaultLibrarySize);

// Stores an accepted candidate as the next version of its base id; revise and
// reject only record an event. Throws CapacityExceeded.
LibraryState admit(const LibraryState& lib, const CandidateSkill& cand, Decision decision,
                   std::optional<ReviewScores> review = std::nullopt,
                   std::optional<rules::ExecReport> exec = std::nullopt);

// Rebuilds a library from an event log.
LibraryState replay(std::span<const AdmissionEvent> events, std::size_t max_size = kDefaultLibrarySize);

// Stored documents in (base id, version) order, one after another.
std::vector<std::string> serialize(const LibraryState& lib);

}  // namespace skillrt
