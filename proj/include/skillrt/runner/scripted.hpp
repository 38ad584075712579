#pragma once

#include "skillrt/harness/ports.hpp"
#include "skillrt/harness/trajectory.hpp"
#include "skillrt/ports.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace skillrt::sim {

struct ScriptStep {
    ActionProposal action;
    std::string thought;
    std::optional<std::string> expect;  // substring the latest observation must contain
};

// Replays a fixed action list. Strict mode checks each step's expectation
// and throws PolicyProtocolError on mismatch; both modes throw when the
// script runs out.
class ScriptedPolicy : public PolicyPort {
public:
    explicit ScriptedPolicy(std::vector<ScriptStep> script, bool strict = false)
        : script_(std::move(script)), strict_(strict) {}

    void begin_episode(const std::string& question, std::uint64_t seed) override;
    ActionProposal propose(const PolicyView& view) override;
    std::string last_thought() const override { return thought_; }

private:
    std::vector<ScriptStep> script_;
    bool strict_;
    std::size_t cursor_ = 0;
    std::string thought_;
};

// One script per question.
class ScriptBookPolicy : public PolicyPort {
public:
    explicit ScriptBookPolicy(std::map<std::string, std::vector<ScriptStep>> book, bool strict = false)
        : book_(std::move(book)), strict_(strict) {}

    void begin_episode(const std::string& question, std::uint64_t seed) override;
    ActionProposal propose(const PolicyView& view) override;
    std::string last_thought() const override;

private:
    std::map<std::string, std::vector<ScriptStep>> book_;
    bool strict_;
    std::optional<ScriptedPolicy> current_;
    std::string missing_;
};

// {"strict": bool?, "scripts": {question: [{"type", "arg", "thought"?, "expect"?}, ...]}}
ScriptBookPolicy load_script_book(const std::filesystem::path& path);
std::vector<ScriptStep> script_from_json(const Json& steps);

// Re-proposes the original actions and thoughts of recorded trajectories, keyed by question.
class ReplayPolicy : public PolicyPort {
public:
    explicit ReplayPolicy(const std::vector<Trajectory>& recorded);

    void begin_episode(const std::string& question, std::uint64_t seed) override { inner_.begin_episode(question, seed); }
    ActionProposal propose(const PolicyView& view) override { return inner_.propose(view); }
    std::string last_thought() const override { return inner_.last_thought(); }

private:
    ScriptBookPolicy inner_;
};

// Canned replies per request purpose; each purpose's list is consumed in
// order and its last entry repeats. Every request is logged.
class ScriptedTeacher : public ModelPort {
public:
    ScriptedTeacher() = default;
    explicit ScriptedTeacher(std::map<std::string, std::vector<std::string>> replies) : replies_(std::move(replies)) {}

    void set(const std::string& purpose, std::vector<std::string> replies) { replies_[purpose] = std::move(replies); }
    std::optional<std::string> request(const TeacherRequest& req) override;

    const std::vector<TeacherRequest>& log() const { return log_; }

private:
    std::map<std::string, std::vector<std::string>> replies_;
    std::map<std::string, std::size_t> cursor_;
    std::vector<TeacherRequest> log_;
};

// {purpose: "reply" | ["reply", ...]}
ScriptedTeacher load_scripted_teacher(const std::filesystem::path& path);

}  // namespace skillrt::sim
