#include "skillrt/runner/scripted.hpp"

#include "skillrt/errors.hpp"
#include "skillrt/io/json_io.hpp"

namespace skillrt::sim {

void ScriptedPolicy::begin_episode(const std::string&, std::uint64_t) {
    cursor_ = 0;
    thought_.clear();
}

ActionProposal ScriptedPolicy::propose(const PolicyView& view) {
    if (cursor_ >= script_.size())
        throw PolicyProtocolError("script exhausted after " + std::to_string(script_.size()) + " actions");
    const ScriptStep& step = script_[cursor_++];
    if (strict_ && step.expect) {
        const std::string latest = view.observations.empty() ? std::string() : view.observations.back();
        if (latest.find(*step.expect) == std::string::npos)
            throw PolicyProtocolError("step " + std::to_string(cursor_ - 1) + ": observation lacks '" + *step.expect +
                                      "'");
    }
    thought_ = step.thought;
    return step.action;
}

void ScriptBookPolicy::begin_episode(const std::string& question, std::uint64_t seed) {
    current_.reset();
    missing_.clear();
    auto it = book_.find(question);
    if (it == book_.end()) {
        missing_ = question;
        return;
    }
    current_.emplace(it->second, strict_);
    current_->begin_episode(question, seed);
}

ActionProposal ScriptBookPolicy::propose(const PolicyView& view) {
    if (!current_) throw PolicyProtocolError("no script for question '" + missing_ + "'");
    return current_->propose(view);
}

std::string ScriptBookPolicy::last_thought() const { return current_ ? current_->last_thought() : std::string(); }

std::vector<ScriptStep> script_from_json(const Json& steps) {
    if (!steps.is_array()) throw ConfigError("a script must be an array of steps");
    std::vector<ScriptStep> out;
    for (const auto& s : steps) {
        const auto type = parse_action_type(s.value("type", ""));
        if (!type) throw ConfigError("script step has no valid 'type'");
        ScriptStep step;
        step.action = {*type, s.value("arg", "")};
        step.thought = s.value("thought", "");
        if (auto it = s.find("expect"); it != s.end() && it->is_string()) step.expect = it->get<std::string>();
        out.push_back(std::move(step));
    }
    return out;
}

ScriptBookPolicy load_script_book(const std::filesystem::path& path) {
    Json j;
    try {
        j = Json::parse(io::read_text(path));
    } catch (const Json::exception& e) {
        throw ConfigError("script book " + path.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("scripts") || !j["scripts"].is_object())
        throw ConfigError("script book must hold a 'scripts' object");
    std::map<std::string, std::vector<ScriptStep>> book;
    for (const auto& [question, steps] : j["scripts"].items()) book[question] = script_from_json(steps);
    return ScriptBookPolicy(std::move(book), j.value("strict", false));
}

namespace {

ScriptBookPolicy book_from(const std::vector<Trajectory>& recorded) {
    std::map<std::string, std::vector<ScriptStep>> book;
    for (const auto& t : recorded) {
        std::vector<ScriptStep> steps;
        for (const auto& s : t.steps) steps.push_back({s.a_orig, s.ctx_snapshot.thought, std::nullopt});
        book[t.question] = std::move(steps);
    }
    return ScriptBookPolicy(std::move(book));
}

}  // namespace

ReplayPolicy::ReplayPolicy(const std::vector<Trajectory>& recorded) : inner_(book_from(recorded)) {}

std::optional<std::string> ScriptedTeacher::request(const TeacherRequest& req) {
    log_.push_back(req);
    auto it = replies_.find(req.purpose);
    if (it == replies_.end() || it->second.empty()) return std::nullopt;
    std::size_t& k = cursor_[req.purpose];
    const std::string& reply = it->second[std::min(k, it->second.size() - 1)];
    ++k;
    return reply;
}

ScriptedTeacher load_scripted_teacher(const std::filesystem::path& path) {
    Json j;
    try {
        j = Json::parse(io::read_text(path));
    } catch (const Json::exception& e) {
        throw ConfigError("teacher script " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("teacher script must be an object keyed by purpose");
    std::map<std::string, std::vector<std::string>> replies;
    for (const auto& [purpose, v] : j.items()) {
        if (v.is_string()) replies[purpose] = {v.get<std::string>()};
        else if (v.is_array())
            for (const auto& item : v) replies[purpose].push_back(item.is_string() ? item.get<std::string>() : item.dump());
        else replies[purpose] = {v.dump()};
    }
    return ScriptedTeacher(std::move(replies));
}

}  // namespace skillrt::sim
