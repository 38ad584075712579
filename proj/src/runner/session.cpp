#include "skillrt/runner/session.hpp"

#include "skillrt/errors.hpp"
#include "skillrt/io/json_io.hpp"
#include "skillrt/runner/scripted.hpp"
#include "skillrt/runner/wire.hpp"

namespace skillrt::app {
namespace {

std::optional<std::string> after_prefix(const std::string& spec, const std::string& prefix) {
    if (spec.starts_with(prefix)) return spec.substr(prefix.size());
    return std::nullopt;
}

std::unique_ptr<ModelPort> make_model(const std::string& spec, std::chrono::milliseconds timeout, const char* role) {
    if (spec.empty() || spec == "none") return nullptr;
    if (auto path = after_prefix(spec, "script:")) return std::make_unique<sim::ScriptedTeacher>(sim::load_scripted_teacher(*path));
    if (auto cmd = after_prefix(spec, "cmd:")) return std::make_unique<wire::WireTeacher>(*cmd, timeout);
    throw ConfigError(std::string(role) + " port spec '" + spec + "' is not none, script:<path> or cmd:<command>");
}

}  // namespace

std::vector<EpisodeInput> read_questions(const std::filesystem::path& path, std::uint64_t base_seed) {
    std::vector<Json> rows;
    try {
        rows = io::read_jsonl(path);
    } catch (const Error& e) {
        throw ConfigError(std::string("questions: ") + e.what());
    }
    std::vector<EpisodeInput> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Json& r = rows[i];
        if (!r.is_object() || !r.contains("question") || !r["question"].is_string())
            throw ConfigError("questions row " + std::to_string(i + 1) + " lacks a 'question' string");
        EpisodeInput in;
        in.id = r.value("id", "q" + std::to_string(i));
        in.dataset = r.value("dataset", "");
        in.question = r["question"].get<std::string>();
        const char* key = r.contains("answers") ? "answers" : "gold_answers";
        if (r.contains(key)) {
            if (r[key].is_string()) in.gold_answers = {r[key].get<std::string>()};
            else in.gold_answers = r[key].get<std::vector<std::string>>();
        }
        in.seed = base_seed + i;
        out.push_back(std::move(in));
    }
    return out;
}

Session open_session(const AppConfig& cfg, SessionNeeds needs) {
    const std::chrono::milliseconds timeout{static_cast<long long>(cfg.ports.timeout_s) * 1000};
    Session s;
    s.teacher = make_model(cfg.ports.teacher, timeout, "teacher");

    const std::string& prop = cfg.ports.proposer;
    if (prop == "template") {
        s.own_proposer = std::make_unique<TemplateProposer>();
        s.proposer = s.own_proposer.get();
    } else if (prop == "teacher") {
        s.proposer = s.teacher.get();
    } else {
        s.own_proposer = make_model(prop, timeout, "proposer");
        s.proposer = s.own_proposer.get();
    }

    if (needs.policy) {
        const std::string& spec = cfg.ports.policy;
        if (auto path = after_prefix(spec, "script:")) {
            s.policy = std::make_unique<sim::ScriptBookPolicy>(sim::load_script_book(*path));
        } else if (auto traj = after_prefix(spec, "replay:")) {
            s.policy = std::make_unique<sim::ReplayPolicy>(io::read_trajectories(*traj));
        } else if (auto cmd = after_prefix(spec, "cmd:")) {
            s.policy = std::make_unique<wire::WirePolicy>(*cmd, timeout);
        } else {
            throw ConfigError("ports.policy must be script:<path>, replay:<path> or cmd:<command>");
        }
    }
    if (needs.environment) {
        if (cfg.ports.environment == "sim") {
            if (cfg.paths.corpus.empty()) throw ConfigError("paths.corpus is required for the sim environment");
            s.corpus = std::make_unique<sim::SimCorpus>(sim::load_corpus(cfg.paths.corpus));
            s.env = std::make_unique<sim::SimEnvironment>(*s.corpus);
        } else if (cfg.ports.environment == "teacher_snippet") {
            if (!s.teacher) throw ConfigError("the teacher_snippet environment needs a teacher port");
            s.env = std::make_unique<sim::TeacherSnippetEnvironment>(*s.teacher);
        } else {
            throw ConfigError("ports.environment must be sim or teacher_snippet");
        }
    }
    return s;
}

}  // namespace skillrt::app
