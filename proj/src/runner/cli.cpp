#include "skillrt/runner/cli.hpp"

#include "skillrt/data_forge/data_forge.hpp"
#include "skillrt/errors.hpp"
#include "skillrt/evolution/evolution.hpp"
#include "skillrt/failure_miner/miner.hpp"
#include "skillrt/io/json_io.hpp"
#include "skillrt/rule_engine/sandbox.hpp"
#include "skillrt/runner/library_io.hpp"
#include "skillrt/runner/session.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <ostream>

namespace skillrt::app {
namespace {

namespace fs = std::filesystem;

constexpr const char* kUsage =
    "usage: skillrt [--config FILE] [--out DIR] [--<section.key> VALUE ...] "
    "{rollout|score|analyze|evolve|build-data|validate-skill|stats} ...\n"
    "run 'skillrt --help' for details\n";

struct Invocation {
    std::string config_path;
    std::map<std::string, std::string> flags;  // dotted key -> value from the command line
    std::vector<std::string> sets;              // key=value
    std::string out;
    std::string questions;
    std::string library;
    std::string corpus;
    std::string trajectories;
    std::string skill_path;
    std::uint64_t seed = 0;
    int epochs = 1;
};

bool is_path_key(const std::string& key) { return key.starts_with("paths."); }

// Relative file references in a config file resolve against its directory.
std::string rebase(const std::string& key, const std::string& value, const fs::path& base) {
    auto rel = [&](const std::string& p) { return fs::path(p).is_absolute() || p.empty() ? p : (base / p).string(); };
    if (is_path_key(key)) return rel(value);
    if (key.starts_with("ports.")) {
        for (const char* prefix : {"script:", "replay:"})
            if (value.starts_with(prefix)) return prefix + rel(value.substr(std::string(prefix).size()));
    }
    return value;
}

AppConfig resolve_config(const Invocation& inv) {
    std::vector<std::pair<std::string, std::string>> settings;
    if (!inv.config_path.empty()) {
        std::string text;
        try {
            text = io::read_text(inv.config_path);
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        const fs::path base = fs::path(inv.config_path).parent_path();
        for (auto& [k, v] : flatten_yaml(text)) settings.emplace_back(k, rebase(k, v, base));
    }
    for (auto& kv : environment_settings()) settings.push_back(kv);
    for (const auto& [k, v] : inv.flags) settings.emplace_back(k, v);
    for (const auto& s : inv.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
        settings.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!inv.out.empty()) settings.emplace_back("paths.out", inv.out);
    if (!inv.questions.empty()) settings.emplace_back("paths.questions", inv.questions);
    if (!inv.library.empty()) settings.emplace_back("paths.library", inv.library);
    if (!inv.corpus.empty()) settings.emplace_back("paths.corpus", inv.corpus);
    return build_config(settings);
}

LibraryState open_library(const AppConfig& cfg) {
    if (cfg.paths.library.empty()) return LibraryState{};
    return io::load_library_dir(cfg.paths.library);
}

std::vector<EpisodeInput> questions_of(const AppConfig& cfg, std::uint64_t seed) {
    if (cfg.paths.questions.empty()) throw ConfigError("a questions file is required (--questions)");
    return read_questions(cfg.paths.questions, seed);
}

std::vector<Trajectory> trajectories_of(const Invocation& inv) {
    if (inv.trajectories.empty()) throw ConfigError("a trajectories file is required (--trajectories)");
    return io::read_trajectories(inv.trajectories);
}

Json outcome_summary(const std::vector<Trajectory>& trajs) {
    double em = 0, f1 = 0;
    int failed = 0;
    for (const auto& t : trajs) {
        em += t.em;
        f1 += t.f1;
        failed += t.failed ? 1 : 0;
    }
    const double n = trajs.empty() ? 1.0 : static_cast<double>(trajs.size());
    return {{"episodes", trajs.size()}, {"em", em / n}, {"f1", f1 / n}, {"failed", failed}};
}

int cmd_rollout(const Invocation& inv, std::ostream& out) {
    const AppConfig cfg = resolve_config(inv);
    const auto inputs = questions_of(cfg, inv.seed);
    const LibraryState lib = open_library(cfg);
    Session s = open_session(cfg, {.policy = true, .environment = true});
    const auto trajs = rollout(*s.policy, *s.env, lib, inputs, cfg.run, s.teacher.get());
    const fs::path dir = cfg.paths.out;
    io::write_trajectories(dir / "trajectories.jsonl", trajs);
    const Json summary = outcome_summary(trajs);
    io::write_json(dir / "summary.json", summary);
    out << "rollout: " << trajs.size() << " episodes, em=" << summary["em"].get<double>() << ", wrote "
        << (dir / "trajectories.jsonl").string() << "\n";
    return kExitOk;
}

int cmd_score(const Invocation& inv, std::ostream& out) {
    const AppConfig cfg = resolve_config(inv);
    auto trajs = trajectories_of(inv);
    Session s = open_session(cfg, {});
    Json scores = Json::array();
    for (auto& t : trajs) {
        if (t.steps.empty()) {
            scores.push_back({{"id", t.id}, {"em", t.em}, {"score", nullptr}});
            continue;
        }
        score_trajectory(t, cfg.weights, s.teacher.get());
        std::vector<SignalBreakdown> steps;
        for (const auto& st : t.steps) steps.push_back(*st.signals);
        scores.push_back({{"id", t.id},
                          {"em", t.em},
                          {"pf_score", trajectory_pf_score(t)},
                          {"score", trajectory_score(t, cfg.weights)},
                          {"episode_reward", episode_reward(steps, t.em, cfg.weights.blend)}});
    }
    const fs::path dir = cfg.paths.out;
    io::write_trajectories(dir / "scored_trajectories.jsonl", trajs);
    io::write_json(dir / "scores.json", scores);
    out << "score: " << trajs.size() << " trajectories scored\n";
    return kExitOk;
}

int cmd_analyze(const Invocation& inv, std::ostream& out) {
    const AppConfig cfg = resolve_config(inv);
    const auto trajs = trajectories_of(inv);
    const LibraryState lib = open_library(cfg);
    Session s = open_session(cfg, {});
    std::vector<Trajectory> failed;
    std::vector<FailurePattern> patterns;
    for (const auto& t : trajs) {
        if (t.em != 0) continue;
        failed.push_back(t);
        auto found = detect_heuristic(t);
        patterns.insert(patterns.end(), found.begin(), found.end());
    }
    if (s.teacher && !cfg.lite) {
        auto summary = summarize_failures(failed, s.teacher.get());
        patterns.insert(patterns.end(), summary.patterns.begin(), summary.patterns.end());
    }
    const auto clusters = cluster(patterns, lib);
    const fs::path dir = cfg.paths.out;
    io::write_jsonl(dir / "failures.jsonl", std::vector<Json>(patterns.begin(), patterns.end()));
    io::write_json(dir / "clusters.json", Json(clusters));
    out << "analyze: " << failed.size() << " failed trajectories, " << patterns.size() << " patterns, "
        << clusters.size() << " clusters\n";
    for (const auto& c : clusters)
        out << "  " << c.representative.category << " size=" << c.size << " novelty=" << c.novelty
            << (c.is_new_category ? " (new)" : "") << "\n";
    return kExitOk;
}

int cmd_evolve(const Invocation& inv, std::ostream& out) {
    const AppConfig cfg = resolve_config(inv);
    if (inv.epochs < 1) throw ConfigError("--epochs must be at least 1");
    const auto all = questions_of(cfg, inv.seed);
    const auto split = forge::make_splits(static_cast<int>(all.size()), cfg.data.test_boundary, cfg.data.shuffle_seed);
    if (split.skipped) throw Error("no questions after the test boundary");
    std::vector<EpisodeInput> seed_split, val_split;
    for (int i : split.seed_indices) seed_split.push_back(all[static_cast<std::size_t>(i)]);
    for (int i : split.val_indices) val_split.push_back(all[static_cast<std::size_t>(i)]);

    LibraryState lib = open_library(cfg);
    Session s = open_session(cfg, {.policy = true, .environment = true});
    const fs::path dir = cfg.paths.out;
    for (int e = 0; e < inv.epochs; ++e) {
        EpochConfig ec;
        ec.epoch_index = e;
        ec.run = cfg.run;
        ec.weights = cfg.weights;
        ec.gate = cfg.gate;
        ec.gate_mode = cfg.gate_mode;
        ec.lite = cfg.lite;
        ec.reward_lambda = cfg.reward_lambda;
        ec.forge = {cfg.run.budgets.max_steps, cfg.data.min_score, cfg.data.sft_floor};
        ec.out_dir = dir;
        auto result = run_epoch(*s.policy, *s.env, s.teacher.get(), s.proposer, lib, seed_split, val_split, ec);
        int accepted = 0;
        for (const auto& c : result.artifacts.candidates) accepted += c.decision == Decision::Accept ? 1 : 0;
        out << "epoch " << e << ": " << result.artifacts.failures.size() << " failure patterns, "
            << result.artifacts.clusters.size() << " clusters, " << result.artifacts.candidates.size()
            << " candidates, " << accepted << " admitted, delta_em=" << result.artifacts.delta_em << "\n";
        lib = std::move(result.library);
    }
    io::save_library_dir(lib, dir / "library");
    return kExitOk;
}

int cmd_build_data(const Invocation& inv, std::ostream& out) {
    const AppConfig cfg = resolve_config(inv);
    auto trajs = trajectories_of(inv);
    for (auto& t : trajs) {
        bool scored = !t.steps.empty();
        for (const auto& st : t.steps) scored = scored && st.signals.has_value();
        if (!scored && !t.steps.empty()) score_trajectory(t, cfg.weights);
    }
    const forge::ForgeConfig fc{cfg.run.budgets.max_steps, cfg.data.min_score, cfg.data.sft_floor};
    const auto set = forge::build_training_set(trajs, {}, fc);
    forge::write_training_set(fs::path(cfg.paths.out) / "train", set);
    out << "build-data: kept " << set.trajectories_kept << "/" << set.trajectories_in << " trajectories; sft="
        << set.sft.size() << " dpo=" << set.dpo.size() << " prompt_only=" << set.prompt_only.size() << "\n";
    return kExitOk;
}

int cmd_validate(const Invocation& inv, std::ostream& out) {
    fs::path path = inv.skill_path;
    if (fs::is_directory(path)) path /= "SKILL.md";
    if (!fs::exists(path)) throw ConfigError("no skill document at " + path.string());
    CandidateSkill cand;
    cand.doc_text = io::read_text(path);
    if (auto rule = path.parent_path() / "rule.txt"; fs::exists(rule)) cand.rule_source = io::read_text(rule);
    try {
        const auto doc = split_skill_doc(cand.doc_text);
        cand.base_id = doc.frontmatter.value("skill_id", "");
    } catch (const SkillDocError&) {
    }
    const auto report = rules::validate_candidate(cand);
    auto mark = [](bool ok) { return ok ? "PASS" : "FAIL"; };
    out << "syntax:      " << mark(report.syntax_ok) << "\n"
        << "interface:   " << mark(report.interface_ok) << "\n"
        << "mock_exec:   " << mark(report.mock_exec_ok) << " (" << report.invocations_run << " invocations)\n"
        << "return_type: " << mark(report.return_type_ok) << "\n";
    for (const auto& d : report.diagnostics) out << "  " << d << "\n";
    out << report.passed() << "/4 checks passed, q_exec=" << report.q_exec << "\n";
    if (!inv.out.empty()) io::write_json(fs::path(inv.out) / "validation.json", Json(report));
    return report.passed() == 4 ? kExitOk : kExitFailure;
}

int cmd_stats(const Invocation& inv, std::ostream& out) {
    const AppConfig cfg = resolve_config(inv);
    const auto trajs = trajectories_of(inv);
    const auto report = forge::trigger_stats(trajs);
    io::write_json(fs::path(cfg.paths.out) / "trigger_stats.json", forge::to_json(report));
    out << forge::render(report);
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"skillrt: skill-program runtime for tool-using agents", "skillrt"};
    app.require_subcommand(1);
    app.fallthrough();
    Invocation inv;

    app.add_option("--config", inv.config_path, "YAML configuration file");
    app.add_option("--out", inv.out, "Output directory");
    app.add_option("--set", inv.sets, "Override any setting as key=value (repeatable)");
    std::map<std::string, CLI::Option*> setting_opts;
    for (const auto& key : known_keys())
        setting_opts[key] = app.add_option("--" + key, inv.flags[key], "Setting " + key)->group("Settings");

    auto* rollout_cmd = app.add_subcommand("rollout", "Run episodes over a questions file");
    rollout_cmd->add_option("--questions", inv.questions, "Questions JSONL");
    rollout_cmd->add_option("--library", inv.library, "Skill library directory");
    rollout_cmd->add_option("--corpus", inv.corpus, "Simulation corpus JSON");
    rollout_cmd->add_option("--seed", inv.seed, "Base episode seed");

    auto* score_cmd = app.add_subcommand("score", "Score stored trajectories");
    score_cmd->add_option("--trajectories", inv.trajectories, "Trajectories JSONL")->required();

    auto* analyze_cmd = app.add_subcommand("analyze", "Mine failure patterns from trajectories");
    analyze_cmd->add_option("--trajectories", inv.trajectories, "Trajectories JSONL")->required();
    analyze_cmd->add_option("--library", inv.library, "Skill library directory");

    auto* evolve_cmd = app.add_subcommand("evolve", "Run self-improving epochs");
    evolve_cmd->add_option("--questions", inv.questions, "Questions JSONL");
    evolve_cmd->add_option("--library", inv.library, "Seed skill library directory");
    evolve_cmd->add_option("--corpus", inv.corpus, "Simulation corpus JSON");
    evolve_cmd->add_option("--seed", inv.seed, "Base episode seed");
    evolve_cmd->add_option("--epochs", inv.epochs, "Number of epochs");

    auto* data_cmd = app.add_subcommand("build-data", "Build training files from trajectories");
    data_cmd->add_option("--trajectories", inv.trajectories, "Trajectories JSONL")->required();

    auto* validate_cmd = app.add_subcommand("validate-skill", "Run the validation sandbox on one candidate");
    validate_cmd->add_option("path", inv.skill_path, "Candidate directory or SKILL.md")->required();

    auto* stats_cmd = app.add_subcommand("stats", "Report skill trigger statistics");
    stats_cmd->add_option("--trajectories", inv.trajectories, "Trajectories JSONL")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << kUsage;
        return kExitUsage;
    }
    for (auto it = inv.flags.begin(); it != inv.flags.end();)
        it = setting_opts.at(it->first)->count() ? std::next(it) : inv.flags.erase(it);

    try {
        if (*rollout_cmd) return cmd_rollout(inv, out);
        if (*score_cmd) return cmd_score(inv, out);
        if (*analyze_cmd) return cmd_analyze(inv, out);
        if (*evolve_cmd) return cmd_evolve(inv, out);
        if (*data_cmd) return cmd_build_data(inv, out);
        if (*validate_cmd) return cmd_validate(inv, out);
        if (*stats_cmd) return cmd_stats(inv, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    err << kUsage;
    return kExitUsage;
}

}  // namespace skillrt::app
