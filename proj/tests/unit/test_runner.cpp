#include "fixtures.hpp"

#include "skillrt/errors.hpp"
#include "skillrt/runner/app_config.hpp"
#include "skillrt/runner/cli.hpp"
#include "skillrt/runner/session.hpp"
#include "skillrt/runner/wire.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

using namespace skillrt;
namespace st = skillrt::testing;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"skillrt"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = app::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("skillrt_" + name)) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }
    std::string operator/(const std::string& rel) const { return (path_ / rel).string(); }

private:
    fs::path path_;
};

std::string fake_policy(const std::string& mode) {
    return "python3 " + (fs::path(SKILLRT_FIXTURE_DIR).parent_path() / "support" / "fake_policy.py").string() + " " +
           mode;
}

}  // namespace

TEST(SimCorpus, RanksByDistinctQueryTokens) {
    const auto corpus = sim::load_corpus(st::fixture("walton_corpus.json"));
    const auto hit = corpus.search("Helen Walton death date");
    EXPECT_FALSE(hit.empty);
    ASSERT_FALSE(hit.doc_ids.empty());
    EXPECT_EQ(hit.doc_ids[0], "helen_walton");
    EXPECT_LE(hit.doc_ids.size(), 3u);
    EXPECT_TRUE(corpus.search("zeppelin").empty);
    EXPECT_TRUE(corpus.read("walmart"));
    EXPECT_FALSE(corpus.read("nowhere"));
    EXPECT_THROW(sim::corpus_from_json(Json{{"documents", {{{"title", "no id"}}}}}), Error);
}

TEST(Scripted, PolicyExpectationsAndExhaustion) {
    std::vector<sim::ScriptStep> steps{{{ActionType::Search, "q"}, "t0", std::nullopt},
                                       {{ActionType::Final, "a"}, "", std::string("needle")}};
    sim::ScriptedPolicy lax(steps);
    lax.begin_episode("q", 0);
    PolicyView v{"q", {"start"}, {}, 0};
    EXPECT_EQ(lax.propose(v).type, ActionType::Search);
    EXPECT_EQ(lax.last_thought(), "t0");
    EXPECT_EQ(lax.propose(v).type, ActionType::Final);
    EXPECT_THROW(lax.propose(v), PolicyProtocolError);

    sim::ScriptedPolicy strict(steps, true);
    strict.begin_episode("q", 0);
    strict.propose(v);
    EXPECT_THROW(strict.propose(v), PolicyProtocolError);
    strict.begin_episode("q", 0);
    strict.propose(v);
    v.observations.push_back("the needle is here");
    EXPECT_NO_THROW(strict.propose(v));
}

TEST(Scripted, BookAndTeacher) {
    auto book = sim::load_script_book(st::fixture("scripts.json"));
    book.begin_episode(st::kWaltonQuestion, 0);
    EXPECT_EQ(book.propose({st::kWaltonQuestion, {}, {}, 0}).type, ActionType::Search);
    book.begin_episode("unknown question", 0);
    EXPECT_THROW(book.propose({"unknown question", {}, {}, 0}), PolicyProtocolError);

    sim::ScriptedTeacher t;
    t.set("p", {"one", "two"});
    EXPECT_EQ(t.request({"p"}), "one");
    EXPECT_EQ(t.request({"p"}), "two");
    EXPECT_EQ(t.request({"p"}), "two");
    EXPECT_FALSE(t.request({"other"}));
    EXPECT_EQ(t.log().size(), 4u);
}

TEST(Json, TrajectoryRoundTripIsExact) {
    const auto corpus = sim::load_corpus(st::fixture("walton_corpus.json"));
    sim::SimEnvironment env(corpus);
    const auto lib = io::load_library_dir(st::fixture("library"));
    ArmedSkills armed{{st::library_skill(lib, "insufficient_exploration")}, {}};
    auto policy = st::walton_policy();
    Trajectory t = run_episode(policy, env, armed, RunConfig{}, st::walton_input());
    score_trajectory(t, SignalWeights{});
    TempDir dir("json");
    io::write_trajectories(dir.path() / "t.jsonl", {t});
    const auto back = io::read_trajectories(dir.path() / "t.jsonl");
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0], t);
    io::write_trajectories(dir.path() / "u.jsonl", back);
    EXPECT_EQ(io::read_text(dir.path() / "t.jsonl"), io::read_text(dir.path() / "u.jsonl"));
}

TEST(Config, DefaultsOverridesAndErrors) {
    const auto cfg = app::build_config({{"run.mode", "math"}, {"budgets.max_steps", "7"}});
    EXPECT_EQ(cfg.run.mode, Mode::Math);
    EXPECT_EQ(cfg.run.budgets.max_steps, 7);
    EXPECT_EQ(cfg.run.handler_vote_threshold, defaults_for(Mode::Math).handler_vote_threshold);
    // the mode reset applies first, whatever the key order
    EXPECT_EQ(app::build_config({{"budgets.max_steps", "7"}, {"run.mode", "math"}}).run.budgets.max_steps, 7);
    EXPECT_EQ(app::build_config({{"run.modify_cap_overrides.guard", "5"}}).run.modify_cap_overrides.at("guard"), 5);
    EXPECT_DOUBLE_EQ(app::build_config({{"weights.fine.s1.tp", "0.3"}}).weights.weight("s1.tp"), 0.3);
    EXPECT_THROW(app::build_config({{"run.no_such_key", "1"}}), ConfigError);
    EXPECT_THROW(app::build_config({{"budgets.max_steps", "many"}}), ConfigError);
    EXPECT_THROW(app::build_config({{"gate.mode", "lenient"}}), ConfigError);
    EXPECT_FALSE(app::known_keys().empty());
}

TEST(Config, YamlFlatteningAndEnvironment) {
    const auto flat = app::flatten_yaml(io::read_text(st::fixture("rollout.yaml")));
    const auto cfg = app::build_config(flat);
    EXPECT_FALSE(cfg.run.teacher_selection);
    EXPECT_EQ(cfg.ports.policy, "script:scripts.json");
    EXPECT_THROW(app::flatten_yaml("run: [unclosed"), ConfigError);

    ::setenv("SKILLRT_TEACHER", "cmd:true", 1);
    bool found = false;
    for (const auto& [k, v] : app::environment_settings()) found = found || (k == "ports.teacher" && v == "cmd:true");
    ::unsetenv("SKILLRT_TEACHER");
    EXPECT_TRUE(found);
}

TEST(Session, QuestionsFile) {
    const auto qs = app::read_questions(st::fixture("questions.jsonl"), 10);
    ASSERT_EQ(qs.size(), 1u);
    EXPECT_EQ(qs[0].gold_answers[0], "Sam Walton");
    EXPECT_EQ(qs[0].seed, 10u);
    EXPECT_THROW(app::read_questions(st::fixture("missing.jsonl")), ConfigError);
}

TEST(Wire, PolicyRoundTrip) {
    wire::WirePolicy policy(fake_policy("script"), std::chrono::milliseconds(5000));
    const auto a = policy.propose({"q", {"start"}, {}, 0});
    EXPECT_EQ(a, (ActionProposal{ActionType::Search, "Helen Walton death date"}));
    EXPECT_EQ(policy.last_thought(), "look it up");
    EXPECT_EQ(policy.propose({"q", {"start"}, {}, 1}).type, ActionType::Final);
}

TEST(Wire, TeacherAndFailures) {
    wire::WireTeacher teacher(fake_policy("teacher"), std::chrono::milliseconds(5000));
    EXPECT_EQ(teacher.request({"query_rewrite"}), "purpose=query_rewrite");

    wire::WirePolicy stale(fake_policy("wrong_id"), std::chrono::milliseconds(5000));
    EXPECT_THROW(stale.propose({"q", {}, {}, 0}), PolicyProtocolError);

    wire::WirePolicy silent(fake_policy("silent"), std::chrono::milliseconds(300));
    EXPECT_THROW(silent.propose({"q", {}, {}, 0}), Timeout);

    wire::WireTeacher gone(fake_policy("silent"), std::chrono::milliseconds(300));
    EXPECT_FALSE(gone.request({"anything"}));

    EXPECT_THROW(wire::parse_action_reply({{"action_type", "JUMP"}}), PolicyProtocolError);
    EXPECT_THROW(wire::parse_action_reply({{"arg", "x"}}), PolicyProtocolError);
    EXPECT_EQ(wire::request_message("propose_action", 3, Json::object())["request_id"], 3);
}

TEST(Wire, EpisodeOverTheWire) {
    const auto corpus = sim::load_corpus(st::fixture("walton_corpus.json"));
    sim::SimEnvironment env(corpus);
    wire::WirePolicy policy(fake_policy("script"), std::chrono::milliseconds(5000));
    const auto t = run_episode(policy, env, ArmedSkills{}, RunConfig{}, st::walton_input());
    EXPECT_EQ(t.em, 1);
    EXPECT_EQ(t.steps.size(), 2u);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli({}).code, app::kExitUsage);
    EXPECT_EQ(cli({"fly"}).code, app::kExitUsage);
    EXPECT_EQ(cli({"--help"}).code, app::kExitOk);
    EXPECT_EQ(cli({"--set", "run.bogus=1", "stats", "--trajectories", "x.jsonl"}).code, app::kExitUsage);
    EXPECT_EQ(cli({"validate-skill", st::fixture("candidates/good_candidate").string()}).code, app::kExitOk);
    const auto bad = cli({"validate-skill", st::fixture("candidates/mock_type_mismatch").string()});
    EXPECT_EQ(bad.code, app::kExitFailure);
    EXPECT_NE(bad.out.find("2/4 checks passed"), std::string::npos);
}

TEST(Cli, PipelineFromRolloutToStats) {
    TempDir dir("cli_pipeline");
    const std::string config = st::fixture("rollout.yaml").string();
    const auto r = cli({"--config", config, "--out", dir / "roll", "rollout"});
    ASSERT_EQ(r.code, app::kExitOk) << r.err;
    const std::string trajs = dir / "roll/trajectories.jsonl";
    ASSERT_TRUE(fs::exists(trajs));
    EXPECT_EQ(io::read_trajectories(trajs)[0].em, 1);

    EXPECT_EQ(cli({"--out", dir / "score", "score", "--trajectories", trajs}).code, app::kExitOk);
    EXPECT_TRUE(fs::exists(dir / "score/scored_trajectories.jsonl"));
    EXPECT_EQ(cli({"--out", dir / "an", "analyze", "--trajectories", trajs}).code, app::kExitOk);
    EXPECT_TRUE(fs::exists(dir / "an/clusters.json"));
    EXPECT_EQ(cli({"--out", dir / "data", "build-data", "--trajectories", dir / "score/scored_trajectories.jsonl"}).code,
              app::kExitOk);
    EXPECT_TRUE(fs::exists(dir / "data/train/sft.jsonl"));
    const auto stats = cli({"--out", dir / "stats", "stats", "--trajectories", trajs});
    EXPECT_EQ(stats.code, app::kExitOk);
    EXPECT_NE(stats.out.find("insufficient_exploration"), std::string::npos);
    EXPECT_NE(cli({"--out", dir / "x", "score", "--trajectories", dir / "missing.jsonl"}).code, app::kExitOk);
}

TEST(Cli, EvolveLiteWritesLibrary) {
    TempDir dir("cli_evolve");
    std::string rows;
    for (int k = 0; k < 4; ++k)
        rows += Json{{"id", "w" + std::to_string(k)}, {"question", st::kWaltonQuestion}, {"answers", {"Sam Walton"}}}
                    .dump() +
                "\n";
    io::write_text(dir.path() / "q.jsonl", rows);
    const auto r = cli({"--config", st::fixture("rollout.yaml").string(), "--out", dir / "evo", "--gate.lite", "true",
                        "--paths.questions", dir / "q.jsonl", "evolve", "--epochs", "1"});
    ASSERT_EQ(r.code, app::kExitOk) << r.err;
    EXPECT_NE(r.out.find("epoch 0:"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "evo/epoch_0/summary.json"));
    EXPECT_TRUE(fs::exists(dir / "evo/library/library_history.json"));
}
