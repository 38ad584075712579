// Acceptance runner: one PASS/FAIL line per criterion.
//
// Usage: skillrt_acceptance [--expect-fail N]...
// Exit status is 0 when the failing criteria are exactly the expected ones.

#include "fixtures.hpp"

#include "skillrt/data_forge/data_forge.hpp"
#include "skillrt/errors.hpp"
#include "skillrt/evolution/evolution.hpp"
#include "skillrt/failure_miner/miner.hpp"
#include "skillrt/failure_miner/text_metrics.hpp"
#include "skillrt/harness/dispatch.hpp"
#include "skillrt/io/json_io.hpp"
#include "skillrt/rule_engine/sandbox.hpp"
#include "skillrt/runner/cli.hpp"
#include "skillrt/signal_scorer/scorer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace skillrt;
namespace st = skillrt::testing;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        if (pass) detail = what;
        else if (detail.size() < 400) detail += "; " + what;
        pass = false;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1

struct FamilyRow {
    const char* domain;
    const char* family;
    double c, t, i, e, v, printed;
};

// Per-family review means and the printed composite, transcribed row by row.
const FamilyRow kFamilyRows[] = {
    {"web", "reasoning_hallucination", 0.90, 0.80, 0.92, 0.98, 0.86, 0.89},
    {"web", "premature_final", 0.90, 0.80, 0.83, 1.00, 0.83, 0.88},
    {"web", "no_read_before_final", 0.85, 0.72, 0.85, 0.95, 0.80, 0.84},
    {"web", "pf_override_harmful", 0.80, 0.70, 0.90, 1.00, 0.80, 0.84},
    {"web", "wrong_entity_focus", 0.80, 0.78, 0.72, 0.95, 0.75, 0.80},
    {"math", "reasoning_hallucination", 0.93, 0.83, 0.87, 1.00, 0.83, 0.90},
    {"math", "premature_final", 0.90, 0.83, 0.87, 1.00, 0.80, 0.89},
    {"math", "wrong_entity_focus", 0.80, 0.67, 0.77, 0.93, 0.70, 0.78},
    {"math", "format_mismatch", 0.77, 0.67, 0.70, 0.90, 0.67, 0.74},
    {"code", "reasoning_hallucination", 0.94, 0.87, 0.87, 1.00, 0.83, 0.91},
    {"code", "premature_final", 0.88, 0.83, 0.79, 0.96, 0.81, 0.86},
    {"code", "format_mismatch", 0.78, 0.68, 0.67, 0.94, 0.68, 0.76},
    {"code", "incomplete_implementation", 0.80, 0.70, 0.67, 0.92, 0.70, 0.76},
    {"code", "incomplete_logic", 0.72, 0.65, 0.75, 0.93, 0.65, 0.74},
    {"code", "wrong_entity_focus", 0.78, 0.67, 0.65, 0.90, 0.68, 0.74},
    {"code", "incomplete_solution", 0.80, 0.70, 0.60, 0.90, 0.70, 0.74},
    {"code", "incomplete_code", 0.80, 0.70, 0.60, 0.90, 0.70, 0.74},
};

constexpr double kC1Tolerance = 0.005;

Verdict criterion1() {
    Verdict v;
    const auto t0 = Clock::now();
    int within = 0;
    for (const auto& row : kFamilyRows) {
        ReviewScores r;
        r.concept_score = row.c;
        r.trigger = row.t;
        r.intervene = row.i;
        r.exec_review = row.e;
        r.validation = row.v;
        const double q = composite_q(r);
        const double diff = std::abs(q - row.printed);
        if (diff <= kC1Tolerance + 1e-9) ++within;
        v.require(diff <= kC1Tolerance + 1e-9, std::string(row.domain) + "/" + row.family + " composite " +
                                                   fmt(q) + " vs printed " + fmt(row.printed, 2) + " (|diff| " +
                                                   fmt(diff) + ")");
    }
    v.require(std::size(kFamilyRows) == 17, "expected 17 table rows");
    v.require(seconds_since(t0) < 1.0, "runtime over 1 s");
    if (v.pass) v.detail = "17/17 rows within 0.005";
    else v.detail = std::to_string(within) + "/17 rows within 0.005; " + v.detail;
    return v;
}

// ---------------------------------------------------------------- criterion 2

// Hand-derived decision table on 0.05 grid indices (value = k / 20).
Decision expected_decision(int qer_k, int comp_k, bool is_new, std::optional<Decision> line) {
    if (qer_k < 6) return Decision::Reject;           // reviewed executability below 0.30
    const int group_k = is_new ? 15 : 12;             // 0.75 new group, 0.60 same group
    if (line) {
        if (*line == Decision::Accept) return comp_k >= group_k ? Decision::Accept : Decision::Revise;
        return *line;
    }
    if (comp_k >= 12 && comp_k >= group_k) return Decision::Accept;
    if (comp_k * 5 >= 42) return Decision::Revise;    // 0.42 lies between grid points 0.40 and 0.45
    return Decision::Reject;
}

Verdict criterion2() {
    Verdict v;
    const auto t0 = Clock::now();
    const std::optional<Decision> lines[] = {std::nullopt, Decision::Accept, Decision::Revise, Decision::Reject};
    int cases = 0, agree = 0;
    for (int qk = 0; qk <= 20; ++qk)
        for (int ck = 0; ck <= 20; ++ck)
            for (bool is_new : {true, false})
                for (const auto& line : lines) {
                    ++cases;
                    const Decision got = decide_admission(1.0, qk / 20.0, ck / 20.0, line, is_new);
                    const Decision want = expected_decision(qk, ck, is_new, line);
                    if (got == want) ++agree;
                    else
                        v.require(false, "q_exec_review=" + fmt(qk / 20.0, 2) + " composite=" + fmt(ck / 20.0, 2) +
                                             (is_new ? " new" : " same") + " got " + std::string(to_string(got)) +
                                             " want " + std::string(to_string(want)));
                }
    // A failed executable check rejects regardless of the review.
    v.require(decide_admission(0.75, 1.0, 1.0, Decision::Accept, false) == Decision::Reject,
              "q_exec < 1 must reject");
    v.require(seconds_since(t0) < 1.0, "runtime over 1 s");
    if (v.pass) v.detail = std::to_string(agree) + "/" + std::to_string(cases) + " grid cases agree";
    return v;
}

// ---------------------------------------------------------------- criterion 3

// Independent restatement of the fine sub-signal values.
std::map<std::string, double> oracle_values(const StepRecord& s, int em, int length) {
    std::map<std::string, double> val;
    const bool fired = !s.fired.empty();
    bool risky = false;
    if (s.a_orig.type == ActionType::Final) risky = s.ctx_snapshot.read_count == 0 || s.ctx_snapshot.step_count < 3;
    if (s.a_orig.type == ActionType::Search) risky = s.ctx_snapshot.empty_results;
    bool eff_modify = false, eff_inject = false;
    for (const auto& f : s.fired) {
        eff_modify |= f.effective && f.kind == InterventionKind::ModifyAction;
        eff_inject |= f.effective && f.kind == InterventionKind::InjectContext;
    }
    const bool rescue = s.was_modified && s.a_orig.type == ActionType::Final && s.a_final.type == ActionType::Read;
    val["s1.tp"] = risky && fired;
    val["s1.fp"] = !risky && fired;
    val["s1.fn"] = risky && !fired;
    val["s1.phase"] = fired ? 1.0 - double(s.step_index) / s.ctx_snapshot.max_steps : 0.0;
    val["s2.pre_action"] = eff_modify;
    val["s2.post_obs"] = eff_inject;
    val["s3.syntactic"] = fired && !s.a_final.arg.empty();
    val["s3.semantic"] = !fired ? 0.0 : rescue ? 0.7 : s.was_modified ? 0.5 : 0.3;
    double local = 0.0;
    if (s.was_modified) {
        const auto o = s.a_orig.type, f = s.a_final.type;
        local = (o == ActionType::Final && f == ActionType::Read)       ? 0.8
                : (o == ActionType::Final && f == ActionType::Search)   ? 0.7
                : (o == ActionType::Search && f == ActionType::Search) ? 0.5
                                                                        : 0.3;
    }
    val["s4.local"] = local;
    val["s4.downstream"] = em;
    val["s4.cost"] = std::min(1.0, std::max(0.0, (length - 15) / 10.0));
    val["s4.side_effect"] = s.was_modified && em == 0;
    return val;
}

const std::map<std::string, double> kPaperWeights = {
    {"s1.tp", 0.25},          {"s1.fp", -0.10},         {"s1.fn", -0.10},        {"s1.phase", 0.05},
    {"s2.pre_action", 0.35},  {"s2.post_obs", 0.35},    {"s2.pre_reasoning", 0.15}, {"s2.post_action", 0.15},
    {"s3.syntactic", 0.20},   {"s3.semantic", 0.50},    {"s3.domain", 0.30},     {"s4.local", 0.40},
    {"s4.downstream", 0.40},  {"s4.cost", -0.10},       {"s4.side_effect", -0.10}};

StepRecord random_step(std::mt19937_64& rng) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
    const ActionType types[] = {ActionType::Search, ActionType::Read, ActionType::Final};
    StepRecord s;
    s.ctx_snapshot.max_steps = 1 + pick(20);
    s.step_index = pick(s.ctx_snapshot.max_steps);
    s.ctx_snapshot.step_count = s.step_index;
    s.ctx_snapshot.read_count = pick(3);
    s.ctx_snapshot.empty_results = pick(2) == 1;
    s.a_orig = {types[pick(3)], pick(4) ? "arg" + std::to_string(pick(100)) : ""};
    s.a_final = s.a_orig;
    if (pick(2)) s.a_final = {types[pick(3)], pick(5) ? "doc_" + std::to_string(pick(3)) : ""};
    s.was_modified = s.a_final != s.a_orig;
    const int fires = pick(4);
    const InterventionKind kinds[] = {InterventionKind::Noop, InterventionKind::ModifyAction,
                                      InterventionKind::InjectContext};
    for (int k = 0; k < fires; ++k) s.fired.push_back({"skill" + std::to_string(k), kinds[pick(3)], "r", pick(2) == 1});
    return s;
}

Verdict criterion3() {
    Verdict v;
    std::mt19937_64 rng(20240917);
    SignalWeights fine;
    fine.fine_mode = true;
    SignalWeights coarse;
    const std::array<double, 4> lambda{0.15, 0.10, 0.25, 0.50};
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const StepRecord s = random_step(rng);
        const int em = static_cast<int>(rng() % 2);
        const int length = 1 + static_cast<int>(rng() % 40);
        const auto val = oracle_values(s, em, length);

        double sum = 0.0;
        std::array<double, 4> fam{}, fam_abs{};
        for (const auto& [id, w] : kPaperWeights) {
            const auto it = val.find(id);
            const double c = w * (it == val.end() ? 0.0 : it->second);
            sum += c;
            fam[id[1] - '1'] += c;
            fam_abs[id[1] - '1'] += std::abs(w);
        }
        const SignalBreakdown got = score_step(s, em, length, fine);
        worst = std::max(worst, std::abs(got.a_step - sum));
        v.require(std::abs(got.a_step - sum) <= 1e-9, "fine a_step mismatch at case " + std::to_string(n));
        v.require(got.fine_values.size() == 15, "breakdown must hold 15 sub-signals");

        std::array<double, 4> z{};
        for (int f = 0; f < 4; ++f) z[f] = fam[f] / fam_abs[f];
        const SignalBreakdown cb = score_step(s, em, length, coarse);
        double coarse_oracle = 0.0;
        for (int f = 0; f < 4; ++f) coarse_oracle += lambda[f] * z[f];
        v.require(std::abs(cb.a_step - coarse_oracle) <= 1e-9, "coarse a_step mismatch at case " + std::to_string(n));

        // Single-signal ablations: drop family i, renormalize the rest.
        for (int drop = 0; drop < 4; ++drop) {
            std::array<double, 4> ablated{};
            for (int f = 0; f < 4; ++f) ablated[f] = f == drop ? 0.0 : lambda[f] / (1.0 - lambda[drop]);
            double predicted = 0.0;
            for (int f = 0; f < 4; ++f)
                if (f != drop) predicted += lambda[f] * z[f];
            predicted /= 1.0 - lambda[drop];
            v.require(std::abs(coarse_step_score(cb.z, ablated) - predicted) <= 1e-9,
                      "ablation of family " + std::to_string(drop + 1) + " mismatch at case " + std::to_string(n));
        }
    }
    const std::pair<int, double> costs[] = {{5, 0.0}, {15, 0.0}, {20, 0.5}, {25, 1.0}, {40, 1.0}};
    for (const auto& [t, want] : costs)
        v.require(std::abs(cost_value(t) - want) <= 1e-12, "cost at T=" + std::to_string(t));
    if (v.pass) v.detail = "1000 random steps, max |fine - oracle| = " + fmt(worst, 15) +
                           "; 4 ablations and 5 cost points agree";
    return v;
}

// ---------------------------------------------------------------- criterion 4

const char* const kActivations[] = {
    "action = FINAL",
    "action = SEARCH",
    "action = READ",
    "read_count = 0",
    "step_count >= 2",
    "action = FINAL and search_count > 0",
    "empty_results or contradictory_sources",
    "word_count(arg) > 3",
    "false",
};
const char* const kInterventions[] = {
    "modify READ \"doc_0\" reason \"r\"",
    "modify SEARCH \"{question}\" reason \"r\"",
    "inject \"check the evidence\" reason \"r\"",
    "noop reason \"r\"",
};

std::vector<ProgramPtr> program_pool() {
    std::vector<ProgramPtr> pool;
    int n = 0;
    for (const char* act : kActivations)
        for (const char* iv : kInterventions) {
            const std::string rule = std::string("activate: ") + act + "\nintervene:\n  otherwise => " + iv;
            const std::string id = n == 1 ? "retrieval_failure" : "skill_" + std::to_string(n);
            pool.push_back(st::program(id, rule, 0.1 + 0.8 * ((n * 37) % 100) / 100.0));
            ++n;
        }
    return pool;
}

Verdict criterion4() {
    Verdict v;
    const auto t0 = Clock::now();
    const auto pool = program_pool();
    std::mt19937_64 rng(4242);
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
    const ActionType types[] = {ActionType::Search, ActionType::Read, ActionType::Final};
    RunConfig cfg;
    int violations = 0;
    auto violate = [&](const std::string& what) {
        ++violations;
        v.require(false, what);
    };

    for (int c = 0; c < 10000; ++c) {
        std::vector<ProgramPtr> lib;
        const int size = pick(8);
        for (int k = 0; k < size; ++k) lib.push_back(pool[static_cast<std::size_t>(pick(static_cast<int>(pool.size())))]);
        StepContext ctx;
        ctx.question = "Which city hosted the games won by the team of the player?";
        ctx.max_steps = 10;
        std::map<std::string, int> modifies;
        for (int step = 0; step < 6; ++step) {
            ctx.step_count = step;
            ctx.read_count = pick(3);
            ctx.search_count = pick(3);
            ctx.empty_results = pick(3) == 0;
            const ActionProposal proposal{types[pick(3)], pick(2) ? "short query" : "a much longer query text here"};
            const auto d = dispatch(ctx, proposal, lib, cfg);
            int effective = 0, eff_modify = 0;
            for (const auto& f : d.fired) {
                effective += f.effective;
                if (f.effective && f.kind == InterventionKind::ModifyAction) {
                    ++eff_modify;
                    ++modifies[f.skill_id];
                }
            }
            if (effective == 0 && (d.final_action != proposal || !d.contexts.empty()))
                violate("identity broken with nothing fired (case " + std::to_string(c) + ")");
            if (eff_modify > 1) violate("more than one effective modify in a step (case " + std::to_string(c) + ")");
        }
        for (const auto& [id, count] : modifies) {
            const int cap = id == "retrieval_failure" ? 3 : 2;
            if (count > cap) violate(id + " modified " + std::to_string(count) + " times (cap " + std::to_string(cap) + ")");
        }

        // Handler vote: objections strictly above the mode threshold, one override per episode.
        const int threshold = pick(2) ? 4 : 3;
        const int objectors = pick(9);
        const auto override_search = [](const StepContext& c, const std::string&) {
            return ActionProposal{ActionType::Search, c.question};
        };
        std::vector<HandlerSpec> handlers;
        for (int h = 0; h < objectors; ++h)
            handlers.push_back({"h" + std::to_string(h),
                                [](const StepContext&, const std::string&) { return std::optional<std::string>("no"); },
                                override_search});
        for (int h = 0; h < pick(3); ++h)
            handlers.push_back({"quiet" + std::to_string(h),
                                [](const StepContext&, const std::string&) { return std::optional<std::string>(); },
                                override_search});
        StepContext vctx;
        vctx.question = "q";
        int overrides = 0;
        for (int call = 0; call < 3; ++call) {
            const auto vote = handler_vote(vctx, "answer", handlers, threshold);
            if (vote.override_action) ++overrides;
            if (call == 0 && vote.override_action.has_value() != (objectors > threshold))
                violate("vote override with " + std::to_string(objectors) + " objections at threshold " +
                        std::to_string(threshold));
        }
        if (overrides > 1) violate("more than one FINAL override in an episode");
    }
    const double secs = seconds_since(t0);
    v.require(secs < 30.0, "runtime " + fmt(secs, 1) + " s over 30 s");
    if (v.pass) v.detail = "10000 cases, 0 violations, " + fmt(secs, 2) + " s";
    else v.detail = std::to_string(violations) + " violations; " + v.detail;
    return v;
}

// ---------------------------------------------------------------- criterion 5

Verdict criterion5() {
    Verdict v;
    const std::pair<const char*, int> classes[] = {{"syntax_", 1}, {"interface_", 2}, {"mock_", 3}, {"return_", 4}};
    std::map<int, int> per_class;
    for (const auto& entry : std::filesystem::directory_iterator(st::fixture("candidates"))) {
        const std::string name = entry.path().filename().string();
        CandidateSkill cand;
        cand.doc_text = io::read_text(entry.path() / "SKILL.md");
        cand.base_id = name;
        const auto report = rules::validate_candidate(cand);
        if (name == "good_candidate") {
            v.require(report.passed() == 4, "clean candidate passed " + std::to_string(report.passed()) + "/4");
            v.require(report.invocations_run == 9, "clean candidate ran " + std::to_string(report.invocations_run) +
                                                       " invocations");
            continue;
        }
        int intended = 0;
        for (const auto& [prefix, check] : classes)
            if (name.starts_with(prefix)) intended = check;
        v.require(intended != 0, "unclassified fixture " + name);
        ++per_class[intended];
        const bool flags[] = {report.syntax_ok, report.interface_ok, report.mock_exec_ok, report.return_type_ok};
        int first_failed = 0;
        for (int k = 0; k < 4 && !first_failed; ++k)
            if (!flags[k]) first_failed = k + 1;
        v.require(first_failed == intended, name + " failed check " + std::to_string(first_failed) + " instead of " +
                                                std::to_string(intended));
        v.require(report.passed() == intended - 1, name + " passed " + std::to_string(report.passed()) + " checks");
    }
    for (int k = 1; k <= 4; ++k)
        v.require(per_class[k] == 3, "class " + std::to_string(k) + " has " + std::to_string(per_class[k]) + " fixtures");
    const auto ctxs = rules::canonical_mock_contexts();
    v.require(ctxs[0].step_count == 1 && ctxs[0].read_count == 0, "context (a) shape");
    v.require(ctxs[1].step_count == 5 && ctxs[1].read_count == 2, "context (b) shape");
    v.require(ctxs[2].step_count == 12 && ctxs[2].empty_results && ctxs[2].contradictory_sources, "context (c) shape");
    if (v.pass) v.detail = "12 bad candidates fail their intended check; clean candidate 4/4 with 9 invocations";
    return v;
}

// ---------------------------------------------------------------- criterion 6

Verdict criterion6() {
    Verdict v;
    const auto t0 = Clock::now();
    const auto lib = io::load_library_dir(st::fixture("library"));
    const auto corpus = sim::load_corpus(st::fixture("walton_corpus.json"));
    RunConfig cfg;

    ArmedSkills armed;
    for (const char* id : {"insufficient_exploration", "answer_completeness"}) {
        armed.programs.push_back(st::library_skill(lib, id));
        armed.prompt_skills.push_back(st::library_skill(lib, id));
    }
    sim::SimEnvironment env(corpus);
    auto policy = st::walton_policy();
    const Trajectory run = run_episode(policy, env, armed, cfg, st::walton_input());
    v.require(run.em == 1, "armed run em=" + std::to_string(run.em));
    v.require(run.steps.size() >= 3, "armed run too short");
    if (run.steps.size() >= 3) {
        const auto& s2 = run.steps[2];
        v.require(s2.a_orig.type == ActionType::Final, "step 2 original is " + describe(s2.a_orig));
        v.require(s2.a_final == ActionProposal{ActionType::Read, "doc_0"}, "step 2 final is " + describe(s2.a_final));
        bool reason = false;
        for (const auto& f : s2.fired) reason = reason || f.reason.find("forcing read") != std::string::npos;
        v.require(reason, "step 2 lacks a 'forcing read' reason");
    }

    auto bare_policy = st::walton_policy();
    sim::SimEnvironment bare_env(corpus);
    const Trajectory bare = run_episode(bare_policy, bare_env, ArmedSkills{}, cfg, st::walton_input());
    v.require(bare.em == 0, "bare run em=" + std::to_string(bare.em));

    auto again = st::walton_policy();
    sim::SimEnvironment again_env(corpus);
    v.require(run_episode(again, again_env, armed, cfg, st::walton_input()) == run, "armed run not deterministic");
    v.require(seconds_since(t0) < 1.0, "runtime over 1 s");
    if (v.pass) v.detail = "armed em=1 with step 2 FINAL(Sam) -> READ(doc_0); bare em=0";
    return v;
}

// ---------------------------------------------------------------- criterion 7

Trajectory failed_traj(const std::string& id, std::vector<StepRecord> steps, std::optional<std::string> answer,
                       std::string question = "Where was the author born?",
                       std::vector<std::string> gold = {"Paris"}) {
    Trajectory t;
    t.id = id;
    t.question = std::move(question);
    t.gold_answers = std::move(gold);
    t.final_answer = std::move(answer);
    for (std::size_t k = 0; k < steps.size(); ++k) {
        steps[k].step_index = static_cast<int>(k);
        steps[k].ctx_snapshot.max_steps = 5;
    }
    t.steps = std::move(steps);
    return t;
}

bool fires(const Trajectory& t, const std::string& category) {
    for (const auto& p : detect_heuristic(t))
        if (p.category == category) return true;
    return false;
}

std::string words(int from, int count, const std::string& stem = "w") {
    std::string out;
    for (int k = 0; k < count; ++k) out += (k ? " " : "") + stem + std::to_string(from + k);
    return out;
}

Verdict criterion7() {
    Verdict v;
    using AT = ActionType;
    const auto S = [](const std::string& a) { return st::step(AT::Search, a); };
    const auto R = [](const std::string& a) { return st::step(AT::Read, a); };
    const auto F = [](const std::string& a) { return st::step(AT::Final, a); };
    auto read_of = [&](const std::string& text) {
        StepRecord f = F("Paris France");
        f.ctx_snapshot.all_read_contents = {text};
        return f;
    };

    std::vector<std::pair<std::string, Trajectory>> cases;
    cases.push_back({"premature_final", failed_traj("t1", {F("London")}, "London")});
    cases.push_back({"repeated_search",
                     failed_traj("t2", {S("author birthplace city"), S("author birthplace city"), F("London")}, "London")});
    cases.push_back({"no_read_before_final", failed_traj("t3", {S("author"), S("author birth"), F("London")}, "London")});
    cases.push_back({"query_too_broad", failed_traj("t4", {S("author"), R("doc_0"), F("London")}, "London")});
    cases.push_back({"query_too_narrow",
                     failed_traj("t5", {S(words(0, 16)), R("doc_0"), F("London")}, "London")});
    cases.push_back({"wrong_entity_focus", failed_traj("t6", {S("author birth city"), R("doc_0"), F("London")}, "London")});
    {
        auto t = failed_traj("t7", {S("author birth city"), R("doc_0"), read_of("The author lived in Lyon.")},
                             "Paris France", "Where was the author born?", {"Paris"});
        cases.push_back({"reasoning_hallucination", t});
    }
    cases.push_back({"format_mismatch",
                     failed_traj("t8", {S("author birth city"), R("doc_0"), F(words(0, 21))}, words(0, 21))});
    cases.push_back({"partial_answer",
                     failed_traj("t9", {S("author birth city"), R("doc_0"), F("Paris")}, "Paris",
                                 "Who wrote the novel and where was the author born?", {"Hugo and Paris"})});
    {
        StepRecord s1 = S("author birth city");
        StepRecord r = R("doc_0");
        r.ctx_snapshot.contradictory_sources = true;
        cases.push_back({"contradictory_evidence_ignored", failed_traj("t10", {s1, r, F("London")}, "London")});
    }
    cases.push_back({"excessive_steps_no_progress",
                     failed_traj("t11", {S("author birth city"), S("author birth city"), S("author birth city"),
                                         R("doc_0"), F("London")},
                                 "London")});
    {
        StepRecord s = F("London");
        s.a_final = {AT::Search, "author birth city"};
        s.was_modified = true;
        cases.push_back({"pf_override_harmful", failed_traj("t12", {s, R("doc_0"), F("London")}, "London")});
    }
    std::set<std::string> covered;
    for (const auto& [category, traj] : cases) {
        v.require(fires(traj, category), category + " did not fire on its trajectory");
        covered.insert(category);
    }
    v.require(covered.size() == 12 && covered == std::set<std::string>(heuristic_categories().begin(),
                                                                       heuristic_categories().end()),
              "cases do not cover the 12 rules");

    // Jaccard 15/19 (0.789) must not fire; 17/21 (0.810) must.
    const std::string base15 = words(0, 15, "k"), base17 = words(0, 17, "k");
    const auto pair_traj = [&](const std::string& a, const std::string& b) {
        return failed_traj("j", {S(a), S(b), F("London")}, "London");
    };
    const std::string q79a = base15 + " a1 a2", q79b = base15 + " b1 b2";
    const std::string q81a = base17 + " a1 a2", q81b = base17 + " b1 b2";
    v.require(std::abs(text::token_jaccard(q79a, q79b) - 15.0 / 19.0) < 1e-12, "jaccard 0.79 construction");
    v.require(std::abs(text::token_jaccard(q81a, q81b) - 17.0 / 21.0) < 1e-12, "jaccard 0.81 construction");
    v.require(!fires(pair_traj(q79a, q79b), "repeated_search"), "repeated_search fired at jaccard 0.79");
    v.require(fires(pair_traj(q81a, q81b), "repeated_search"), "repeated_search silent at jaccard 0.81");

    // Entity overlap 29/100 fires, 31/100 does not.
    const std::vector<std::string> gold{words(0, 100, "e")};
    const auto answer_traj = [&](const std::string& a) {
        return failed_traj("e", {S("author birth city"), R("doc_0"), F(a)}, a, "Where was the author born?", gold);
    };
    v.require(std::abs(entity_overlap(words(0, 29, "e"), gold) - 0.29) < 1e-12, "overlap 0.29 construction");
    v.require(fires(answer_traj(words(0, 29, "e")), "wrong_entity_focus"), "wrong_entity_focus silent at 29%");
    v.require(!fires(answer_traj(words(0, 31, "e")), "wrong_entity_focus"), "wrong_entity_focus fired at 31%");
    if (v.pass) v.detail = "12/12 rules fire; jaccard 0.79 silent / 0.81 fires; overlap 29% fires / 31% silent";
    return v;
}

// ---------------------------------------------------------------- criterion 8

// Answers proposal requests per failure category with fixture candidates.
class FixtureProposer : public ModelPort {
public:
    std::optional<std::string> request(const TeacherRequest& req) override {
        ++requests;
        const std::string category = req.payload.value("category", "");
        static const std::map<std::string, std::string> by_category = {
            {"premature_final", "good_candidate"},
            {"no_read_before_final", "mock_type_mismatch"},
            {"reasoning_hallucination", "syntax_unknown_field"},
            {"wrong_entity_focus", "return_empty_inject"},
            {"partial_answer", "interface_no_activate"},
        };
        auto it = by_category.find(category);
        if (it == by_category.end()) return std::nullopt;
        const std::string doc = io::read_text(st::fixture("candidates/" + it->second + "/SKILL.md"));
        return Json{{"base_id", category}, {"doc_text", doc}}.dump();
    }
    int requests = 0;
};

std::vector<EpisodeInput> premature_inputs(int n, int offset) {
    std::vector<EpisodeInput> out;
    for (int k = 0; k < n; ++k) {
        const int id = offset + k;
        out.push_back({"q" + std::to_string(id), "synthetic",
                       "Which river runs through town " + std::to_string(id) + "?",
                       {"river" + std::to_string(id)}, static_cast<std::uint64_t>(id)});
    }
    return out;
}

sim::ScriptBookPolicy premature_policy(const std::vector<EpisodeInput>& inputs) {
    std::map<std::string, std::vector<sim::ScriptStep>> book;
    for (const auto& in : inputs) {
        const std::string answer = in.gold_answers.front();
        book[in.question] = {{{ActionType::Final, "unknown"}, "", std::nullopt},
                             {{ActionType::Search, "town river"}, "", std::nullopt},
                             {{ActionType::Read, "doc_0"}, "", std::nullopt},
                             {{ActionType::Final, answer}, "", std::nullopt}};
    }
    return sim::ScriptBookPolicy(std::move(book));
}

sim::SimCorpus premature_corpus(int n) {
    std::vector<sim::Document> docs;
    for (int k = 0; k < n; ++k)
        docs.push_back({"d" + std::to_string(k), "Town " + std::to_string(k),
                        "The river" + std::to_string(k) + " runs through town " + std::to_string(k) + "."});
    return sim::SimCorpus(std::move(docs));
}

Verdict criterion8() {
    Verdict v;
    const auto t0 = Clock::now();
    const auto seed = premature_inputs(5, 0);
    const auto val = premature_inputs(2, 5);
    std::vector<EpisodeInput> all = seed;
    all.insert(all.end(), val.begin(), val.end());
    const auto corpus = premature_corpus(7);
    const std::string review =
        R"({"q_concept":0.9,"q_trigger":0.85,"q_intervene":0.9,"q_exec_review":0.95,"q_val":0.85,"decision":"ACCEPT"})";

    auto run = [&](GateMode mode) {
        auto policy = premature_policy(all);
        sim::SimEnvironment env(corpus);
        // The same teacher ranks programs, so an admitted skill gets armed on val.
        sim::ScriptedTeacher reviewer({{"skill_review", {review}}, {"pf_select", {R"(["premature_final"])"}}});
        FixtureProposer proposer;
        EpochConfig cfg;
        cfg.gate_mode = mode;
        if (std::getenv("SKILLRT_ACCEPTANCE_OUT")) cfg.out_dir = std::getenv("SKILLRT_ACCEPTANCE_OUT");
        const LibraryState empty;
        auto result = run_epoch(policy, env, &reviewer, &proposer, empty, seed, val, cfg);
        return std::make_pair(std::move(result), proposer.requests);
    };

    const auto [strict, strict_requests] = run(GateMode::Strict);
    int premature = 0;
    for (const auto& t : strict.artifacts.trajectories)
        premature += fires(t, "premature_final") ? 1 : 0;
    v.require(premature == 5, std::to_string(premature) + " premature_final failures in the seed split");
    v.require(strict_requests <= 5, std::to_string(strict_requests) + " proposals");
    const auto& cands = strict.artifacts.candidates;
    bool family_admitted = false;
    for (const auto& c : cands) {
        if (c.decision == Decision::Accept && c.candidate.origin_category == "premature_final") family_admitted = true;
        if (c.decision == Decision::Accept && c.exec.passed() < 4)
            v.require(false, "strict gate admitted " + c.candidate.base_id + " with " +
                                 std::to_string(c.exec.passed()) + "/4 checks");
    }
    v.require(family_admitted, "no premature_final candidate admitted");
    v.require(strict.library.history().size() == cands.size(),
              "history grew by " + std::to_string(strict.library.history().size()) + " for " +
                  std::to_string(cands.size()) + " validated candidates");
    v.require(strict.artifacts.delta_em > 0.0, "admitted skill did not raise val EM");

    const auto [audit, audit_requests] = run(GateMode::Audit);
    int compile_passing = 0, admitted = 0;
    for (const auto& c : audit.artifacts.candidates) {
        const bool compiles = c.exec.syntax_ok && c.exec.interface_ok;
        compile_passing += compiles;
        admitted += c.decision == Decision::Accept;
        v.require((c.decision == Decision::Accept) == compiles,
                  "audit mode: " + c.candidate.base_id + " compile=" + std::to_string(compiles) +
                      " decision=" + std::string(to_string(c.decision)));
    }
    v.require(audit_requests <= 5, "audit run made too many proposals");
    v.require(admitted > 1, "audit mode admitted only " + std::to_string(admitted));
    const double secs = seconds_since(t0);
    v.require(secs < 10.0, "runtime " + fmt(secs, 1) + " s over 10 s");
    if (v.pass)
        v.detail = std::to_string(cands.size()) + " candidates from " + std::to_string(strict_requests) +
                   " proposals; strict admitted premature_final only, audit admitted " + std::to_string(admitted) +
                   "/" + std::to_string(compile_passing) + " compile-passing";
    return v;
}

// ---------------------------------------------------------------- criterion 9

Verdict criterion9() {
    Verdict v;
    Trajectory t;
    t.em = 0;
    t.f1 = 0.75;
    t.steps.resize(5);  // step economy 0 at max_steps 4
    const auto boundary = forge::rs_filter(t, 4);
    v.require(std::abs(boundary.score - 0.15) < 1e-12 && boundary.keep, "score 0.15 must keep (got " +
                                                                             fmt(boundary.score, 17) + ")");
    t.f1 = 0.5;
    t.steps.resize(3);  // step economy 0.5
    v.require(forge::rs_filter(t, 4).keep, "0.2*0.5 + 0.1*0.5 must keep");
    t.f1 = 0.7;
    t.steps.resize(5);
    v.require(!forge::rs_filter(t, 4).keep, "score 0.14 must drop");

    // SFT floor and DPO pairing.
    Trajectory kept;
    kept.id = "k";
    kept.em = 1;
    const double scores[] = {0.10, 0.2499, 0.25, 0.60};
    for (int k = 0; k < 4; ++k) {
        StepRecord s = st::step(ActionType::Search, "q" + std::to_string(k), k);
        if (k % 2 == 1) {
            s.a_final = {ActionType::Read, "doc_0"};
            s.was_modified = true;
        }
        s.signals = SignalBreakdown{};
        s.signals->a_step = scores[k];
        kept.steps.push_back(s);
    }
    const std::vector<Trajectory> trajs{kept};
    const auto sft = forge::build_sft(trajs);
    v.require(sft.size() == 2, "build_sft kept " + std::to_string(sft.size()) + " of 4 steps (want 2)");
    for (const auto& r : sft) v.require(r.step_index >= 2, "build_sft kept a step below 0.25");
    const auto dpo = forge::build_dpo(trajs);
    v.require(dpo.size() == 2, "build_dpo emitted " + std::to_string(dpo.size()) + " pairs for 2 modified steps");

    // Split indices frozen from tests/support/split_oracle.py.
    const auto big = forge::make_splits(1000, 200, 42);
    v.require(big.seed_indices.size() == 50 && big.val_indices.size() == 50, "(1000,200) must give 50/50");
    const std::vector<int> seed_head{211, 382, 582, 445, 971}, val_head{823, 934, 361, 530, 624};
    v.require(std::equal(seed_head.begin(), seed_head.end(), big.seed_indices.begin()) &&
                  std::equal(val_head.begin(), val_head.end(), big.val_indices.begin()),
              "(1000,200,42) indices differ from the frozen oracle");
    v.require(forge::make_splits(1000, 200, 42).seed_indices == big.seed_indices, "splits not deterministic");
    std::set<int> seen(big.seed_indices.begin(), big.seed_indices.end());
    seen.insert(big.val_indices.begin(), big.val_indices.end());
    v.require(seen.size() == 100 && *seen.begin() >= 200, "splits overlap or leak into the test prefix");
    const auto small = forge::make_splits(260, 200, 42);
    v.require(small.seed_indices.size() == 30 && small.val_indices.size() == 30, "tail 60 must give 30/30");
    const auto none = forge::make_splits(200, 200, 42);
    v.require(none.skipped && none.seed_indices.empty(), "tail 0 must skip");
    if (v.pass) v.detail = "RS keeps 0.15, SFT floor 0.25, 1 DPO pair per modified step, splits 50/50, 30/30, skip";
    return v;
}

// ---------------------------------------------------------------- criterion 10

int cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"skillrt"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return app::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Verdict criterion10() {
    Verdict v;
    const auto root = std::filesystem::temp_directory_path() / ("skillrt_acceptance_" + std::to_string(::getpid()));
    std::filesystem::remove_all(root);
    const std::string config = st::fixture("rollout.yaml").string();
    const int rc1 = cli({"rollout", "--config", config, "--out", (root / "a").string(), "--seed", "11"});
    const int rc2 = cli({"rollout", "--config", config, "--out", (root / "b").string(), "--seed", "11"});
    v.require(rc1 == 0 && rc2 == 0, "rollout exit codes " + std::to_string(rc1) + "/" + std::to_string(rc2));
    if (rc1 == 0 && rc2 == 0) {
        const std::string a = io::read_text(root / "a" / "trajectories.jsonl");
        const std::string b = io::read_text(root / "b" / "trajectories.jsonl");
        v.require(!a.empty() && a == b, "trajectory files differ between identical runs");

        // Replay the recorded actions through the same library, corpus and config.
        const auto recorded = io::read_trajectories(root / "a" / "trajectories.jsonl");
        const auto lib = io::load_library_dir(st::fixture("library"));
        const auto corpus = sim::load_corpus(st::fixture("walton_corpus.json"));
        sim::SimEnvironment env(corpus);
        sim::ReplayPolicy replay(recorded);
        RunConfig cfg = defaults_for(Mode::Web);
        cfg.teacher_selection = false;
        std::vector<EpisodeInput> inputs;
        for (const auto& t : recorded)
            inputs.push_back({t.id, t.dataset, t.question, t.gold_answers, t.episode_seed});
        const auto again = rollout(replay, env, lib, inputs, cfg, nullptr);
        v.require(again.size() == recorded.size(), "replay produced a different episode count");
        for (std::size_t k = 0; k < std::min(again.size(), recorded.size()); ++k)
            v.require(again[k].steps == recorded[k].steps, "replayed StepRecords differ for " + recorded[k].id);
    }
    std::filesystem::remove_all(root);
    if (v.pass) v.detail = "two CLI rollouts byte-identical; replay reconstructs every StepRecord";
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> expect_fail;
    for (int k = 1; k < argc; ++k) {
        if (std::strcmp(argv[k], "--expect-fail") == 0 && k + 1 < argc) expect_fail.insert(std::atoi(argv[++k]));
        else {
            std::fprintf(stderr, "usage: %s [--expect-fail N]...\n", argv[0]);
            return 2;
        }
    }
    const std::pair<const char*, std::function<Verdict()>> criteria[] = {
        {"composite review oracle", criterion1},  {"admission decision table", criterion2},
        {"signal algebra", criterion3},           {"dispatch invariants", criterion4},
        {"validation sandbox", criterion5},       {"case-study recovery", criterion6},
        {"heuristic detector suite", criterion7}, {"epoch end-to-end", criterion8},
        {"data pipeline", criterion9},            {"determinism and replay", criterion10},
    };
    std::set<int> failed;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Verdict verdict;
        try {
            verdict = check();
        } catch (const std::exception& e) {
            verdict.pass = false;
            verdict.detail = std::string("exception: ") + e.what();
        }
        if (!verdict.pass) failed.insert(index);
        std::printf("[%s] %2d %-26s %s%s\n", verdict.pass ? "PASS" : "FAIL", index, name, verdict.detail.c_str(),
                    !verdict.pass && expect_fail.count(index) ? " (known)" : "");
    }
    std::printf("%zu/10 criteria pass\n", 10 - failed.size());
    if (failed != expect_fail) {
        for (int k : expect_fail)
            if (!failed.count(k)) std::printf("criterion %d was expected to fail but passed\n", k);
        return 1;
    }
    return 0;
}
