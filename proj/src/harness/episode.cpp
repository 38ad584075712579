#include "skillrt/harness/episode.hpp"

#include "skillrt/errors.hpp"
#include "skillrt/failure_miner/text_metrics.hpp"

#include <charconv>
#include <set>

namespace skillrt {
namespace {

const std::set<std::string> kConflictMarkers = {"however",  "but",        "contrary",  "disputed", "conflicting",
                                                "contradicts", "contradictory", "although", "whereas", "unclear",
                                                "conflict", "disagree"};

std::optional<std::size_t> doc_index(const std::string& arg) {
    if (!arg.starts_with("doc_")) return std::nullopt;
    std::size_t k = 0;
    const char* begin = arg.data() + 4;
    const char* end = arg.data() + arg.size();
    auto [ptr, ec] = std::from_chars(begin, end, k);
    if (ec != std::errc() || ptr != end || begin == end) return std::nullopt;
    return k;
}

std::vector<ProgramPtr> phase_sources(const ArmedSkills& skills, const RunConfig& cfg) {
    if (cfg.pf_only_mode || !cfg.skills_enabled) return {};
    std::vector<ProgramPtr> out = skills.prompt_skills;
    for (const auto& p : skills.programs) {
        bool seen = false;
        for (const auto& q : out) seen = seen || q->base_id == p->base_id;
        if (!seen) out.push_back(p);
    }
    return out;
}

}  // namespace

bool detect_contradiction(const std::string& results_text) {
    int hits = 0;
    for (const auto& tok : text::tokenize(results_text)) hits += kConflictMarkers.count(tok) ? 1 : 0;
    return hits >= 3;
}

Trajectory run_episode(PolicyPort& policy, EnvironmentPort& env, const ArmedSkills& skills, const RunConfig& cfg,
                       const EpisodeInput& input, TeacherPort* teacher) {
    Trajectory traj;
    traj.id = input.id;
    traj.dataset = input.dataset;
    traj.question = input.question;
    traj.gold_answers = input.gold_answers;
    traj.episode_seed = input.seed;

    StepContext ctx;
    ctx.question = input.question;
    ctx.max_steps = cfg.budgets.max_steps;

    std::string opening = "Question: " + input.question;
    for (const auto& s : skills.prompt_skills)
        if (!s->system_summary.empty()) opening += "\n[SKILL:" + s->base_id + "] " + s->system_summary;
    std::vector<std::string> observations{opening};
    std::vector<std::pair<std::string, std::string>> pending;
    std::vector<std::string> last_doc_ids;

    const std::vector<HandlerSpec> handlers =
        cfg.enable_skill_handlers ? handlers_from(skills.programs) : std::vector<HandlerSpec>{};
    const std::vector<ProgramPtr> phased = phase_sources(skills, cfg);

    try {
        policy.begin_episode(input.question, input.seed);
        for (int step = 0; step < cfg.budgets.max_steps; ++step) {
            ctx.step_count = step;
            const PolicyView view{input.question, observations, pending, step};
            const ActionProposal proposal = policy.propose(view);
            ctx.thought = policy.last_thought();

            StepRecord rec;
            rec.step_index = step;
            rec.ctx_snapshot = ctx;
            rec.a_orig = proposal;

            DispatchResult d = dispatch(ctx, proposal, skills.programs, cfg, teacher);
            if (d.final_action.type == ActionType::Final && !handlers.empty() && !d.modified()) {
                const VoteResult vote = handler_vote(ctx, d.final_action.arg, handlers, cfg.handler_vote_threshold);
                if (vote.override_action) {
                    d.final_action = *vote.override_action;
                    d.fired.push_back({"handler_vote", InterventionKind::ModifyAction,
                                       "FINAL overridden by " + std::to_string(vote.objections.size()) +
                                           " handler objections",
                                       true});
                }
            }
            rec.a_final = d.final_action;
            rec.was_modified = rec.a_final != rec.a_orig;
            rec.fired = std::move(d.fired);
            rec.injected_contexts = d.contexts;

            std::string env_obs;
            bool terminal = false;
            std::optional<Phase> after;
            const ActionProposal& act = rec.a_final;
            switch (act.type) {
            case ActionType::Search:
                if (ctx.search_count >= cfg.budgets.max_search_calls) {
                    rec.executed = false;
                    env_obs = "[BUDGET] search limit reached; action not executed.";
                } else {
                    const SearchOutcome outcome = env.search(act.arg);
                    ++ctx.search_count;
                    ctx.empty_results = outcome.empty;
                    ctx.last_search_results_text = outcome.text;
                    ctx.contradictory_sources = detect_contradiction(outcome.text);
                    ctx.action_history.emplace_back(act.type, act.arg);
                    last_doc_ids = outcome.doc_ids;
                    env_obs = outcome.empty ? "No results found." : outcome.text;
                    after = Phase::PostSearch;
                }
                break;
            case ActionType::Read:
                if (ctx.read_count >= cfg.budgets.max_read_calls) {
                    rec.executed = false;
                    env_obs = "[BUDGET] read limit reached; action not executed.";
                } else {
                    std::string target = act.arg;
                    if (auto k = doc_index(act.arg); k && *k < last_doc_ids.size()) target = last_doc_ids[*k];
                    const std::optional<std::string> content = env.read(target);
                    ++ctx.read_count;
                    ctx.has_read = true;
                    ctx.all_read_contents.push_back(content.value_or(""));
                    ctx.action_history.emplace_back(act.type, act.arg);
                    env_obs = content ? *content : "Document not found: " + act.arg;
                    after = Phase::PostRead;
                }
                break;
            case ActionType::Final:
                traj.final_answer = act.arg;
                ctx.action_history.emplace_back(act.type, act.arg);
                terminal = true;
                break;
            }

            std::string observation = env_obs;
            for (const auto& [id, text] : rec.injected_contexts) observation += "\n[SKILL:" + id + "] " + text;
            if (!terminal) {
                int room = cfg.max_phase_instructions;
                std::vector<std::pair<Phase, PhaseLine>> lines;
                StepContext next = ctx;
                next.step_count = step + 1;
                auto take = [&](Phase phase) {
                    for (auto& line : render_phase_instructions(phase, next, phased, room)) {
                        lines.emplace_back(phase, std::move(line));
                        --room;
                    }
                };
                if (after) take(*after);
                if (next.step_count >= cfg.pre_final_step_threshold && room > 0) take(Phase::PreFinal);
                for (const auto& [phase, line] : lines) {
                    rec.phase_instructions.push_back("[PHASE:" + std::string(to_string(phase)) + "] " + line.text);
                    observation += "\n" + rec.phase_instructions.back();
                }
            }
            rec.observation = observation;
            rec.delta_feedback = env_obs;
            observations.push_back(observation);
            pending = rec.injected_contexts;
            traj.steps.push_back(std::move(rec));
            if (terminal) break;
        }
    } catch (const PolicyProtocolError& e) {
        traj.failed = true;
        traj.error = std::string("policy: ") + e.what();
    } catch (const Timeout& e) {
        traj.failed = true;
        traj.error = std::string("timeout: ") + e.what();
    } catch (const EnvironmentError& e) {
        traj.failed = true;
        traj.error = std::string("environment: ") + e.what();
    }

    if (traj.final_answer) {
        const auto m = text::em_f1(*traj.final_answer, traj.gold_answers);
        traj.em = m.em;
        traj.f1 = m.f1;
    }
    for (auto& s : traj.steps) s.delta_feedback += "\n[terminal_em=" + std::to_string(traj.em) + "]";
    if (traj.failed && !traj.steps.empty()) traj.steps.back().delta_feedback += "\n[error] " + traj.error;
    return traj;
}

}  // namespace skillrt
