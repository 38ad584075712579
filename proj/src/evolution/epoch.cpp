#include "skillrt/evolution/evolution.hpp"

#include "skillrt/errors.hpp"
#include "skillrt/io/json_io.hpp"
#include "skillrt/rule_engine/parser.hpp"
#include "skillrt/selection/selection.hpp"

#include <cstdio>
#include <set>

namespace skillrt {
namespace {

double mean_em(const std::vector<Trajectory>& trajs) {
    if (trajs.empty()) return 0.0;
    double total = 0.0;
    for (const auto& t : trajs) total += t.em;
    return total / static_cast<double>(trajs.size());
}

std::string rule_of(const CandidateSkill& c) {
    if (!c.rule_source.empty()) return c.rule_source;
    return rules::extract_rule_block(c.doc_text).value_or("");
}

bool compile_passing(const rules::ExecReport& exec) { return exec.syntax_ok && exec.interface_ok; }

void decide(CandidateOutcome& out, TeacherPort* reviewer, const EpochConfig& cfg, std::vector<std::string>& diags) {
    if (cfg.lite) {
        out.q_skill = out.exec.q_exec;
        out.decision = out.exec.passed() == 4 ? Decision::Accept : Decision::Reject;
    } else if (!reviewer) {
        out.q_skill = out.exec.q_exec;
        out.decision = out.exec.passed() == 4 ? Decision::Revise : Decision::Reject;
        out.note = "review unavailable";
    } else {
        std::string diag;
        const auto reply = reviewer->request(review_request(out.candidate, out.exec));
        if (reply) out.review = parse_review(*reply, diag);
        else diag = "no review reply";
        if (out.review) {
            out.q_skill = composite_q(*out.review);
            out.decision = decide_admission(out.exec, *out.review, out.candidate.is_new_group, cfg.gate);
        } else {
            diags.push_back(out.candidate.base_id + ": " + diag);
            out.note = diag;
            out.q_skill = out.exec.q_exec;
            out.decision = out.exec.passed() == 4 ? Decision::Revise : Decision::Reject;
        }
    }
    if (cfg.gate_mode == GateMode::Audit && compile_passing(out.exec) && out.decision != Decision::Accept) {
        out.note = "audit admission (gate said " + std::string(to_string(out.decision)) + ")";
        out.decision = Decision::Accept;
    }
}

std::string slug(int index, const std::string& id) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d_", index);
    return buf + id;
}

void write_artifacts(const std::filesystem::path& dir, const EpochArtifacts& art) {
    io::write_trajectories(dir / "trajectories.jsonl", art.trajectories);
    std::vector<Json> failures(art.failures.begin(), art.failures.end());
    io::write_jsonl(dir / "failures.jsonl", failures);
    io::write_json(dir / "clusters.json", Json(art.clusters));

    Json validation = Json::array(), reviews = Json::array();
    for (std::size_t i = 0; i < art.candidates.size(); ++i) {
        const auto& c = art.candidates[i];
        const auto cdir = dir / "candidates" / slug(static_cast<int>(i), c.candidate.base_id);
        io::write_text(cdir / "SKILL.md", c.candidate.doc_text);
        io::write_json(cdir / "candidate.json", Json(c.candidate));
        validation.push_back({{"base_id", c.candidate.base_id}, {"exec", c.exec}});
        reviews.push_back({{"base_id", c.candidate.base_id},
                           {"review", c.review ? Json(*c.review) : Json(nullptr)},
                           {"q_skill", c.q_skill},
                           {"decision", to_string(c.decision)},
                           {"note", c.note},
                           {"r_skill", c.r_skill}});
    }
    io::write_json(dir / "validation.json", validation);
    io::write_json(dir / "reviews.json", reviews);
    io::write_json(dir / "admissions.json", Json(art.admissions));
    io::write_json(dir / "summary.json",
                   {{"trajectories", art.trajectories.size()},
                    {"failure_patterns", art.failures.size()},
                    {"clusters", art.clusters.size()},
                    {"candidates", art.candidates.size()},
                    {"val_em_before", art.val_em_before ? Json(*art.val_em_before) : Json(nullptr)},
                    {"val_em_after", art.val_em_after ? Json(*art.val_em_after) : Json(nullptr)},
                    {"delta_em", art.delta_em},
                    {"train_kept", art.training.trajectories_kept},
                    {"diagnostics", art.diagnostics}});
    forge::write_training_set(dir / "train", art.training);
}

}  // namespace

std::vector<Trajectory> rollout(PolicyPort& policy, EnvironmentPort& env, const LibraryState& lib,
                                std::span<const EpisodeInput> inputs, const RunConfig& cfg, TeacherPort* teacher) {
    std::vector<Trajectory> out;
    out.reserve(inputs.size());
    for (const auto& input : inputs) {
        const auto armed = resolve(lib, select_skills(lib, input.question, teacher, cfg));
        out.push_back(run_episode(policy, env, armed, cfg, input, teacher));
    }
    return out;
}

EpochResult run_epoch(PolicyPort& student, EnvironmentPort& env, TeacherPort* teacher, ProposerPort* proposer,
                      const LibraryState& lib, std::span<const EpisodeInput> seed_split,
                      std::span<const EpisodeInput> val_split, const EpochConfig& cfg) {
    EpochArtifacts art;
    TeacherPort* const t = cfg.lite ? nullptr : teacher;
    TemplateProposer builtin;
    ProposerPort* const prop = cfg.lite ? &builtin : proposer;

    // A: rollouts over the seed split
    art.trajectories = rollout(student, env, lib, seed_split, cfg.run, t);
    if (!art.trajectories.empty()) {
        bool any_ok = false;
        for (const auto& tr : art.trajectories) any_ok = any_ok || !tr.failed;
        if (!any_ok) throw Error("every seed rollout failed: " + art.trajectories.front().error);
    }

    // B: failure mining
    std::vector<Trajectory> failed;
    for (const auto& tr : art.trajectories)
        if (tr.em == 0) failed.push_back(tr);
    for (const auto& tr : failed) {
        auto found = detect_heuristic(tr, cfg.detectors);
        art.failures.insert(art.failures.end(), found.begin(), found.end());
    }
    if (t) {
        auto summary = summarize_failures(failed, t);
        art.failures.insert(art.failures.end(), summary.patterns.begin(), summary.patterns.end());
        art.diagnostics.insert(art.diagnostics.end(), summary.diagnostics.begin(), summary.diagnostics.end());
    }
    art.clusters = cluster(art.failures, lib, cfg.clustering);

    // C: proposals
    auto batch = propose_candidates(art.clusters, lib, prop, cfg.gate.max_candidates_per_epoch);
    art.diagnostics.insert(art.diagnostics.end(), batch.diagnostics.begin(), batch.diagnostics.end());

    // D + E: validation and review
    std::set<std::pair<std::string, std::string>> seen_rules;
    for (auto& cand : batch.candidates) {
        CandidateOutcome out;
        out.candidate = std::move(cand);
        out.exec = rules::validate_candidate(out.candidate);
        decide(out, t, cfg, art.diagnostics);
        if (out.decision == Decision::Accept) {
            const std::string rule = rule_of(out.candidate);
            const auto active = lib.find(out.candidate.base_id);
            const bool same_as_active = active && rules::extract_rule_block(active->doc_text).value_or("") == rule;
            if (same_as_active || !seen_rules.emplace(out.candidate.base_id, rule).second) {
                out.decision = Decision::Reject;
                out.note = "duplicate of an existing rule";
            }
        }
        art.candidates.push_back(std::move(out));
    }

    // F: admission
    LibraryState next = lib;
    const std::size_t history_before = next.history().size();
    for (auto& out : art.candidates) {
        try {
            next = admit(next, out.candidate, out.decision, out.review, out.exec);
        } catch (const Error& e) {
            out.note = e.what();
            out.decision = Decision::Reject;
            next = admit(next, out.candidate, Decision::Reject, out.review, out.exec);
        }
    }
    art.admissions.assign(next.history().begin() + static_cast<std::ptrdiff_t>(history_before), next.history().end());

    bool any_accept = false;
    for (const auto& out : art.candidates) any_accept = any_accept || out.decision == Decision::Accept;
    if (any_accept && !val_split.empty()) {
        art.val_em_before = mean_em(rollout(student, env, lib, val_split, cfg.run, t));
        art.val_em_after = mean_em(rollout(student, env, next, val_split, cfg.run, t));
        art.delta_em = *art.val_em_after - *art.val_em_before;
    }
    for (auto& out : art.candidates)
        out.r_skill = out.decision == Decision::Accept ? skill_reward(out.q_skill, art.delta_em, cfg.reward_lambda)
                                                       : out.q_skill;

    // G: step scoring
    for (auto& tr : art.trajectories)
        if (!tr.steps.empty()) score_trajectory(tr, cfg.weights, t);

    // H: training data
    std::vector<forge::AuthoredCandidate> authored;
    for (const auto& out : art.candidates) authored.push_back({out.candidate, out.decision, out.r_skill});
    forge::ForgeConfig fcfg = cfg.forge;
    fcfg.max_steps = cfg.run.budgets.max_steps;
    art.training = forge::build_training_set(art.trajectories, authored, fcfg);

    if (cfg.out_dir) write_artifacts(*cfg.out_dir / ("epoch_" + std::to_string(cfg.epoch_index)), art);
    return {std::move(next), std::move(art)};
}

}  // namespace skillrt
