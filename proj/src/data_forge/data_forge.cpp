#include "skillrt/data_forge/data_forge.hpp"

#include "skillrt/errors.hpp"
#include "skillrt/io/json_io.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>

namespace skillrt::forge {
namespace {

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

const SignalBreakdown& require_signals(const Trajectory& traj, const StepRecord& step) {
    if (!step.signals)
        throw Error("trajectory " + traj.id + " step " + std::to_string(step.step_index) + " is not scored");
    return *step.signals;
}

Json step_state(const StepRecord& step) {
    Json injected = Json::array();
    for (const auto& [id, text] : step.injected_contexts) injected.push_back({{"skill_id", id}, {"text", text}});
    return {{"context", step.ctx_snapshot}, {"proposed", describe(step.a_orig)}, {"injected_contexts", injected}};
}

TrainRecord step_record(RecordKind kind, const Trajectory& traj, const StepRecord& step, double weight) {
    TrainRecord r;
    r.kind = kind;
    r.trajectory_id = traj.id;
    r.step_index = step.step_index;
    r.input_state = step_state(step);
    r.target = describe(step.a_final);
    r.sample_weight = weight;
    r.signals = step.signals;
    return r;
}

std::string authored_text(const CandidateSkill& c) {
    if (c.rule_source.empty()) return c.doc_text;
    return c.doc_text + "\n```rule\n" + c.rule_source + "\n```\n";
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", v);
    return buf;
}

}  // namespace

SplitSpec make_splits(int total, int boundary, std::uint64_t seed, std::string dataset) {
    if (boundary < 0 || boundary > total)
        throw ConfigError("test boundary " + std::to_string(boundary) + " outside [0, " + std::to_string(total) + "]");
    SplitSpec spec;
    spec.dataset_name = std::move(dataset);
    spec.total = total;
    spec.test_boundary = boundary;
    spec.shuffle_seed = seed;
    const int tail = total - boundary;
    if (tail == 0) {
        spec.skipped = true;
        return spec;
    }
    const int per_split = tail < 2 * kDefaultSplitCount ? tail / 2 : kDefaultSplitCount;
    spec.seed_count = spec.val_count = per_split;

    std::vector<int> pool(static_cast<std::size_t>(tail));
    std::iota(pool.begin(), pool.end(), boundary);
    // Explicit Fisher-Yates: std::shuffle's draw sequence differs between standard libraries.
    std::mt19937_64 rng(seed);
    for (std::size_t i = pool.size() - 1; i > 0; --i) std::swap(pool[i], pool[rng() % (i + 1)]);
    spec.seed_indices.assign(pool.begin(), pool.begin() + per_split);
    spec.val_indices.assign(pool.begin() + per_split, pool.begin() + 2 * per_split);
    return spec;
}

double step_economy(int trajectory_length, int max_steps) {
    if (max_steps <= 0) return 0.0;
    return clip01(1.0 - static_cast<double>(trajectory_length - 1) / max_steps);
}

RsVerdict rs_filter(const Trajectory& traj, int max_steps, double min_score) {
    RsVerdict v;
    v.score = 0.7 * traj.em + 0.2 * traj.f1 + 0.1 * step_economy(traj.length(), max_steps);
    v.keep = v.score + 1e-9 >= min_score;  // the boundary itself keeps
    return v;
}

std::string_view to_string(RecordKind kind) {
    switch (kind) {
    case RecordKind::SftCorrection: return "sft_correction";
    case RecordKind::DpoPair: return "dpo_pair";
    case RecordKind::PromptOnly: return "prompt_only";
    case RecordKind::SftSkillAuthor: return "sft_skill_author";
    case RecordKind::DpoSkillAuthor: return "dpo_skill_author";
    }
    return "sft_correction";
}

Json to_json(const TrainRecord& r) {
    Json j = {{"kind", to_string(r.kind)},
              {"source_id", r.trajectory_id},
              {"step_index", r.step_index},
              {"input_state", r.input_state},
              {"target", r.target},
              {"sample_weight", r.sample_weight}};
    if (r.chosen) j["chosen"] = *r.chosen;
    if (r.rejected) j["rejected"] = *r.rejected;
    if (r.signals) j["signals"] = *r.signals;
    return j;
}

std::vector<TrainRecord> build_sft(std::span<const Trajectory> kept, double floor) {
    std::vector<TrainRecord> out;
    for (const auto& traj : kept)
        for (const auto& step : traj.steps) {
            const double a = require_signals(traj, step).a_step;
            if (a >= floor) out.push_back(step_record(RecordKind::SftCorrection, traj, step, clip01(a)));
        }
    return out;
}

std::vector<TrainRecord> build_dpo(std::span<const Trajectory> trajs) {
    std::vector<TrainRecord> out;
    for (const auto& traj : trajs)
        for (const auto& step : traj.steps) {
            if (!step.was_modified) continue;
            auto r = step_record(RecordKind::DpoPair, traj, step, clip01(require_signals(traj, step).a_step));
            r.chosen = describe(step.a_final);
            r.rejected = describe(step.a_orig);
            out.push_back(std::move(r));
        }
    return out;
}

std::vector<TrainRecord> build_prompt_only(std::span<const Trajectory> kept) {
    std::vector<TrainRecord> out;
    for (const auto& traj : kept)
        for (const auto& step : traj.steps) out.push_back(step_record(RecordKind::PromptOnly, traj, step, 1.0));
    return out;
}

std::vector<TrainRecord> build_skill_author_data(std::span<const AuthoredCandidate> candidates) {
    std::vector<TrainRecord> out;
    auto base_record = [](RecordKind kind, const AuthoredCandidate& a) {
        TrainRecord r;
        r.kind = kind;
        r.trajectory_id = a.candidate.base_id;
        r.input_state = {{"origin_category", a.candidate.origin_category},
                         {"origin_cluster", a.candidate.origin_cluster},
                         {"is_new_group", a.candidate.is_new_group}};
        r.sample_weight = clip01(a.r_skill);
        return r;
    };
    for (const auto& a : candidates) {
        if (a.decision != Decision::Accept) continue;
        auto r = base_record(RecordKind::SftSkillAuthor, a);
        r.target = authored_text(a.candidate);
        out.push_back(std::move(r));
    }
    for (const auto& good : candidates) {
        if (good.decision != Decision::Accept) continue;
        for (const auto& bad : candidates) {
            if (bad.decision != Decision::Reject || bad.candidate.origin_cluster != good.candidate.origin_cluster)
                continue;
            auto r = base_record(RecordKind::DpoSkillAuthor, good);
            r.target = authored_text(good.candidate);
            r.chosen = authored_text(good.candidate);
            r.rejected = authored_text(bad.candidate);
            out.push_back(std::move(r));
        }
    }
    return out;
}

TriggerReport trigger_stats(std::span<const Trajectory> trajs) {
    TriggerReport report;
    for (const auto& traj : trajs)
        for (const auto& step : traj.steps)
            for (const auto& f : step.fired) {
                if (!f.effective || f.kind == InterventionKind::Noop) continue;
                auto& counts = report.per_skill[f.skill_id];
                if (f.kind == InterventionKind::ModifyAction) {
                    ++counts.modify;
                    ++report.action_level;
                } else {
                    ++counts.inject;
                    ++report.context_level;
                }
                ++report.per_dataset[traj.dataset];
            }
    const int total = report.action_level + report.context_level;
    if (total > 0) {
        report.action_pct = 100.0 * report.action_level / total;
        report.context_pct = 100.0 * report.context_level / total;
    }
    return report;
}

Json to_json(const TriggerReport& report) {
    Json skills = Json::object();
    for (const auto& [id, c] : report.per_skill)
        skills[id] = {{"modify_action", c.modify}, {"inject_context", c.inject}, {"total", c.total()}};
    return {{"per_skill", skills},
            {"per_dataset", report.per_dataset},
            {"action_level", report.action_level},
            {"context_level", report.context_level},
            {"action_pct", report.action_pct ? Json(*report.action_pct) : Json("n/a")},
            {"context_pct", report.context_pct ? Json(*report.context_pct) : Json("n/a")}};
}

std::string render(const TriggerReport& report) {
    std::vector<std::pair<std::string, SkillFireCounts>> rows(report.per_skill.begin(), report.per_skill.end());
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.second.total() > b.second.total(); });
    std::string out;
    for (const auto& [id, c] : rows)
        out += id + " (" + std::to_string(c.total()) + " total triggers): " + std::to_string(c.modify) +
               " modify_action, " + std::to_string(c.inject) + " inject_context\n";
    for (const auto& [dataset, n] : report.per_dataset)
        out += "dataset " + (dataset.empty() ? std::string("(unnamed)") : dataset) + ": " + std::to_string(n) + "\n";
    out += "action-level: " + (report.action_pct ? percent(*report.action_pct) : std::string("n/a")) +
           ", context-level: " + (report.context_pct ? percent(*report.context_pct) : std::string("n/a")) + "\n";
    return out;
}

TrainingSet build_training_set(std::span<const Trajectory> scored, std::span<const AuthoredCandidate> authored,
                               const ForgeConfig& cfg) {
    TrainingSet set;
    std::vector<Trajectory> kept;
    for (const auto& t : scored) {
        ++set.trajectories_in;
        if (t.steps.empty() || !rs_filter(t, cfg.max_steps, cfg.min_score).keep) continue;
        kept.push_back(t);
    }
    set.trajectories_kept = static_cast<int>(kept.size());
    set.sft = build_sft(kept, cfg.sft_floor);
    set.dpo = build_dpo(scored);
    set.prompt_only = build_prompt_only(kept);
    for (auto& r : build_skill_author_data(authored))
        (r.kind == RecordKind::SftSkillAuthor ? set.skill_author_sft : set.skill_author_dpo).push_back(std::move(r));
    return set;
}

void write_training_set(const std::filesystem::path& dir, const TrainingSet& set) {
    auto rows = [](const std::vector<TrainRecord>& records) {
        std::vector<Json> out;
        for (const auto& r : records) out.push_back(to_json(r));
        return out;
    };
    io::write_jsonl(dir / "sft.jsonl", rows(set.sft));
    io::write_jsonl(dir / "dpo.jsonl", rows(set.dpo));
    io::write_jsonl(dir / "prompt_only.jsonl", rows(set.prompt_only));
    io::write_jsonl(dir / "skill_author_sft.jsonl", rows(set.skill_author_sft));
    io::write_jsonl(dir / "skill_author_dpo.jsonl", rows(set.skill_author_dpo));
}

}  // namespace skillrt::forge
