#include "skillrt/signal_scorer/scorer.hpp"

#include "skillrt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skillrt {
namespace {

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

std::optional<double> parse_unit_score(const std::string& reply) {
    try {
        std::size_t used = 0;
        std::string trimmed = reply;
        trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
        const double v = std::stod(trimmed, &used);
        if (used == 0 || !std::isfinite(v) || v < 0.0 || v > 1.0) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

const std::vector<std::string>& fine_signal_ids() {
    static const std::vector<std::string> ids = {
        "s1.tp",          "s1.fp",           "s1.fn",           "s1.phase",        "s2.pre_action",
        "s2.post_obs",    "s2.pre_reasoning", "s2.post_action", "s3.syntactic",    "s3.semantic",
        "s3.domain",      "s4.local",        "s4.downstream",   "s4.cost",         "s4.side_effect"};
    return ids;
}

int family_of(const std::string& signal_id) {
    if (signal_id.size() < 2 || signal_id[0] != 's' || signal_id[1] < '1' || signal_id[1] > '4')
        throw Error("not a sub-signal id: " + signal_id);
    return signal_id[1] - '1';
}

SignalWeights::SignalWeights()
    : fine{{"s1.tp", 0.25},         {"s1.fp", -0.10},          {"s1.fn", -0.10},         {"s1.phase", 0.05},
           {"s2.pre_action", 0.35}, {"s2.post_obs", 0.35},     {"s2.pre_reasoning", 0.15}, {"s2.post_action", 0.15},
           {"s3.syntactic", 0.20},  {"s3.semantic", 0.50},     {"s3.domain", 0.30},      {"s4.local", 0.40},
           {"s4.downstream", 0.40}, {"s4.cost", -0.10},        {"s4.side_effect", -0.10}} {}

double SignalWeights::weight(const std::string& id) const {
    auto it = fine.find(id);
    return it == fine.end() ? 0.0 : it->second;
}

bool classify_risky(const StepContext& ctx, const ActionProposal& proposal) {
    if (proposal.type == ActionType::Final) return ctx.read_count == 0 || ctx.step_count < 3;
    if (proposal.type == ActionType::Search) return ctx.empty_results;
    return false;
}

double local_outcome_value(const ActionProposal& orig, const ActionProposal& final_action, bool was_modified) {
    if (!was_modified) return 0.0;
    if (orig.type == ActionType::Final && final_action.type == ActionType::Read) return 0.8;
    if (orig.type == ActionType::Final && final_action.type == ActionType::Search) return 0.7;
    if (orig.type == ActionType::Search && final_action.type == ActionType::Search) return 0.5;
    return 0.3;
}

double cost_value(int trajectory_length) { return clip01((trajectory_length - 15) / 10.0); }

SignalBreakdown score_step(const StepRecord& step, int episode_em, int trajectory_length, const SignalWeights& weights,
                           TeacherPort* teacher, std::span<const DomainCheck> domain_checks) {
    std::map<std::string, double> value;
    for (const auto& id : fine_signal_ids()) value[id] = 0.0;

    const bool fired = step.any_fired();
    const bool risky = classify_risky(step.ctx_snapshot, step.a_orig);
    const bool rescue = step.was_modified && step.a_orig.type == ActionType::Final &&
                        step.a_final.type == ActionType::Read;

    // timing
    if (risky && fired) value["s1.tp"] = 1.0;
    if (!risky && fired) value["s1.fp"] = 1.0;
    if (risky && !fired) value["s1.fn"] = 1.0;
    if (fired && step.ctx_snapshot.max_steps > 0)
        value["s1.phase"] = 1.0 - static_cast<double>(step.step_index) / step.ctx_snapshot.max_steps;

    // modality
    if (step.effective_modify()) value["s2.pre_action"] = 1.0;
    if (step.any_inject()) value["s2.post_obs"] = 1.0;

    // correctness
    if (fired) {
        value["s3.syntactic"] = step.a_final.arg.empty() ? 0.0 : 1.0;
        std::optional<double> semantic;
        if (teacher) {
            TeacherRequest req{"step_score",
                               {{"question", step.ctx_snapshot.question},
                                {"original", describe(step.a_orig)},
                                {"final", describe(step.a_final)},
                                {"step_index", step.step_index}},
                               0.0, 8};
            if (auto reply = teacher->request(req)) semantic = parse_unit_score(*reply);
        }
        value["s3.semantic"] = semantic.value_or(rescue                ? kSemanticRescue
                                                 : step.was_modified ? kSemanticOtherModification
                                                                     : kSemanticUnmodified);
    }
    if (!domain_checks.empty()) {
        double total = 0.0;
        for (const auto& check : domain_checks) total += check(step);
        value["s3.domain"] = total / static_cast<double>(domain_checks.size());
    }

    // outcome
    value["s4.local"] = local_outcome_value(step.a_orig, step.a_final, step.was_modified);
    value["s4.downstream"] = static_cast<double>(episode_em);
    value["s4.cost"] = cost_value(trajectory_length);
    value["s4.side_effect"] = (step.was_modified && episode_em == 0) ? 1.0 : 0.0;

    SignalBreakdown out;
    std::array<double, 4> family_sum{}, family_abs{};
    for (const auto& id : fine_signal_ids()) {
        const double w = weights.weight(id);
        const double contribution = w * value[id];
        out.fine_values[id] = contribution;
        family_sum[family_of(id)] += contribution;
        family_abs[family_of(id)] += std::abs(w);
    }
    for (int f = 0; f < 4; ++f) out.z[f] = family_abs[f] > 0.0 ? family_sum[f] / family_abs[f] : 0.0;

    if (weights.fine_mode) {
        out.a_step = fine_sum(out);
        if (weights.normalize_fine) {
            const double total_abs = std::accumulate(family_abs.begin(), family_abs.end(), 0.0);
            if (total_abs > 0.0) out.a_step /= total_abs;
        }
    } else {
        out.a_step = coarse_step_score(out.z, weights.coarse);
    }
    return out;
}

double coarse_step_score(const std::array<double, 4>& z, const std::array<double, 4>& lambda) {
    double s = 0.0;
    for (int f = 0; f < 4; ++f) s += lambda[f] * z[f];
    return s;
}

double fine_sum(const SignalBreakdown& b) {
    double s = 0.0;
    for (const auto& id : fine_signal_ids()) {
        auto it = b.fine_values.find(id);
        if (it != b.fine_values.end()) s += it->second;
    }
    return s;
}

double episode_reward(std::span<const SignalBreakdown> steps, int em, double blend) {
    if (steps.empty()) throw EmptyTrajectory();
    double total = 0.0;
    for (const auto& s : steps) total += s.a_step;
    return blend * (total / static_cast<double>(steps.size())) + (1.0 - blend) * em;
}

void score_trajectory(Trajectory& traj, const SignalWeights& weights, TeacherPort* teacher,
                      std::span<const DomainCheck> domain_checks) {
    const int length = traj.length();
    for (auto& step : traj.steps) step.signals = score_step(step, traj.em, length, weights, teacher, domain_checks);
}

double trajectory_pf_score(const Trajectory& traj) {
    if (traj.steps.empty()) throw EmptyTrajectory();
    double total = 0.0;
    for (const auto& step : traj.steps) {
        if (!step.signals) throw Error("trajectory step " + std::to_string(step.step_index) + " is not scored");
        total += step.signals->a_step;
    }
    return total / static_cast<double>(traj.steps.size());
}

double trajectory_score(const Trajectory& traj, const SignalWeights& weights) {
    return weights.beta_em * traj.em + weights.beta_pf * trajectory_pf_score(traj);
}

}  // namespace skillrt
