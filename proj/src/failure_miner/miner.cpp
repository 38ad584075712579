#include "skillrt/failure_miner/miner.hpp"

#include "skillrt/failure_miner/text_metrics.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <tuple>

namespace skillrt {
namespace {

struct CategoryText {
    const char* abstraction;
    const char* trigger;
    const char* hint;
};

const std::map<std::string, CategoryText>& category_text() {
    static const std::map<std::string, CategoryText> table = {
        {"premature_final",
         {"Agent commits to a final answer after fewer than three steps without enough evidence.",
          "FINAL proposed while step_count < 3", "Redirect an early FINAL to a READ or a further SEARCH."}},
        {"repeated_search",
         {"Agent issues near-duplicate search queries and gains no new evidence.",
          "SEARCH whose tokens largely repeat the previous query", "Rewrite the repeated query or force a READ."}},
        {"no_read_before_final",
         {"Agent answers without reading any retrieved document.", "FINAL proposed while read_count = 0",
          "Replace the FINAL with READ of the top result."}},
        {"query_too_broad",
         {"Agent searches with a query too short to retrieve specific evidence.", "SEARCH with fewer than 3 tokens",
          "Expand the query with entities from the question."}},
        {"query_too_narrow",
         {"Agent searches with an overlong query that retrieval cannot match.", "SEARCH with more than 15 tokens",
          "Shorten the query to its key entities."}},
        {"wrong_entity_focus",
         {"Agent answers about a different entity than the one the question asks for.",
          "final answer shares under 30% of tokens with the gold", "Remind the agent which entity the question targets."}},
        {"reasoning_hallucination",
         {"Agent states an answer not grounded in any document it read.",
          "under 30% of answer content tokens appear in read documents",
          "Require the answer to be supported by read text before FINAL."}},
        {"format_mismatch",
         {"Agent answer does not match the expected short answer format.", "empty FINAL or one longer than 20 tokens",
          "Extract a concise answer span before FINAL."}},
        {"partial_answer",
         {"Agent answers only one part of a multi-part question.", "multi-part question answered with a single clause",
          "Check every part of the question is addressed before FINAL."}},
        {"contradictory_evidence_ignored",
         {"Agent ignores contradictory sources and answers without resolving the conflict.",
          "contradictory sources seen with no later SEARCH", "Search again to resolve conflicting evidence."}},
        {"excessive_steps_no_progress",
         {"Agent exhausts the step budget repeating searches without progress.",
          "step budget reached while queries repeat", "Break the loop by reading or answering from evidence."}},
        {"pf_override_harmful",
         {"A skill rewrote an action in an episode that still failed.", "was_modified step in a failed episode",
          "Tighten the activation predicate of the rewriting skill."}},
    };
    return table;
}

std::vector<std::string> executed_queries(const Trajectory& traj) {
    std::vector<std::string> out;
    for (const auto& s : traj.steps)
        if (s.executed && s.a_final.type == ActionType::Search) out.push_back(s.a_final.arg);
    return out;
}

bool has_repeated_search(const std::vector<std::string>& queries, double threshold) {
    for (std::size_t i = 0; i < queries.size(); ++i)
        for (std::size_t j = i + 1; j < queries.size(); ++j)
            if (text::token_jaccard(queries[i], queries[j]) > threshold) return true;
    return false;
}

std::string truncate(const std::string& s, std::size_t n) { return s.size() <= n ? s : s.substr(0, n); }

}  // namespace

std::string_view to_string(DetectorKind kind) { return kind == DetectorKind::Llm ? "llm" : "heuristic"; }

const std::vector<std::string>& heuristic_categories() {
    static const std::vector<std::string> cats = {
        "premature_final",         "repeated_search",  "no_read_before_final",     "query_too_broad",
        "query_too_narrow",        "wrong_entity_focus", "reasoning_hallucination", "format_mismatch",
        "partial_answer",          "contradictory_evidence_ignored", "excessive_steps_no_progress",
        "pf_override_harmful"};
    return cats;
}

double entity_overlap(const std::string& prediction, std::span<const std::string> golds) {
    const auto pred = text::token_set(text::normalize_answer(prediction));
    double best = 0.0;
    for (const auto& g : golds) {
        const auto gold = text::token_set(text::normalize_answer(g));
        if (gold.empty()) continue;
        std::size_t hits = 0;
        for (const auto& t : gold) hits += pred.count(t);
        best = std::max(best, static_cast<double>(hits) / static_cast<double>(gold.size()));
    }
    return best;
}

std::vector<FailurePattern> detect_heuristic(const Trajectory& traj, const DetectorConfig& cfg) {
    std::vector<FailurePattern> out;
    if (traj.em != 0) return out;

    const bool ends_final = !traj.steps.empty() && traj.steps.back().a_final.type == ActionType::Final;
    const std::string answer = traj.final_answer.value_or("");
    const auto queries = executed_queries(traj);
    const bool repeated = has_repeated_search(queries, cfg.repeated_search_jaccard);
    const int max_steps = traj.steps.empty() ? 0 : traj.steps.front().ctx_snapshot.max_steps;
    bool any_read = false;
    for (const auto& s : traj.steps) any_read = any_read || (s.executed && s.a_final.type == ActionType::Read);
    std::vector<std::string> read_contents;
    if (!traj.steps.empty()) {
        read_contents = traj.steps.back().ctx_snapshot.all_read_contents;
    }

    std::set<std::string> hits;
    if (ends_final && traj.length() < cfg.min_steps) hits.insert("premature_final");
    if (repeated) hits.insert("repeated_search");
    if (ends_final && !any_read) hits.insert("no_read_before_final");
    for (const auto& q : queries) {
        const int n = static_cast<int>(text::tokenize(q).size());
        if (n < cfg.broad_query_tokens) hits.insert("query_too_broad");
        if (n > cfg.narrow_query_tokens) hits.insert("query_too_narrow");
    }
    if (!answer.empty() && entity_overlap(answer, traj.gold_answers) < cfg.entity_overlap)
        hits.insert("wrong_entity_focus");
    if (!text::content_tokens(answer).empty() && text::grounded_fraction(answer, read_contents) < cfg.grounding)
        hits.insert("reasoning_hallucination");
    const int answer_tokens = static_cast<int>(text::tokenize(answer).size());
    if (answer_tokens == 0 || answer_tokens > cfg.max_answer_tokens) hits.insert("format_mismatch");
    if (text::is_multi_part(traj.question) && !answer.empty()) {
        const auto toks = text::tokenize(answer);
        const bool joined = std::find(toks.begin(), toks.end(), "and") != toks.end() ||
                            answer.find(',') != std::string::npos || answer.find(';') != std::string::npos;
        if (!joined) hits.insert("partial_answer");
    }
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
        if (!traj.steps[i].ctx_snapshot.contradictory_sources) continue;
        bool searched_after = false;
        for (std::size_t j = i; j < traj.steps.size(); ++j)
            searched_after = searched_after || (traj.steps[j].executed && traj.steps[j].a_final.type == ActionType::Search);
        if (!searched_after) hits.insert("contradictory_evidence_ignored");
        break;
    }
    if (max_steps > 0 && traj.length() >= max_steps && repeated) hits.insert("excessive_steps_no_progress");
    for (const auto& s : traj.steps)
        if (s.was_modified) hits.insert("pf_override_harmful");

    for (const auto& cat : heuristic_categories()) {
        if (!hits.count(cat)) continue;
        const auto& t = category_text().at(cat);
        out.push_back({cat, t.abstraction, t.trigger, t.hint, traj.id, DetectorKind::Heuristic});
    }
    return out;
}

std::vector<FailureCluster> cluster(std::span<const FailurePattern> patterns, const LibraryState& lib,
                                    const ClusterConfig& cfg) {
    std::vector<FailurePattern> sorted(patterns.begin(), patterns.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const FailurePattern& a, const FailurePattern& b) {
        return std::tie(a.category, a.source_trajectory_id, a.abstraction, a.trigger, a.intervention_hint) <
               std::tie(b.category, b.source_trajectory_id, b.abstraction, b.trigger, b.intervention_hint);
    });
    std::vector<FailureCluster> clusters;
    std::size_t category_start = 0;
    for (const auto& p : sorted) {
        if (!clusters.empty() && clusters.back().representative.category != p.category) category_start = clusters.size();
        FailureCluster* home = nullptr;
        for (std::size_t c = category_start; c < clusters.size(); ++c) {
            if (text::token_jaccard(clusters[c].representative.abstraction, p.abstraction) >= cfg.merge_jaccard) {
                home = &clusters[c];
                break;
            }
        }
        if (!home) {
            clusters.push_back({p, {}, 0, 1.0, true});
            home = &clusters.back();
        }
        home->members.push_back(p);
        home->size = static_cast<int>(home->members.size());
    }

    std::vector<FailureCluster> kept;
    const auto active = lib.active();
    for (auto& c : clusters) {
        if (c.size < cfg.min_cluster_size) continue;
        double best = 0.0;
        for (const auto& skill : active)
            best = std::max(best, text::token_jaccard(c.representative.abstraction, skill->system_summary));
        c.novelty = 1.0 - best;
        c.is_new_category = c.novelty >= cfg.novelty_threshold;
        kept.push_back(std::move(c));
    }
    std::stable_sort(kept.begin(), kept.end(), [](const FailureCluster& a, const FailureCluster& b) {
        if (a.is_new_category != b.is_new_category) return a.is_new_category;
        if (a.size != b.size) return a.size > b.size;
        return a.representative.category < b.representative.category;
    });
    return kept;
}

TeacherRequest summary_request(const Trajectory& traj) {
    std::string trace;
    for (const auto& s : traj.steps) {
        trace += "step " + std::to_string(s.step_index) + ": " + describe(s.a_orig);
        if (s.was_modified) trace += " -> " + describe(s.a_final);
        trace += "\n";
    }
    TeacherRequest req;
    req.purpose = "failure_summary";
    req.temperature = kSummarizerTemperature;
    req.max_tokens = kSummarizerMaxTokens;
    req.payload = {{"question", truncate(traj.question, 500)},
                   {"gold_answers", traj.gold_answers},
                   {"prediction", truncate(traj.final_answer.value_or(""), 200)},
                   {"trace", truncate(trace, 1800)},
                   {"trajectory_id", traj.id}};
    return req;
}

std::optional<FailurePattern> parse_summary_reply(const std::string& reply, const std::string& traj_id,
                                                  std::string& diagnostic) {
    Json j;
    try {
        j = Json::parse(reply);
    } catch (const Json::exception& e) {
        diagnostic = "summary for " + traj_id + " is not JSON";
        return std::nullopt;
    }
    if (!j.is_object()) {
        diagnostic = "summary for " + traj_id + " is not an object";
        return std::nullopt;
    }
    for (const char* key : {"category", "abstraction", "trigger", "intervention_hint"}) {
        if (!j.contains(key) || !j[key].is_string()) {
            diagnostic = "summary for " + traj_id + " lacks string field '" + key + "'";
            return std::nullopt;
        }
    }
    static const std::regex kSnake("[a-z][a-z0-9_]{3,29}");
    const std::string category = j["category"].get<std::string>();
    if (!std::regex_match(category, kSnake)) {
        diagnostic = "summary for " + traj_id + " has invalid category '" + category + "'";
        return std::nullopt;
    }
    return FailurePattern{category,
                          j["abstraction"].get<std::string>(),
                          j["trigger"].get<std::string>(),
                          j["intervention_hint"].get<std::string>(),
                          traj_id,
                          DetectorKind::Llm};
}

SummaryResult summarize_failures(std::span<const Trajectory> failures, TeacherPort* teacher) {
    SummaryResult out;
    if (!teacher) {
        out.diagnostics.push_back("summarizer unavailable; heuristic patterns only");
        return out;
    }
    for (const auto& traj : failures) {
        ++out.requests;
        const auto reply = teacher->request(summary_request(traj));
        if (!reply) {
            out.diagnostics.push_back("no summary reply for " + traj.id);
            continue;
        }
        std::string diag;
        if (auto p = parse_summary_reply(*reply, traj.id, diag)) out.patterns.push_back(std::move(*p));
        else out.diagnostics.push_back(diag);
    }
    return out;
}

}  // namespace skillrt
