#include "skillrt/evolution/evolution.hpp"

#include "skillrt/rule_engine/parser.hpp"

#include <cctype>
#include <map>
#include <regex>

namespace skillrt {
namespace {

const std::regex kSnakeId("[a-z][a-z0-9_]*");

struct RuleTemplate {
    const char* phase;
    const char* rule;
};

// Rules keyed by failure category; unknown categories get the generic reminder.
const std::map<std::string, RuleTemplate>& rule_templates() {
    static const std::map<std::string, RuleTemplate> table = {
        {"premature_final",
         {"answer",
          "activate: action = FINAL and step_count < 3\n"
          "intervene:\n"
          "  when search_count = 0 => modify SEARCH \"{question}\" reason \"Answering before any search; forcing search\"\n"
          "  when read_count = 0 => modify READ \"doc_0\" reason \"Answering before reading evidence; forcing read\"\n"
          "  otherwise => inject \"Check that the evidence read so far answers every part of the question.\" "
          "reason \"early answer\"\n"}},
        {"repeated_search",
         {"search",
          "activate: action = SEARCH and token_jaccard_with_last_query(arg) > 0.8\n"
          "intervene:\n"
          "  when read_count = 0 and search_count > 0 => modify READ \"doc_0\" reason \"Repeated query; reading the top result\"\n"
          "  otherwise => inject \"This query repeats the previous one. Change the entities or answer from evidence.\" "
          "reason \"repeated query\"\n"}},
        {"no_read_before_final",
         {"answer",
          "activate: action = FINAL and read_count = 0\n"
          "intervene:\n"
          "  when search_count = 0 => modify SEARCH \"{question}\" reason \"Answering without any search; forcing search\"\n"
          "  otherwise => modify READ \"doc_0\" reason \"Searched but never read; forcing read\"\n"}},
        {"query_too_broad",
         {"search",
          "activate: action = SEARCH and word_count(arg) < 3\n"
          "intervene:\n"
          "  otherwise => modify SEARCH \"{question}\" reason \"Query too broad; searching with the question\"\n"}},
        {"query_too_narrow",
         {"search",
          "activate: action = SEARCH and word_count(arg) > 15\n"
          "intervene:\n"
          "  otherwise => inject \"Shorten the search query to its key entities.\" reason \"query too narrow\"\n"}},
        {"wrong_entity_focus",
         {"answer",
          "activate: action = FINAL and is_multi_hop(question)\n"
          "intervene:\n"
          "  otherwise => inject \"Confirm the answer names the entity the question asks about, not a related one.\" "
          "reason \"entity check\"\n"}},
        {"reasoning_hallucination",
         {"answer",
          "activate: action = FINAL and read_count = 0 and search_count > 0\n"
          "intervene:\n"
          "  otherwise => modify READ \"doc_0\" reason \"Answer not grounded in read text; forcing read\"\n"}},
        {"format_mismatch",
         {"answer",
          "activate: action = FINAL and word_count(arg) > 20\n"
          "intervene:\n"
          "  otherwise => inject \"Give only the short answer span.\" reason \"answer too long\"\n"}},
        {"partial_answer",
         {"answer",
          "activate: action = FINAL and is_multi_part(question) and word_count(arg) < 2\n"
          "intervene:\n"
          "  otherwise => inject \"Answer every part of the question.\" reason \"partial answer\"\n"}},
        {"contradictory_evidence_ignored",
         {"answer",
          "activate: action = FINAL and contradictory_sources\n"
          "intervene:\n"
          "  otherwise => modify SEARCH \"{question}\" reason \"Sources conflict; searching again\"\n"}},
        {"excessive_steps_no_progress",
         {"search",
          "activate: action = SEARCH and step_count >= max_steps - 2\n"
          "intervene:\n"
          "  when read_count = 0 and search_count > 0 => modify READ \"doc_0\" reason \"Budget nearly spent; reading the top result\"\n"
          "  otherwise => inject \"The step budget is nearly spent. Answer from the evidence gathered.\" "
          "reason \"budget\"\n"}},
    };
    return table;
}

constexpr const char* kGenericRule =
    "activate: action = FINAL and read_count = 0\n"
    "intervene:\n"
    "  otherwise => inject \"Verify the answer against retrieved evidence before finishing.\" reason \"generic check\"\n";

std::string title_of(const std::string& id) {
    std::string out;
    bool upper = true;
    for (char c : id) {
        if (c == '_') {
            out.push_back(' ');
            upper = true;
        } else {
            out.push_back(upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c);
            upper = false;
        }
    }
    return out;
}

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

std::string yaml_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : one_line(s)) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out + "\"";
}

}  // namespace

TeacherRequest proposal_request(const FailureCluster& cluster, const LibraryState& lib) {
    Json ids = Json::array();
    for (const auto& p : lib.active()) ids.push_back(p->base_id);
    TeacherRequest req;
    req.purpose = "skill_proposal";
    req.temperature = 0.3;
    req.max_tokens = 1200;
    req.payload = {{"category", cluster.representative.category},
                   {"abstraction", cluster.representative.abstraction},
                   {"trigger", cluster.representative.trigger},
                   {"intervention_hint", cluster.representative.intervention_hint},
                   {"cluster_size", cluster.size},
                   {"is_new_category", cluster.is_new_category},
                   {"library_ids", ids}};
    return req;
}

std::optional<CandidateSkill> parse_proposal(const std::string& reply, std::string& diagnostic) {
    Json j;
    try {
        j = Json::parse(reply);
    } catch (const Json::exception&) {
        diagnostic = "proposal is not JSON";
        return std::nullopt;
    }
    if (!j.is_object() || !j.contains("base_id") || !j["base_id"].is_string() || !j.contains("doc_text") ||
        !j["doc_text"].is_string()) {
        diagnostic = "proposal lacks string fields base_id and doc_text";
        return std::nullopt;
    }
    CandidateSkill c;
    c.base_id = j["base_id"].get<std::string>();
    c.doc_text = j["doc_text"].get<std::string>();
    if (auto it = j.find("rule_source"); it != j.end() && it->is_string()) c.rule_source = it->get<std::string>();
    if (auto it = j.find("proposer_meta"); it != j.end() && it->is_string()) c.proposer_meta = it->get<std::string>();
    if (!std::regex_match(c.base_id, kSnakeId)) {
        diagnostic = "proposal base_id '" + c.base_id + "' is not snake_case";
        return std::nullopt;
    }
    if (c.rule_source.empty() && !rules::extract_rule_block(c.doc_text)) {
        diagnostic = "proposal for " + c.base_id + " has no rule block";
        return std::nullopt;
    }
    return c;
}

ProposalBatch propose_candidates(std::span<const FailureCluster> clusters, const LibraryState& lib,
                                 ProposerPort* proposer, int cap) {
    ProposalBatch batch;
    if (!proposer) {
        if (!clusters.empty()) batch.diagnostics.push_back("proposer unavailable; no candidates this epoch");
        return batch;
    }
    for (std::size_t i = 0; i < clusters.size() && batch.requests < cap; ++i) {
        ++batch.requests;
        const auto reply = proposer->request(proposal_request(clusters[i], lib));
        if (!reply) {
            batch.diagnostics.push_back("proposer gave no reply for cluster " + std::to_string(i));
            continue;
        }
        std::string diag;
        auto cand = parse_proposal(*reply, diag);
        if (!cand) {
            batch.diagnostics.push_back("cluster " + std::to_string(i) + ": " + diag);
            continue;
        }
        cand->origin_category = clusters[i].representative.category;
        cand->origin_cluster = static_cast<int>(i);
        cand->is_new_group = clusters[i].is_new_category;
        batch.candidates.push_back(std::move(*cand));
    }
    return batch;
}

std::optional<std::string> TemplateProposer::request(const TeacherRequest& req) {
    if (req.purpose != "skill_proposal") return std::nullopt;
    const std::string category = req.payload.value("category", "");
    if (!std::regex_match(category, kSnakeId)) return std::nullopt;
    const auto& table = rule_templates();
    const auto it = table.find(category);
    const std::string phase = it != table.end() ? it->second.phase : "answer";
    const std::string rule = it != table.end() ? it->second.rule : kGenericRule;
    const std::string abstraction = req.payload.value("abstraction", "");
    const std::string title = title_of(category);

    std::string doc = "---\n";
    doc += "skill_id: " + category + "\n";
    doc += "name: " + title + "\n";
    doc += "error_category: " + category + "\n";
    doc += "applicable_phases: [" + phase + "]\n";
    doc += "applicable_modes: [all]\n";
    doc += "priority: 0.6\n";
    doc += "system_summary: " + yaml_quote(abstraction) + "\n";
    doc += "---\n\n# " + title + "\n\n" + one_line(abstraction) + "\n\n";
    doc += "## Detection Triggers\n\n" + one_line(req.payload.value("trigger", "")) + "\n\n";
    doc += "## Intervention\n\n" + one_line(req.payload.value("intervention_hint", "")) + "\n\n";
    doc += "```rule\n" + rule + "```\n";

    return Json{{"base_id", category}, {"doc_text", doc}, {"rule_source", ""}, {"proposer_meta", "template"}}.dump();
}

}  // namespace skillrt
