#include "skillrt/runner/sim.hpp"

#include "skillrt/errors.hpp"
#include "skillrt/failure_miner/text_metrics.hpp"
#include "skillrt/io/json_io.hpp"

#include <algorithm>
#include <set>

namespace skillrt::sim {
namespace {

constexpr std::size_t kSnippetChars = 300;

std::set<std::string> content_set(const std::string& s) {
    const auto toks = text::content_tokens(s);
    return {toks.begin(), toks.end()};
}

}  // namespace

SimCorpus::SimCorpus(std::vector<Document> docs) : docs_(std::move(docs)) {
    for (std::size_t i = 0; i < docs_.size(); ++i)
        if (!by_id_.emplace(docs_[i].id, i).second) throw Error("duplicate corpus document id '" + docs_[i].id + "'");
}

SearchOutcome SimCorpus::search(const std::string& query, std::size_t top_k) const {
    const auto wanted = content_set(query);
    std::vector<std::pair<std::size_t, std::size_t>> scored;  // (overlap, index)
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        const auto have = content_set(docs_[i].title + " " + docs_[i].text);
        std::size_t overlap = 0;
        for (const auto& t : wanted) overlap += have.count(t);
        if (overlap > 0) scored.emplace_back(overlap, i);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    SearchOutcome out;
    out.empty = scored.empty();
    for (std::size_t r = 0; r < scored.size() && r < top_k; ++r) {
        const Document& d = docs_[scored[r].second];
        std::string snippet = d.text.size() > kSnippetChars ? d.text.substr(0, kSnippetChars) + "..." : d.text;
        if (!out.text.empty()) out.text += "\n";
        out.text += "doc_" + std::to_string(r) + "  " + (d.title.empty() ? "" : d.title + ": ") + snippet;
        out.doc_ids.push_back(d.id);
    }
    return out;
}

std::optional<std::string> SimCorpus::read(const std::string& doc_id) const {
    auto it = by_id_.find(doc_id);
    if (it == by_id_.end()) return std::nullopt;
    const Document& d = docs_[it->second];
    return d.title.empty() ? d.text : d.title + "\n" + d.text;
}

SimCorpus corpus_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("documents") || !j["documents"].is_array())
        throw ConfigError("corpus must be an object with a 'documents' array");
    std::vector<Document> docs;
    for (const auto& d : j["documents"]) {
        if (!d.contains("id") || !d.contains("text")) throw ConfigError("corpus document needs 'id' and 'text'");
        docs.push_back({d["id"].get<std::string>(), d.value("title", ""), d["text"].get<std::string>()});
    }
    return SimCorpus(std::move(docs));
}

SimCorpus load_corpus(const std::filesystem::path& path) {
    try {
        return corpus_from_json(Json::parse(io::read_text(path)));
    } catch (const Json::exception& e) {
        throw ConfigError("corpus " + path.string() + ": " + e.what());
    }
}

SearchOutcome TeacherSnippetEnvironment::search(const std::string& query) {
    TeacherRequest req{"search_snippet", {{"query", query}}, 0.0, 200};
    SearchOutcome out;
    const auto reply = teacher_.request(req);
    if (!reply || reply->find_first_not_of(" \t\r\n") == std::string::npos) return out;
    const std::string id = "snippet_" + std::to_string(next_++);
    snippets_[id] = *reply;
    out.empty = false;
    out.text = "doc_0  " + *reply;
    out.doc_ids = {id};
    return out;
}

std::optional<std::string> TeacherSnippetEnvironment::read(const std::string& doc_id) {
    auto it = snippets_.find(doc_id);
    if (it == snippets_.end()) return std::nullopt;
    return it->second;
}

}  // namespace skillrt::sim
