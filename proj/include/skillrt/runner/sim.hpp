#pragma once

#include "skillrt/harness/ports.hpp"
#include "skillrt/ports.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace skillrt::sim {

struct Document {
    std::string id;
    std::string title;
    std::string text;
};

// In-memory retrieval corpus. Search ranks documents by the number of
// distinct query content tokens they contain; ties keep corpus order.
class SimCorpus {
public:
    SimCorpus() = default;
    explicit SimCorpus(std::vector<Document> docs);

    const std::vector<Document>& documents() const { return docs_; }
    SearchOutcome search(const std::string& query, std::size_t top_k = 3) const;
    std::optional<std::string> read(const std::string& doc_id) const;

private:
    std::vector<Document> docs_;
    std::map<std::string, std::size_t> by_id_;
};

// {"documents": [{"id", "title"?, "text"}, ...]}
SimCorpus load_corpus(const std::filesystem::path& path);
SimCorpus corpus_from_json(const Json& j);

class SimEnvironment : public EnvironmentPort {
public:
    explicit SimEnvironment(const SimCorpus& corpus) : corpus_(corpus) {}
    SearchOutcome search(const std::string& query) override { return corpus_.search(query); }
    std::optional<std::string> read(const std::string& doc_id) override { return corpus_.read(doc_id); }

private:
    const SimCorpus& corpus_;
};

// SEARCH asks the teacher for a snippet (purpose search_snippet); READ returns
// the snippet of that search. An unavailable teacher yields empty results.
class TeacherSnippetEnvironment : public EnvironmentPort {
public:
    explicit TeacherSnippetEnvironment(TeacherPort& teacher) : teacher_(teacher) {}
    SearchOutcome search(const std::string& query) override;
    std::optional<std::string> read(const std::string& doc_id) override;

private:
    TeacherPort& teacher_;
    std::map<std::string, std::string> snippets_;
    int next_ = 0;
};

}  // namespace skillrt::sim
