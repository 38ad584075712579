#include "skillrt/skill_store/library.hpp"

#include "skillrt/errors.hpp"
#include "skillrt/rule_engine/parser.hpp"

#include <algorithm>

namespace skillrt {

std::string_view to_string(Decision d) {
    switch (d) {
    case Decision::Accept: return "accept";
    case Decision::Revise: return "revise";
    case Decision::Reject: return "reject";
    }
    return "reject";
}

std::optional<Decision> parse_decision(std::string_view text) {
    std::string lower;
    for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "accept") return Decision::Accept;
    if (lower == "revise") return Decision::Revise;
    if (lower == "reject") return Decision::Reject;
    return std::nullopt;
}

std::vector<ProgramPtr> LibraryState::active() const {
    std::vector<ProgramPtr> out;
    out.reserve(entries_.size());
    for (const auto& [base, versions] : entries_) out.push_back(versions.back());
    return out;
}

ProgramPtr LibraryState::find(const std::string& base_id) const {
    auto it = entries_.find(base_id);
    return it == entries_.end() ? nullptr : it->second.back();
}

std::optional<int> LibraryState::highest_version(const std::string& base_id) const {
    auto it = entries_.find(base_id);
    if (it == entries_.end()) return std::nullopt;
    return it->second.back()->version;
}

LibraryState LibraryState::with_event(AdmissionEvent event) const {
    LibraryState next = *this;
    const std::uint64_t last = history_.empty() ? 0 : history_.back().timestamp;
    if (event.timestamp <= last) event.timestamp = last + 1;
    if (event.decision == Decision::Accept) {
        if (!event.program) throw Error("accept event for " + event.base_id + " carries no program");
        auto it = next.entries_.find(event.base_id);
        if (it == next.entries_.end()) {
            if (next.entries_.size() >= max_size_) throw CapacityExceeded(max_size_);
            next.entries_[event.base_id].push_back(event.program);
        } else {
            const int top = it->second.back()->version;
            for (const auto& p : it->second)
                if (p->version == event.version) throw DuplicateVersion(event.base_id, event.version);
            if (event.version != top + 1)
                throw SkillDocError("version gap for " + event.base_id + ": v" + std::to_string(top) + " then v" +
                                    std::to_string(event.version));
            it->second.push_back(event.program);
        }
    }
    next.history_.push_back(std::move(event));
    return next;
}

LibraryState load_library(std::span<const std::string> docs, std::size_t max_size) {
    std::vector<ProgramPtr> programs;
    programs.reserve(docs.size());
    for (const auto& text : docs) programs.push_back(std::make_shared<const SkillProgram>(parse_skill_doc(text)));
    std::stable_sort(programs.begin(), programs.end(), [](const ProgramPtr& a, const ProgramPtr& b) {
        return std::tie(a->base_id, a->version) < std::tie(b->base_id, b->version);
    });
    for (std::size_t i = 1; i < programs.size(); ++i)
        if (programs[i]->base_id == programs[i - 1]->base_id && programs[i]->version == programs[i - 1]->version)
            throw DuplicateVersion(programs[i]->base_id, programs[i]->version);
    LibraryState lib(max_size);
    for (const auto& p : programs) {
        AdmissionEvent ev;
        ev.base_id = p->base_id;
        ev.version = p->version;
        ev.decision = Decision::Accept;
        ev.program = p;
        lib = lib.with_event(std::move(ev));
    }
    return lib;
}

LibraryState load_library(std::span<const SkillDoc> docs, std::size_t max_size) {
    std::vector<std::string> texts;
    texts.reserve(docs.size());
    for (const auto& d : docs) texts.push_back(d.raw_text);
    return load_library(std::span<const std::string>(texts), max_size);
}

namespace {

// Replaces the rule block of the document, or appends one.
std::string with_rule_block(std::string doc, const std::string& rule) {
    std::string block = rule;
    if (!block.ends_with('\n')) block.push_back('\n');
    const auto open = doc.find("```rule");
    if (open != std::string::npos) {
        const auto body = doc.find('\n', open);
        const auto close = body == std::string::npos ? std::string::npos : doc.find("```", body + 1);
        if (close != std::string::npos) return doc.replace(body + 1, close - body - 1, block);
    }
    if (!doc.ends_with('\n')) doc.push_back('\n');
    return doc + "\n```rule\n" + block + "```\n";
}

}  // namespace

LibraryState admit(const LibraryState& lib, const CandidateSkill& cand, Decision decision,
                   std::optional<ReviewScores> review, std::optional<rules::ExecReport> exec) {
    AdmissionEvent ev;
    ev.base_id = cand.base_id;
    ev.version = lib.highest_version(cand.base_id).value_or(0) + 1;
    ev.decision = decision;
    ev.review = std::move(review);
    ev.exec = std::move(exec);
    if (decision == Decision::Accept) {
        std::string doc = restamp_version(cand.doc_text, cand.base_id, ev.version);
        if (!cand.rule_source.empty()) doc = with_rule_block(doc, cand.rule_source);
        ev.program = std::make_shared<const SkillProgram>(parse_skill_doc(doc));
    }
    return lib.with_event(std::move(ev));
}

LibraryState replay(std::span<const AdmissionEvent> events, std::size_t max_size) {
    LibraryState lib(max_size);
    for (const auto& ev : events) lib = lib.with_event(ev);
    return lib;
}

std::vector<std::string> serialize(const LibraryState& lib) {
    std::vector<std::string> out;
    for (const auto& [base, versions] : lib.entries())
        for (const auto& p : versions) out.push_back(p->doc_text);
    return out;
}

}  // namespace skillrt
