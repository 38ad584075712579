#include "skillrt/failure_miner/text_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace skillrt::text {
namespace {

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (is_space(c)) {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string strip_punct(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (!is_punct(c)) out.push_back(c);
    return out;
}

const std::set<std::string> kInterrogatives = {"who",  "what", "when", "where", "which",
                                               "why",  "how",  "whom", "whose"};
const std::set<std::string> kRelativePronouns = {"who", "which", "that", "whose", "whom"};
const std::set<std::string> kNegations = {"not", "never", "except", "no", "without", "none", "neither", "nor"};

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string> tokenize(std::string_view s) { return split_ws(strip_punct(to_lower(s))); }

std::set<std::string> token_set(std::string_view s) {
    auto toks = tokenize(s);
    return {toks.begin(), toks.end()};
}

double token_jaccard(std::string_view a, std::string_view b) {
    const auto ta = token_set(a);
    const auto tb = token_set(b);
    if (ta.empty() && tb.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& t : ta) inter += tb.count(t);
    const std::size_t uni = ta.size() + tb.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::string normalize_answer(std::string_view s) {
    std::string out;
    for (const auto& tok : split_ws(strip_punct(to_lower(s)))) {
        if (tok == "a" || tok == "an" || tok == "the") continue;
        if (!out.empty()) out.push_back(' ');
        out += tok;
    }
    return out;
}

EmF1 em_f1(std::string_view pred, std::span<const std::string> golds) {
    EmF1 best;
    const std::string np = normalize_answer(pred);
    const auto pred_toks = split_ws(np);
    for (const auto& gold : golds) {
        const std::string ng = normalize_answer(gold);
        if (np == ng) best.em = 1;
        const auto gold_toks = split_ws(ng);
        double f1 = 0.0;
        if (pred_toks.empty() || gold_toks.empty()) {
            f1 = (pred_toks.empty() && gold_toks.empty()) ? 1.0 : 0.0;
        } else {
            std::map<std::string, int> counts;
            for (const auto& t : gold_toks) ++counts[t];
            int common = 0;
            for (const auto& t : pred_toks) {
                auto it = counts.find(t);
                if (it != counts.end() && it->second > 0) {
                    --it->second;
                    ++common;
                }
            }
            if (common > 0) {
                const double p = static_cast<double>(common) / static_cast<double>(pred_toks.size());
                const double r = static_cast<double>(common) / static_cast<double>(gold_toks.size());
                f1 = 2.0 * p * r / (p + r);
            }
        }
        best.f1 = std::max(best.f1, f1);
    }
    return best;
}

const std::set<std::string>& stopwords() {
    static const std::set<std::string> words = {
        "a",    "an",   "the",  "and",  "or",    "but",  "if",   "of",   "at",    "by",
        "for",  "with", "about", "to",  "from",  "in",   "on",   "is",   "are",   "was",
        "were", "be",   "been", "being", "it",   "its",  "this", "that", "these", "those",
        "as",   "into", "than", "then", "so",    "such", "he",   "she",  "they",  "them",
        "his",  "her",  "their", "i",   "you",   "we",   "do",   "does", "did",   "has"};
    return words;
}

std::vector<std::string> content_tokens(std::string_view s) {
    std::vector<std::string> out;
    for (auto& tok : split_ws(normalize_answer(s)))
        if (!stopwords().count(tok)) out.push_back(std::move(tok));
    return out;
}

double grounded_fraction(std::string_view answer, std::span<const std::string> read_contents) {
    const auto content = content_tokens(answer);
    if (content.empty()) return 0.0;
    std::string all;
    for (const auto& r : read_contents) {
        all += r;
        all.push_back(' ');
    }
    const auto read_toks = split_ws(normalize_answer(all));
    const std::set<std::string> read_set(read_toks.begin(), read_toks.end());
    std::size_t hit = 0;
    for (const auto& t : content) hit += read_set.count(t);
    return static_cast<double>(hit) / static_cast<double>(content.size());
}

int count_interrogatives(std::string_view question) {
    int n = 0;
    for (const auto& t : tokenize(question)) n += kInterrogatives.count(t) ? 1 : 0;
    return n;
}

int count_possessives(std::string_view question) {
    int n = 0;
    for (auto tok : split_ws(to_lower(question))) {
        while (!tok.empty() && is_punct(tok.back()) && tok.back() != '\'') tok.pop_back();
        const bool ascii = tok.size() > 2 && (tok.ends_with("'s") || tok.ends_with("s'"));
        const bool curly = tok.size() > 4 && tok.ends_with("\xE2\x80\x99s");
        n += (ascii || curly) ? 1 : 0;
    }
    return n;
}

int count_of_the(std::string_view question) {
    const auto toks = tokenize(question);
    int n = 0;
    for (std::size_t i = 0; i + 1 < toks.size(); ++i)
        if (toks[i] == "of" && toks[i + 1] == "the") ++n;
    return n;
}

bool has_relative_pronoun_chain(std::string_view question) {
    const auto toks = tokenize(question);
    for (std::size_t i = 1; i < toks.size(); ++i)
        if (kRelativePronouns.count(toks[i])) return true;
    return false;
}

bool has_negation(std::string_view question) {
    for (const auto& t : tokenize(question))
        if (kNegations.count(t)) return true;
    return false;
}

bool has_numeric_constraint(std::string_view question) {
    if (std::any_of(question.begin(), question.end(),
                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }))
        return true;
    const std::string q = " " + normalize_answer(question) + " ";
    for (const char* phrase : {" before ", " after ", " more than ", " less than ", " at least ",
                               " at most ", " between ", " fewer than "})
        if (q.find(phrase) != std::string::npos) return true;
    return false;
}

bool is_multi_hop(std::string_view question) {
    return count_possessives(question) >= 2 || count_of_the(question) >= 2 ||
           has_relative_pronoun_chain(question);
}

bool is_multi_part(std::string_view question) {
    if (count_interrogatives(question) >= 2) return true;
    for (const auto& t : tokenize(question))
        if (t == "and" || t == "both") return true;
    return false;
}

bool is_computation(std::string_view question) {
    for (std::size_t i = 0; i < question.size(); ++i) {
        const char c = question[i];
        if (c == '+' || c == '*' || c == '/' || c == '=' || c == '^') return true;
        if (c == '-' && i > 0 && i + 1 < question.size() &&
            std::isdigit(static_cast<unsigned char>(question[i - 1])) &&
            std::isdigit(static_cast<unsigned char>(question[i + 1])))
            return true;
    }
    const auto toks = split_ws(question);
    if (toks.empty()) return false;
    std::size_t numeric = 0;
    for (const auto& t : toks)
        if (std::any_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }))
            ++numeric;
    return numeric * 2 > toks.size();
}

int word_count(std::string_view s) { return static_cast<int>(split_ws(s).size()); }

std::string smart_shorten(std::string_view arg, int max_words) {
    const auto open = arg.find('"');
    if (open != std::string_view::npos) {
        const auto close = arg.find('"', open + 1);
        if (close != std::string_view::npos && close > open + 1) {
            std::string span(arg.substr(open + 1, close - open - 1));
            if (word_count(span) > 0) return span;
        }
    }
    const auto nl = arg.find('\n');
    const auto words = split_ws(arg.substr(0, nl));
    std::string out;
    for (std::size_t i = 0; i < words.size() && static_cast<int>(i) < max_words; ++i) {
        if (!out.empty()) out.push_back(' ');
        out += words[i];
    }
    return out;
}

}  // namespace skillrt::text
