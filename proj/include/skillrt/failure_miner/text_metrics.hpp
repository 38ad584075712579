#pragma once

// Lexical text utilities shared across the runtime: answer metrics,
// token-set similarity, grounding, and cheap question shape features.

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skillrt::text {

std::string to_lower(std::string_view s);

// Lowercase, drop ASCII punctuation, split on whitespace.
std::vector<std::string> tokenize(std::string_view s);
std::set<std::string> token_set(std::string_view s);

// |A ∩ B| / |A ∪ B| over token sets; two empty sets give 1.0.
double token_jaccard(std::string_view a, std::string_view b);

// Lowercase, strip punctuation, strip a/an/the, collapse whitespace.
std::string normalize_answer(std::string_view s);

struct EmF1 {
    int em = 0;
    double f1 = 0.0;
};

// em: normalized pred equals any normalized gold; f1: best token F1 over golds.
EmF1 em_f1(std::string_view pred, std::span<const std::string> golds);

// Fixed 50-word stopword list used for content-token extraction.
const std::set<std::string>& stopwords();
std::vector<std::string> content_tokens(std::string_view s);

// Fraction of the answer's content tokens found in the concatenated read
// contents (after answer normalization). Zero when the answer has no content tokens.
double grounded_fraction(std::string_view answer, std::span<const std::string> read_contents);

// ---- question shape --------------------------------------------------------

int count_interrogatives(std::string_view question);
int count_possessives(std::string_view question);
int count_of_the(std::string_view question);
bool has_relative_pronoun_chain(std::string_view question);
bool has_negation(std::string_view question);
bool has_numeric_constraint(std::string_view question);

// >= 2 possessives, >= 2 "of the" chains, or a relative-pronoun chain.
bool is_multi_hop(std::string_view question);
// >= 2 interrogatives, or a conjunction ("and" / "both") joining parts.
bool is_multi_part(std::string_view question);
// Arithmetic operators or mostly-numeric tokens.
bool is_computation(std::string_view question);

int word_count(std::string_view s);

// Quoted span if present, else the first line truncated to `max_words` words.
std::string smart_shorten(std::string_view arg, int max_words = 12);

}  // namespace skillrt::text
