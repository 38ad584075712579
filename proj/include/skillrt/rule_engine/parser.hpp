#pragma once

#include "skillrt/rule_engine/ast.hpp"

#include <set>
#include <string>
#include <string_view>

namespace skillrt::rules {

inline constexpr std::size_t kMaxExpressionNodes = 1024;

// Context fields a rule may read. `action` and `arg` name the proposal.
const std::set<std::string>& field_vocabulary();
const std::set<std::string>& function_vocabulary();

// Throws SyntaxError, UnknownField or UnknownFunction.
RuleAst parse_rule(std::string_view source);

// Contents of the first ```rule fenced block in a markdown body, if any.
std::optional<std::string> extract_rule_block(std::string_view markdown);

}  // namespace skillrt::rules
