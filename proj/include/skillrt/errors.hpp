#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skillrt {

// Root of every error the runtime throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- skill documents -------------------------------------------------------

class SkillDocError : public Error {
public:
    using Error::Error;
};

class MissingFrontmatter : public SkillDocError {
public:
    MissingFrontmatter() : SkillDocError("skill document has no leading '---' metadata block") {}
};

class MissingKey : public SkillDocError {
public:
    explicit MissingKey(std::string key)
        : SkillDocError("frontmatter is missing required key '" + key + "'"), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class MalformedFrontmatter : public SkillDocError {
public:
    using SkillDocError::SkillDocError;
};

// ---- rule language ---------------------------------------------------------

class RuleParseError : public Error {
public:
    using Error::Error;
};

class SyntaxError : public RuleParseError {
public:
    SyntaxError(std::string what, std::size_t position)
        : RuleParseError("syntax error at offset " + std::to_string(position) + ": " + what),
          position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class UnknownField : public RuleParseError {
public:
    explicit UnknownField(std::string name)
        : RuleParseError("unknown context field '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class UnknownFunction : public RuleParseError {
public:
    explicit UnknownFunction(std::string name)
        : RuleParseError("unknown function '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// ---- library ---------------------------------------------------------------

class DuplicateVersion : public Error {
public:
    DuplicateVersion(const std::string& base_id, int version)
        : Error("duplicate skill version " + base_id + "__v" + std::to_string(version)) {}
};

class CapacityExceeded : public Error {
public:
    explicit CapacityExceeded(std::size_t max_size)
        : Error("active skill library would exceed max_size=" + std::to_string(max_size)) {}
};

// ---- runtime ---------------------------------------------------------------

class PolicyProtocolError : public Error {
public:
    using Error::Error;
};

class EnvironmentError : public Error {
public:
    using Error::Error;
};

class Timeout : public Error {
public:
    using Error::Error;
};

class EmptyTrajectory : public Error {
public:
    EmptyTrajectory() : Error("trajectory has no steps") {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace skillrt
