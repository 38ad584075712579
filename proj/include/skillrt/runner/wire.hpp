#pragma once

#include "skillrt/harness/ports.hpp"
#include "skillrt/ports.hpp"

#include <chrono>
#include <cstdint>
#include <string>
#include <sys/types.h>

namespace skillrt::wire {

inline constexpr std::chrono::milliseconds kDefaultTimeout{60'000};

// Line-delimited JSON over the standard streams of a child process started
// with `sh -c command`. Each request carries a fresh request_id and expects
// exactly one reply with the same id.
class Channel {
public:
    explicit Channel(const std::string& command, std::chrono::milliseconds timeout = kDefaultTimeout);
    ~Channel();
    Channel(const Channel&) = delete;
    Channel& operator=(const Channel&) = delete;

    // Throws Timeout, or PolicyProtocolError on a malformed, mismatched or missing reply.
    Json call(const std::string& type, const Json& payload, const std::string& reply_type);

private:
    std::string read_line();

    pid_t child_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::int64_t next_id_ = 1;
    std::chrono::milliseconds timeout_;
    std::string buffer_;
};

Json request_message(const std::string& type, std::int64_t request_id, const Json& payload);

// Validates an action_reply payload; throws PolicyProtocolError.
ActionProposal parse_action_reply(const Json& payload);

class WirePolicy : public PolicyPort {
public:
    explicit WirePolicy(const std::string& command, std::chrono::milliseconds timeout = kDefaultTimeout)
        : channel_(command, timeout) {}
    ActionProposal propose(const PolicyView& view) override;
    std::string last_thought() const override { return thought_; }

private:
    Channel channel_;
    std::string thought_;
};

// Transport failures and null replies both surface as an unavailable teacher.
class WireTeacher : public ModelPort {
public:
    explicit WireTeacher(const std::string& command, std::chrono::milliseconds timeout = kDefaultTimeout)
        : channel_(command, timeout) {}
    std::optional<std::string> request(const TeacherRequest& req) override;

private:
    Channel channel_;
};

}  // namespace skillrt::wire
