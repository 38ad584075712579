#include "skillrt/runner/wire.hpp"

#include "skillrt/errors.hpp"

#include <csignal>
#include <cerrno>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace skillrt::wire {
namespace {

void write_all(int fd, const std::string& data) {
    std::size_t done = 0;
    while (done < data.size()) {
        const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw PolicyProtocolError("peer closed its input");
        }
        done += static_cast<std::size_t>(n);
    }
}

}  // namespace

Json request_message(const std::string& type, std::int64_t request_id, const Json& payload) {
    return {{"type", type}, {"request_id", request_id}, {"payload", payload}};
}

Channel::Channel(const std::string& command, std::chrono::milliseconds timeout) : timeout_(timeout) {
    std::signal(SIGPIPE, SIG_IGN);
    int in_pipe[2], out_pipe[2];
    if (::pipe(in_pipe) != 0) throw Error("pipe failed");
    if (::pipe(out_pipe) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw Error("pipe failed");
    }
    child_ = ::fork();
    if (child_ < 0) throw Error("fork failed");
    if (child_ == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

Channel::~Channel() {
    if (to_child_ >= 0) {
        try {
            write_all(to_child_, request_message("shutdown", next_id_++, Json::object()).dump() + "\n");
        } catch (const Error&) {
        }
        ::close(to_child_);
    }
    if (from_child_ >= 0) ::close(from_child_);
    if (child_ > 0) {
        for (int i = 0; i < 50; ++i) {
            if (::waitpid(child_, nullptr, WNOHANG) != 0) return;
            ::usleep(10'000);
        }
        ::kill(child_, SIGKILL);
        ::waitpid(child_, nullptr, 0);
    }
}

std::string Channel::read_line() {
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    for (;;) {
        if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        const auto left =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) throw Timeout("no reply within " + std::to_string(timeout_.count()) + " ms");
        pollfd pfd{from_child_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (ready < 0 && errno == EINTR) continue;
        if (ready == 0) throw Timeout("no reply within " + std::to_string(timeout_.count()) + " ms");
        char chunk[4096];
        const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) throw PolicyProtocolError("peer closed its output");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

Json Channel::call(const std::string& type, const Json& payload, const std::string& reply_type) {
    const std::int64_t id = next_id_++;
    write_all(to_child_, request_message(type, id, payload).dump() + "\n");
    Json reply;
    try {
        reply = Json::parse(read_line());
    } catch (const Json::exception& e) {
        throw PolicyProtocolError(std::string("reply is not JSON: ") + e.what());
    }
    if (!reply.is_object() || reply.value("type", "") != reply_type)
        throw PolicyProtocolError("expected a " + reply_type + " message");
    if (!reply.contains("request_id") || reply["request_id"] != id)
        throw PolicyProtocolError("reply does not carry request_id " + std::to_string(id));
    if (!reply.contains("payload") || !reply["payload"].is_object())
        throw PolicyProtocolError("reply has no payload object");
    return reply["payload"];
}

ActionProposal parse_action_reply(const Json& payload) {
    if (!payload.contains("action_type") || !payload["action_type"].is_string())
        throw PolicyProtocolError("action_reply lacks action_type");
    const std::string type = payload["action_type"].get<std::string>();
    const auto parsed = parse_action_type(type);
    if (!parsed) throw PolicyProtocolError("action_type '" + type + "' is not SEARCH, READ or FINAL");
    if (payload.contains("arg") && !payload["arg"].is_string()) throw PolicyProtocolError("arg must be a string");
    return {*parsed, payload.value("arg", "")};
}

ActionProposal WirePolicy::propose(const PolicyView& view) {
    Json injected = Json::array();
    for (const auto& [id, text] : view.injected_contexts) injected.push_back({{"skill_id", id}, {"text", text}});
    const Json payload = channel_.call("propose_action",
                                       {{"question", view.question},
                                        {"observations", view.observations},
                                        {"injected_contexts", injected},
                                        {"step_count", view.step_count}},
                                       "action_reply");
    const ActionProposal action = parse_action_reply(payload);
    thought_ = payload.contains("thought") && payload["thought"].is_string() ? payload["thought"].get<std::string>()
                                                                           : std::string();
    return action;
}

std::optional<std::string> WireTeacher::request(const TeacherRequest& req) {
    try {
        const Json payload = channel_.call("teacher_request",
                                           {{"purpose", req.purpose},
                                            {"payload", req.payload},
                                            {"temperature", req.temperature},
                                            {"max_tokens", req.max_tokens}},
                                           "teacher_reply");
        if (payload.contains("text") && payload["text"].is_string()) return payload["text"].get<std::string>();
        return std::nullopt;
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace skillrt::wire
