#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace skillrt {

using Json = nlohmann::json;

// One request to an auxiliary model (teacher, proposer, reviewer, summarizer).
struct TeacherRequest {
    std::string purpose;
    Json payload = Json::object();
    double temperature = 0.0;
    int max_tokens = 50;
};

// Text-in/text-out model endpoint. An empty optional means the model is
// unavailable or the call failed; callers fall back deterministically.
class ModelPort {
public:
    virtual ~ModelPort() = default;
    virtual std::optional<std::string> request(const TeacherRequest& req) = 0;
};

using TeacherPort = ModelPort;
using ProposerPort = ModelPort;

}  // namespace skillrt
