#include "skillrt/runner/app_config.hpp"

#include "skillrt/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cstdlib>
#include <functional>

namespace skillrt::app {
namespace {

using Setter = std::function<void(AppConfig&, const std::string&)>;

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

long long to_integer(const std::string& key, const std::string& v) {
    long long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

int to_int(const std::string& key, const std::string& v) { return static_cast<int>(to_integer(key, v)); }

double to_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return out;
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto b = [&](const std::string& key, auto member) {
            t[key] = [key, member](AppConfig& c, const std::string& v) { c.run.*member = to_bool(key, v); };
        };
        auto ri = [&](const std::string& key, auto member) {
            t[key] = [key, member](AppConfig& c, const std::string& v) { c.run.*member = to_int(key, v); };
        };
        b("run.skills_enabled", &RunConfig::skills_enabled);
        b("run.enable_program_functions", &RunConfig::enable_program_functions);
        b("run.enable_skill_handlers", &RunConfig::enable_skill_handlers);
        b("run.enable_prompt_only_skills", &RunConfig::enable_prompt_only_skills);
        b("run.pf_only_mode", &RunConfig::pf_only_mode);
        b("run.enable_difficulty_gating", &RunConfig::enable_difficulty_gating);
        b("run.teacher_selection", &RunConfig::teacher_selection);
        ri("run.difficulty_threshold", &RunConfig::difficulty_threshold);
        ri("run.pf_top_k", &RunConfig::pf_top_k);
        ri("run.max_skills_in_prompt", &RunConfig::max_skills_in_prompt);
        ri("run.max_phase_instructions", &RunConfig::max_phase_instructions);
        ri("run.pre_final_step_threshold", &RunConfig::pre_final_step_threshold);
        ri("run.handler_vote_threshold", &RunConfig::handler_vote_threshold);
        ri("run.modify_cap", &RunConfig::modify_cap);
        t["run.mode"] = [](AppConfig& c, const std::string& v) {
            auto m = parse_mode(v);
            if (!m) throw ConfigError("run.mode: expected web, math or code, got '" + v + "'");
            c.run.mode = *m;
        };
        auto budget = [&](const std::string& key, int Budgets::*member) {
            t[key] = [key, member](AppConfig& c, const std::string& v) { c.run.budgets.*member = to_int(key, v); };
        };
        budget("budgets.max_steps", &Budgets::max_steps);
        budget("budgets.max_search_calls", &Budgets::max_search_calls);
        budget("budgets.max_read_calls", &Budgets::max_read_calls);

        auto wd = [&](const std::string& key, double SignalWeights::*member) {
            t[key] = [key, member](AppConfig& c, const std::string& v) { c.weights.*member = to_double(key, v); };
        };
        wd("weights.beta_em", &SignalWeights::beta_em);
        wd("weights.beta_pf", &SignalWeights::beta_pf);
        wd("weights.blend", &SignalWeights::blend);
        t["weights.fine_mode"] = [](AppConfig& c, const std::string& v) {
            c.weights.fine_mode = to_bool("weights.fine_mode", v);
        };
        t["weights.normalize_fine"] = [](AppConfig& c, const std::string& v) {
            c.weights.normalize_fine = to_bool("weights.normalize_fine", v);
        };
        t["weights.coarse"] = [](AppConfig& c, const std::string& v) {
            std::array<double, 4> out{};
            std::size_t start = 0;
            for (int i = 0; i < 4; ++i) {
                const auto comma = v.find(',', start);
                if ((i < 3) != (comma != std::string::npos))
                    throw ConfigError("weights.coarse: expected four comma-separated numbers");
                std::string part = v.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
                part.erase(0, part.find_first_not_of(' '));
                part.erase(part.find_last_not_of(' ') + 1);
                out[i] = to_double("weights.coarse", part);
                start = comma + 1;
            }
            c.weights.coarse = out;
        };

        auto gd = [&](const std::string& key, double GateConfig::*member) {
            t[key] = [key, member](AppConfig& c, const std::string& v) { c.gate.*member = to_double(key, v); };
        };
        gd("gate.eta_exec", &GateConfig::eta_exec);
        gd("gate.accept_threshold", &GateConfig::accept_threshold);
        gd("gate.revise_threshold", &GateConfig::revise_threshold);
        gd("gate.new_group_threshold", &GateConfig::new_group_threshold);
        gd("gate.same_group_threshold", &GateConfig::same_group_threshold);
        t["gate.max_candidates_per_epoch"] = [](AppConfig& c, const std::string& v) {
            c.gate.max_candidates_per_epoch = to_int("gate.max_candidates_per_epoch", v);
        };
        t["gate.mode"] = [](AppConfig& c, const std::string& v) {
            auto m = parse_gate_mode(v);
            if (!m) throw ConfigError("gate.mode: expected strict or audit, got '" + v + "'");
            c.gate_mode = *m;
        };
        t["gate.lite"] = [](AppConfig& c, const std::string& v) { c.lite = to_bool("gate.lite", v); };
        t["gate.reward_lambda"] = [](AppConfig& c, const std::string& v) {
            c.reward_lambda = to_double("gate.reward_lambda", v);
        };

        t["data.test_boundary"] = [](AppConfig& c, const std::string& v) {
            c.data.test_boundary = to_int("data.test_boundary", v);
        };
        t["data.shuffle_seed"] = [](AppConfig& c, const std::string& v) {
            c.data.shuffle_seed = static_cast<std::uint64_t>(to_integer("data.shuffle_seed", v));
        };
        t["data.min_score"] = [](AppConfig& c, const std::string& v) { c.data.min_score = to_double("data.min_score", v); };
        t["data.sft_floor"] = [](AppConfig& c, const std::string& v) { c.data.sft_floor = to_double("data.sft_floor", v); };

        auto port = [&](const std::string& key, std::string PortSpecs::*member) {
            t[key] = [member](AppConfig& c, const std::string& v) { c.ports.*member = v; };
        };
        auto path = [&](const std::string& key, std::string Paths::*member) {
            t[key] = [member](AppConfig& c, const std::string& v) { c.paths.*member = v; };
        };
        port("ports.policy", &PortSpecs::policy);
        port("ports.teacher", &PortSpecs::teacher);
        port("ports.proposer", &PortSpecs::proposer);
        port("ports.environment", &PortSpecs::environment);
        t["ports.timeout_s"] = [](AppConfig& c, const std::string& v) { c.ports.timeout_s = to_int("ports.timeout_s", v); };
        path("paths.library", &Paths::library);
        path("paths.corpus", &Paths::corpus);
        path("paths.questions", &Paths::questions);
        path("paths.out", &Paths::out);
        return t;
    }();
    return table;
}

bool apply_prefixed(AppConfig& c, const std::string& key, const std::string& v) {
    auto suffix = [&](const std::string& prefix) -> std::optional<std::string> {
        if (key.size() > prefix.size() && key.starts_with(prefix)) return key.substr(prefix.size());
        return std::nullopt;
    };
    if (auto id = suffix("run.modify_cap_overrides.")) {
        c.run.modify_cap_overrides[*id] = to_int(key, v);
        return true;
    }
    if (auto id = suffix("run.inject_caps.")) {
        c.run.inject_caps[*id] = to_int(key, v);
        return true;
    }
    if (auto id = suffix("weights.fine.")) {
        if (!c.weights.fine.count(*id)) throw ConfigError("weights.fine: unknown sub-signal '" + *id + "'");
        c.weights.fine[*id] = to_double(key, v);
        return true;
    }
    return false;
}

void flatten(const YAML::Node& node, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
    switch (node.Type()) {
    case YAML::NodeType::Map:
        for (const auto& kv : node) {
            const std::string key = kv.first.as<std::string>();
            flatten(kv.second, prefix.empty() ? key : prefix + "." + key, out);
        }
        break;
    case YAML::NodeType::Sequence: {
        std::string joined;
        for (const auto& item : node) {
            if (!item.IsScalar()) throw ConfigError(prefix + ": lists may hold scalars only");
            joined += (joined.empty() ? "" : ",") + item.as<std::string>();
        }
        out.emplace_back(prefix, joined);
        break;
    }
    case YAML::NodeType::Scalar: out.emplace_back(prefix, node.as<std::string>()); break;
    case YAML::NodeType::Null: out.emplace_back(prefix, ""); break;
    case YAML::NodeType::Undefined: break;
    }
}

}  // namespace

std::vector<std::string> known_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, _] : setters()) keys.push_back(k);
    return keys;
}

AppConfig build_config(const std::vector<std::pair<std::string, std::string>>& settings) {
    AppConfig cfg;
    for (const auto& [key, value] : settings) {
        if (key != "run.mode") continue;
        auto m = parse_mode(value);
        if (!m) throw ConfigError("run.mode: expected web, math or code, got '" + value + "'");
        cfg.run = defaults_for(*m);
    }
    for (const auto& [key, value] : settings) {
        if (auto it = setters().find(key); it != setters().end()) {
            it->second(cfg, value);
        } else if (!apply_prefixed(cfg, key, value)) {
            throw ConfigError("unknown configuration key '" + key + "'");
        }
    }
    if (cfg.run.budgets.max_steps < 1) throw ConfigError("budgets.max_steps must be at least 1");
    if (!(cfg.gate.revise_threshold < cfg.gate.accept_threshold &&
          cfg.gate.accept_threshold <= cfg.gate.new_group_threshold))
        throw ConfigError("gate thresholds must satisfy revise < accept <= new_group");
    if (cfg.ports.timeout_s < 1) throw ConfigError("ports.timeout_s must be positive");
    return cfg;
}

std::vector<std::pair<std::string, std::string>> flatten_yaml(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("configuration is not valid YAML: ") + e.what());
    }
    std::vector<std::pair<std::string, std::string>> out;
    if (root.IsNull()) return out;
    if (!root.IsMap()) throw ConfigError("configuration root must be a map");
    flatten(root, "", out);
    return out;
}

std::vector<std::pair<std::string, std::string>> environment_settings() {
    std::vector<std::pair<std::string, std::string>> out;
    const std::pair<const char*, const char*> vars[] = {{"SKILLRT_POLICY", "ports.policy"},
                                                        {"SKILLRT_TEACHER", "ports.teacher"},
                                                        {"SKILLRT_PROPOSER", "ports.proposer"},
                                                        {"SKILLRT_OUT", "paths.out"}};
    for (const auto& [var, key] : vars)
        if (const char* v = std::getenv(var); v && *v) out.emplace_back(key, v);
    return out;
}

Json to_json(const AppConfig& c) {
    return {{"run",
             {{"skills_enabled", c.run.skills_enabled},
              {"enable_program_functions", c.run.enable_program_functions},
              {"enable_skill_handlers", c.run.enable_skill_handlers},
              {"enable_prompt_only_skills", c.run.enable_prompt_only_skills},
              {"pf_only_mode", c.run.pf_only_mode},
              {"enable_difficulty_gating", c.run.enable_difficulty_gating},
              {"teacher_selection", c.run.teacher_selection},
              {"difficulty_threshold", c.run.difficulty_threshold},
              {"pf_top_k", c.run.pf_top_k},
              {"max_skills_in_prompt", c.run.max_skills_in_prompt},
              {"max_phase_instructions", c.run.max_phase_instructions},
              {"pre_final_step_threshold", c.run.pre_final_step_threshold},
              {"mode", to_string(c.run.mode)},
              {"handler_vote_threshold", c.run.handler_vote_threshold},
              {"modify_cap", c.run.modify_cap},
              {"modify_cap_overrides", c.run.modify_cap_overrides},
              {"inject_caps", c.run.inject_caps}}},
            {"budgets",
             {{"max_steps", c.run.budgets.max_steps},
              {"max_search_calls", c.run.budgets.max_search_calls},
              {"max_read_calls", c.run.budgets.max_read_calls}}},
            {"weights",
             {{"coarse", c.weights.coarse},
              {"fine", c.weights.fine},
              {"beta_em", c.weights.beta_em},
              {"beta_pf", c.weights.beta_pf},
              {"blend", c.weights.blend},
              {"fine_mode", c.weights.fine_mode},
              {"normalize_fine", c.weights.normalize_fine}}},
            {"gate",
             {{"eta_exec", c.gate.eta_exec},
              {"accept_threshold", c.gate.accept_threshold},
              {"revise_threshold", c.gate.revise_threshold},
              {"new_group_threshold", c.gate.new_group_threshold},
              {"same_group_threshold", c.gate.same_group_threshold},
              {"max_candidates_per_epoch", c.gate.max_candidates_per_epoch},
              {"mode", to_string(c.gate_mode)},
              {"lite", c.lite},
              {"reward_lambda", c.reward_lambda}}},
            {"data",
             {{"test_boundary", c.data.test_boundary},
              {"shuffle_seed", c.data.shuffle_seed},
              {"min_score", c.data.min_score},
              {"sft_floor", c.data.sft_floor}}},
            {"ports",
             {{"policy", c.ports.policy},
              {"teacher", c.ports.teacher},
              {"proposer", c.ports.proposer},
              {"environment", c.ports.environment},
              {"timeout_s", c.ports.timeout_s}}},
            {"paths",
             {{"library", c.paths.library},
              {"corpus", c.paths.corpus},
              {"questions", c.paths.questions},
              {"out", c.paths.out}}}};
}

}  // namespace skillrt::app
