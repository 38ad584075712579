#include "skillrt/skill_store/skill_doc.hpp"

#include "skillrt/errors.hpp"
#include "skillrt/failure_miner/text_metrics.hpp"
#include "skillrt/rule_engine/parser.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <regex>

namespace skillrt {
namespace {

constexpr int kMaxMapDepth = 2;

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        out.push_back(text.substr(pos, eol - pos));
        pos = eol + 1;
    }
    return out;
}

std::string_view chomp(std::string_view line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    return line;
}

Json scalar_to_json(const YAML::Node& node) {
    const std::string& s = node.Scalar();
    if (node.Tag() == "!") return s;
    if (s == "true" || s == "True") return true;
    if (s == "false" || s == "False") return false;
    if (s.empty() || s == "null" || s == "~") return nullptr;
    static const std::regex kInt(R"([-+]?\d+)");
    static const std::regex kReal(R"([-+]?(\d+\.\d*|\.\d+|\d+)([eE][-+]?\d+)?)");
    if (std::regex_match(s, kInt)) return std::stoll(s);
    if (std::regex_match(s, kReal)) return std::stod(s);
    return s;
}

Json yaml_to_json(const YAML::Node& node, int map_depth, const std::string& path) {
    switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined: return nullptr;
    case YAML::NodeType::Scalar: return scalar_to_json(node);
    case YAML::NodeType::Sequence: {
        Json arr = Json::array();
        for (const auto& item : node) {
            if (!item.IsScalar() && !item.IsNull())
                throw MalformedFrontmatter("list under '" + path + "' may only hold scalars");
            arr.push_back(scalar_to_json(item));
        }
        return arr;
    }
    case YAML::NodeType::Map: {
        if (map_depth > kMaxMapDepth) throw MalformedFrontmatter("frontmatter nesting too deep at '" + path + "'");
        Json obj = Json::object();
        for (const auto& kv : node) {
            const std::string key = kv.first.as<std::string>();
            obj[key] = yaml_to_json(kv.second, map_depth + 1, path.empty() ? key : path + "." + key);
        }
        return obj;
    }
    }
    return nullptr;
}

std::string json_to_text(const Json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_null()) return {};
    return j.dump();
}

std::set<std::string> string_set(const Json& j, const std::string& key) {
    std::set<std::string> out;
    if (j.is_array()) {
        for (const auto& item : j) out.insert(json_to_text(item));
    } else if (j.is_string()) {
        out.insert(j.get<std::string>());
    } else if (!j.is_null()) {
        throw MalformedFrontmatter("'" + key + "' must be a list");
    }
    return out;
}

const Json& require(const Json& fm, const std::string& key) {
    auto it = fm.find(key);
    if (it == fm.end() || it->is_null()) throw MissingKey(key);
    return *it;
}

const std::string* section_text(const SkillDoc& doc, std::string_view heading) {
    for (const auto& [h, body] : doc.body_sections)
        if (text::to_lower(h) == text::to_lower(heading)) return &body;
    return nullptr;
}

}  // namespace

SkillDoc split_skill_doc(std::string_view text) {
    SkillDoc doc;
    doc.raw_text = std::string(text);
    const auto lines = lines_of(text);
    if (lines.empty() || chomp(lines[0]) != "---") throw MissingFrontmatter();
    std::size_t offset = lines[0].size() + 1;
    const std::size_t fm_start = offset;
    std::optional<std::size_t> fm_end, body_start;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (chomp(lines[i]) == "---") {
            fm_end = offset;
            body_start = std::min(text.size(), offset + lines[i].size() + 1);
            break;
        }
        offset += lines[i].size() + 1;
    }
    if (!fm_end) throw MalformedFrontmatter("metadata block is not closed by '---'");
    doc.frontmatter_text = std::string(text.substr(fm_start, *fm_end - fm_start));
    doc.body = std::string(text.substr(*body_start));

    YAML::Node root;
    try {
        root = YAML::Load(doc.frontmatter_text);
    } catch (const YAML::Exception& e) {
        throw MalformedFrontmatter(std::string("metadata block does not parse: ") + e.what());
    }
    if (root.IsNull()) {
        doc.frontmatter = Json::object();
    } else if (!root.IsMap()) {
        throw MalformedFrontmatter("metadata block must be a key/value map");
    } else {
        doc.frontmatter = yaml_to_json(root, 0, "");
    }

    std::string heading;
    std::string current;
    bool in_fence = false;
    bool any = false;
    auto flush = [&] {
        if (any || !trim(current).empty()) doc.body_sections.emplace_back(heading, trim(current));
        current.clear();
    };
    for (auto line : lines_of(doc.body)) {
        const auto clean = chomp(line);
        if (clean.starts_with("```")) in_fence = !in_fence;
        if (!in_fence && clean.starts_with("#") && !clean.starts_with("```")) {
            std::size_t k = 0;
            while (k < clean.size() && clean[k] == '#') ++k;
            if (k < clean.size() && clean[k] == ' ') {
                flush();
                any = true;
                heading = trim(clean.substr(k));
                continue;
            }
        }
        current.append(line);
        current.push_back('\n');
    }
    flush();
    return doc;
}

std::optional<std::pair<std::string, int>> split_version_suffix(std::string_view skill_id) {
    const auto pos = skill_id.rfind("__v");
    if (pos == std::string_view::npos || pos == 0) return std::nullopt;
    const auto digits = skill_id.substr(pos + 3);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        return std::nullopt;
    int version = 0;
    std::from_chars(digits.data(), digits.data() + digits.size(), version);
    return std::make_pair(std::string(skill_id.substr(0, pos)), version);
}

SkillProgram parse_skill_doc(std::string_view text) {
    if (text.empty()) throw MissingFrontmatter();
    const SkillDoc doc = split_skill_doc(text);
    const Json& fm = doc.frontmatter;

    SkillProgram p;
    p.doc_text = doc.raw_text;
    p.skill_id = json_to_text(require(fm, "skill_id"));
    p.name = json_to_text(require(fm, "name"));
    p.error_category = json_to_text(require(fm, "error_category"));
    p.applicable_phases = string_set(require(fm, "applicable_phases"), "applicable_phases");

    if (auto split = split_version_suffix(p.skill_id)) {
        p.base_id = split->first;
        p.version = split->second;
    } else {
        p.base_id = p.skill_id;
        const Json& v = require(fm, "version");
        if (!v.is_number_integer()) throw MalformedFrontmatter("'version' must be an integer");
        p.version = v.get<int>();
    }
    if (p.version < 1) throw MalformedFrontmatter("'version' must be at least 1");

    if (auto it = fm.find("priority"); it != fm.end() && !it->is_null()) {
        if (!it->is_number()) throw MalformedFrontmatter("'priority' must be a number");
        p.priority = it->get<double>();
    }
    if (p.priority < 0.0 || p.priority > 1.0) throw MalformedFrontmatter("'priority' must lie in [0,1]");

    if (auto it = fm.find("applicable_modes"); it != fm.end() && !it->is_null())
        p.applicable_modes = string_set(*it, "applicable_modes");
    if (p.applicable_modes.empty()) p.applicable_modes = {"all"};

    static const std::set<std::string> kAllowedPhases = {"think", "search", "read", "answer"};
    for (const auto& phase : p.applicable_phases)
        if (!kAllowedPhases.count(phase)) throw MalformedFrontmatter("unknown applicable phase '" + phase + "'");

    if (auto it = fm.find("system_summary"); it != fm.end()) p.system_summary = trim(json_to_text(*it));

    if (auto it = fm.find("phases"); it != fm.end() && !it->is_null()) {
        if (!it->is_object()) throw MalformedFrontmatter("'phases' must be a map");
        for (const auto& [phase, spec] : it->items()) {
            if (!kPhaseNames.count(phase)) throw MalformedFrontmatter("unknown phase '" + phase + "'");
            if (!spec.is_object()) throw MalformedFrontmatter("phase '" + phase + "' must be a map");
            PhaseInstruction pi;
            if (auto c = spec.find("conditions"); c != spec.end())
                for (const auto& cond : string_set(*c, "conditions")) pi.conditions.push_back(cond);
            if (auto b = spec.find("priority_boost"); b != spec.end() && b->is_number())
                pi.priority_boost = b->get<double>();
            if (auto a = spec.find("action"); a != spec.end()) pi.action = json_to_text(*a);
            if (auto t = spec.find("text"); t != spec.end() && !t->is_null()) {
                pi.text = trim(json_to_text(*t));
            } else if (const std::string* body = section_text(doc, "Phase: " + phase)) {
                pi.text = *body;
            }
            for (const auto& cond : pi.conditions)
                if (!kConditionVocabulary.count(cond))
                    p.load_diagnostics.push_back("unknown condition '" + cond + "' in phase " + phase);
            p.phase_instructions.emplace(phase, std::move(pi));
        }
    }

    if (const std::string* triggers = section_text(doc, "Detection Triggers")) {
        std::set<std::string> seen;
        for (const auto& tok : text::tokenize(*triggers)) {
            if (text::stopwords().count(tok) || !seen.insert(tok).second) continue;
            p.trigger_keywords.push_back(tok);
        }
    }

    if (auto source = rules::extract_rule_block(doc.body)) {
        p.rule = std::make_shared<const rules::RuleAst>(rules::parse_rule(*source));
        p.prompt_equivalent = rules::is_prompt_equivalent(*p.rule);
        if (p.rule->handler && !p.applicable_phases.count("answer"))
            throw MalformedFrontmatter("only skills applicable to the answer phase may carry a handler");
    }
    bool flag = false;
    if (auto it = fm.find("needs_teacher"); it != fm.end() && it->is_boolean()) flag = it->get<bool>();
    p.needs_teacher = flag || (p.rule && rules::uses_teacher(*p.rule));
    return p;
}

std::string restamp_version(std::string_view text, const std::string& base_id, int version) {
    const auto lines = lines_of(text);
    std::string out;
    bool in_fm = false;
    bool done_fm = false;
    bool wrote_version = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line(lines[i]);
        const auto clean = chomp(lines[i]);
        if (i == 0 && clean == "---") {
            in_fm = true;
        } else if (in_fm && !done_fm && clean == "---") {
            if (!wrote_version) out += "version: " + std::to_string(version) + "\n";
            done_fm = true;
            in_fm = false;
        } else if (in_fm) {
            if (clean.starts_with("skill_id:")) {
                line = "skill_id: " + base_id;
            } else if (clean.starts_with("version:")) {
                line = "version: " + std::to_string(version);
                wrote_version = true;
            }
        }
        out += line;
        if (i + 1 < lines.size() || text.ends_with('\n')) out.push_back('\n');
    }
    return out;
}

}  // namespace skillrt
