#ifndef MMT_CONFIG_HPP
#define MMT_CONFIG_HPP

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmt/errors.hpp"
#include "mmt/hashutil.hpp"
#include "mmt/topic_model.hpp"

namespace mmt {

// ---------------------------------------------------------------------------
// Strict TOML subset -> JSON. Covers what run configs actually use: [table]
// and [a.b] headers, key = scalar, key = [scalars], # comments. Anything
// fancier (inline tables, multiline strings, dates) is rejected loudly.

namespace detail {

inline std::string toml_strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline nlohmann::json toml_scalar(const std::string& raw, int lineno) {
    std::string v = toml_strip(raw);
    if (v.empty()) throw UsageError("toml: empty value at line " + std::to_string(lineno));
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            throw UsageError("toml: unterminated string at line " + std::to_string(lineno));
        std::string out;
        for (std::size_t i = 1; i + 1 < v.size(); ++i) {
            char c = v[i];
            if (c == '\\' && i + 2 < v.size()) {
                char n = v[++i];
                switch (n) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default:
                        throw UsageError("toml: unsupported escape at line " + std::to_string(lineno));
                }
            } else {
                out += c;
            }
        }
        return out;
    }
    if (v == "true") return true;
    if (v == "false") return false;
    bool is_float = v.find_first_of(".eE") != std::string::npos;
    try {
        std::size_t used = 0;
        if (is_float) {
            double d = std::stod(v, &used);
            if (used == v.size()) return d;
        } else {
            long long i = std::stoll(v, &used);
            if (used == v.size()) return i;
        }
    } catch (const std::exception&) {
    }
    throw UsageError("toml: cannot parse value '" + v + "' at line " + std::to_string(lineno) +
                     " (supported: strings, ints, floats, booleans, arrays of those)");
}

}  // namespace detail

inline nlohmann::json parse_toml_subset(const std::string& content) {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    std::istringstream in(content);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = detail::toml_strip(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3)
                throw UsageError("toml: bad table header at line " + std::to_string(lineno));
            std::string path = s.substr(1, s.size() - 2);
            table = &root;
            std::size_t pos = 0;
            while (pos != std::string::npos) {
                std::size_t dot = path.find('.', pos);
                std::string part = detail::toml_strip(
                    dot == std::string::npos ? path.substr(pos) : path.substr(pos, dot - pos));
                if (part.empty())
                    throw UsageError("toml: empty table name at line " + std::to_string(lineno));
                table = &(*table)[part];
                if (table->is_null()) *table = nlohmann::json::object();
                pos = dot == std::string::npos ? std::string::npos : dot + 1;
            }
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw UsageError("toml: expected key = value at line " + std::to_string(lineno));
        std::string key = detail::toml_strip(s.substr(0, eq));
        std::string value = detail::toml_strip(s.substr(eq + 1));
        // strip trailing comment outside strings/arrays
        if (!value.empty() && value[0] != '"' && value[0] != '[') {
            std::size_t hash = value.find('#');
            if (hash != std::string::npos) value = detail::toml_strip(value.substr(0, hash));
        }
        if (key.empty()) throw UsageError("toml: empty key at line " + std::to_string(lineno));
        if (!value.empty() && value[0] == '[') {
            if (value.back() != ']')
                throw UsageError("toml: arrays must close on the same line (line " +
                                 std::to_string(lineno) + ")");
            nlohmann::json arr = nlohmann::json::array();
            std::string inner = value.substr(1, value.size() - 2);
            std::string item;
            bool in_str = false;
            for (char c : inner) {
                if (c == '"') in_str = !in_str;
                if (c == ',' && !in_str) {
                    if (!detail::toml_strip(item).empty()) arr.push_back(detail::toml_scalar(item, lineno));
                    item.clear();
                } else {
                    item += c;
                }
            }
            if (!detail::toml_strip(item).empty()) arr.push_back(detail::toml_scalar(item, lineno));
            (*table)[key] = std::move(arr);
        } else {
            (*table)[key] = detail::toml_scalar(value, lineno);
        }
    }
    return root;
}

/// Loads a config file as JSON; .toml goes through the subset parser.
inline nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string ext = std::filesystem::path(path).extension().string();
    if (ext == ".toml") return parse_toml_subset(ss.str());
    nlohmann::json j = nlohmann::json::parse(ss.str(), nullptr, false);
    if (j.is_discarded())
        throw UsageError("config: " + path + " is not valid JSON (use .toml for TOML)");
    return j;
}

// ---------------------------------------------------------------------------

struct RunConfig {
    std::string corpus_path;
    std::string period_label = "period";
    std::vector<Modality> modalities = {Modality::text, Modality::image, Modality::multimodal};
    std::string out_dir;
    TopicModelConfig topic_model;

    // Embedding backends. Fixture backends are the in-repo defaults; real
    // encoders plug in behind the same names-as-config contract.
    std::size_t embed_dim = 64;
    std::string text_backend = "fixture-tokenmix";   // or fixture-content
    std::string image_backend = "fixture-color";
    double image_color_signal = 0.95;
    std::string captioner = "pixelstat";  // or filename-stem

    // LLM annotation backend: none | echo | recorded | http.
    std::string llm_backend = "none";
    std::string llm_fixture;
    std::string prompt_template_path;
    std::string llm_base_url = "http://localhost:8080";
    std::string llm_model = "annotator";
    std::string llm_api_key_env = "MMT_LLM_API_KEY";

    std::string group_map_path;
    double max_malformed_fraction = 0.5;
};

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    c.corpus_path = j.value("corpus", "");
    c.period_label = j.value("period_label", c.period_label);
    if (j.contains("modalities")) {
        c.modalities.clear();
        for (const auto& m : j["modalities"]) {
            auto parsed = parse_modality(m.get<std::string>());
            if (!parsed) throw UsageError("config: bad modality '" + m.get<std::string>() + "'");
            c.modalities.push_back(*parsed);
        }
    }
    c.out_dir = j.value("out_dir", "");
    if (j.contains("topic_model")) c.topic_model = topic_config_from_json(j["topic_model"]);
    if (j.contains("embedder")) {
        const auto& e = j["embedder"];
        c.embed_dim = e.value("dimension", c.embed_dim);
        c.text_backend = e.value("text_backend", c.text_backend);
        c.image_backend = e.value("image_backend", c.image_backend);
        c.image_color_signal = e.value("image_color_signal", c.image_color_signal);
    }
    c.captioner = j.value("captioner", c.captioner);
    if (j.contains("llm")) {
        const auto& l = j["llm"];
        c.llm_backend = l.value("backend", c.llm_backend);
        c.llm_fixture = l.value("fixture", c.llm_fixture);
        c.prompt_template_path = l.value("prompt_template", c.prompt_template_path);
        c.llm_base_url = l.value("base_url", c.llm_base_url);
        c.llm_model = l.value("model", c.llm_model);
        c.llm_api_key_env = l.value("api_key_env", c.llm_api_key_env);
    }
    c.group_map_path = j.value("group_map", c.group_map_path);
    c.max_malformed_fraction = j.value("max_malformed_fraction", c.max_malformed_fraction);
    return c;
}

/// Canonical form used for hashing: everything semantically relevant, not
/// the output location or the corpus file location (the corpus content is
/// covered by the manifest's inputs hash).
inline nlohmann::json config_canonical_json(const RunConfig& c) {
    nlohmann::json j;
    j["period_label"] = c.period_label;
    nlohmann::json mods = nlohmann::json::array();
    for (Modality m : c.modalities) mods.push_back(to_string(m));
    j["modalities"] = mods;
    j["topic_model"] = to_json(c.topic_model);
    j["embedder"] = {{"dimension", c.embed_dim},
                     {"text_backend", c.text_backend},
                     {"image_backend", c.image_backend},
                     {"image_color_signal", c.image_color_signal}};
    j["captioner"] = c.captioner;
    j["llm"] = {{"backend", c.llm_backend},
                {"fixture", c.llm_fixture},
                {"prompt_template", c.prompt_template_path},
                {"model", c.llm_model}};
    j["group_map"] = c.group_map_path;
    j["max_malformed_fraction"] = c.max_malformed_fraction;
    return j;
}

inline std::string config_hash(const RunConfig& c) {
    return content_fingerprint(config_canonical_json(c).dump());
}

}  // namespace mmt

#endif
