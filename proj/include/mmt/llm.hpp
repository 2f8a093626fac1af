#ifndef MMT_LLM_HPP
#define MMT_LLM_HPP

#include <chrono>
#include <deque>
#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mmt/annotate.hpp"
#include "mmt/errors.hpp"
#include "mmt/topic_model.hpp"

namespace mmt {

class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string name() const = 0;
    /// Returns the raw completion text. Throws BackendError on transport
    /// failure.
    virtual std::string complete(const std::string& prompt) = 0;
};

/// Offline fixture: plays back recorded responses in call order. An entry
/// {"error": "..."} raises a transport failure instead, so retry paths are
/// testable. File format: {"responses": ["text", {"text": ...}, {"error": ...}]}.
class RecordedLlmClient final : public LlmClient {
public:
    struct Entry {
        std::string text;
        bool fail = false;
    };

    explicit RecordedLlmClient(std::vector<Entry> entries) : entries_(entries.begin(), entries.end()) {}

    static RecordedLlmClient from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("recorded llm fixture: cannot open " + path);
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.contains("responses") || !j["responses"].is_array())
            throw DataError("recorded llm fixture: expected {\"responses\": [...]} in " + path);
        std::vector<Entry> entries;
        for (const auto& e : j["responses"]) {
            if (e.is_string()) entries.push_back({e.get<std::string>(), false});
            else if (e.is_object() && e.contains("error"))
                entries.push_back({e["error"].get<std::string>(), true});
            else if (e.is_object() && e.contains("text"))
                entries.push_back({e["text"].get<std::string>(), false});
            else throw DataError("recorded llm fixture: bad entry in " + path);
        }
        return RecordedLlmClient(std::move(entries));
    }

    std::string name() const override { return "recorded"; }

    std::string complete(const std::string&) override {
        ++calls_;
        if (entries_.empty()) throw BackendError("recorded llm fixture exhausted");
        Entry e = entries_.front();
        entries_.pop_front();
        if (e.fail) throw BackendError("recorded llm transport failure: " + e.text);
        return e.text;
    }

    std::size_t calls() const { return calls_; }

private:
    std::deque<Entry> entries_;
    std::size_t calls_ = 0;
};

/// Deterministic offline annotator: answers every prompt with valid JSON
/// whose name is derived from the prompt fingerprint. Lets the pipeline
/// run end-to-end (and reproducibly) without any model.
class EchoLlmClient final : public LlmClient {
public:
    std::string name() const override { return "echo"; }
    std::string complete(const std::string& prompt) override {
        nlohmann::json j;
        j["name"] = "topic " + content_fingerprint(prompt).substr(0, 8);
        j["topic_type"] = "content";
        j["image_type"] = "photo";
        j["definition"] = "deterministic echo annotation";
        return j.dump();
    }
};

struct LlmPromptConfig {
    std::string template_text;  // {{modality}} {{topic_id}} {{keywords}} {{documents}} ...
    int validation_retries = 1;
    int transport_retries = 2;
    int backoff_ms = 0;  // test fixtures keep this at 0
};

inline std::string load_prompt_template(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("prompt template: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct LlmFailure {
    int topic_id = 0;
    std::string error;
};

struct LlmAnnotateResult {
    std::vector<TopicAnnotation> annotations;
    std::vector<LlmFailure> failures;
    std::size_t flagged = 0;  // off-enum responses coerced to content_unclear
};

namespace detail {

inline void replace_all(std::string& s, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

/// Peels markdown code fences off a model response, then expects one JSON
/// object: {"name": str, "topic_type": str, "image_type": str|null,
/// "definition": str}.
inline nlohmann::json parse_llm_json(const std::string& raw) {
    std::string s = raw;
    std::size_t start = s.find('{');
    std::size_t end = s.rfind('}');
    if (start == std::string::npos || end == std::string::npos || end < start)
        throw DataError("llm response: no JSON object found");
    nlohmann::json j = nlohmann::json::parse(s.substr(start, end - start + 1), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw DataError("llm response: invalid JSON");
    return j;
}

inline TopicAnnotation annotation_from_response(const nlohmann::json& j, int topic_id,
                                                Modality modality) {
    TopicAnnotation a;
    a.topic_id = topic_id;
    a.modality = modality;
    a.source = AnnotationSource::llm;
    if (!j.contains("topic_type") || !j["topic_type"].is_string())
        throw DataError("llm response: missing topic_type");
    auto tt = parse_topic_type(j["topic_type"].get<std::string>());
    if (!tt) throw DataError("llm response: off-enum topic_type '" +
                             j["topic_type"].get<std::string>() + "'");
    a.topic_type = *tt;
    if (j.contains("name") && j["name"].is_string()) a.name = j["name"].get<std::string>();
    if (a.topic_type != TopicType::content) a.name.clear();
    else if (a.name.empty()) throw DataError("llm response: content topic without a name");
    if (modality != Modality::text) {
        if (!j.contains("image_type") || !j["image_type"].is_string())
            throw DataError("llm response: missing image_type");
        auto it = parse_image_type(j["image_type"].get<std::string>());
        if (!it) throw DataError("llm response: off-enum image_type '" +
                                 j["image_type"].get<std::string>() + "'");
        a.image_type = *it;
    }
    a.validate();
    return a;
}

}  // namespace detail

inline std::string render_annotation_prompt(const LlmPromptConfig& cfg, const TopicModelResult& r,
                                            const Corpus& corpus, const TopicInfo& topic) {
    std::map<std::string, const Message*> by_id;
    for (const Message& m : corpus.messages) by_id[m.message_id] = &m;
    std::vector<std::string> kw;
    for (const auto& [term, w] : topic.keywords) kw.push_back(term);
    std::vector<std::string> docs;
    for (const std::string& id : topic.representative_doc_ids) {
        auto it = by_id.find(id);
        if (it != by_id.end()) docs.push_back(it->second->clean_text);
    }
    std::string topic_types = "content, content_unclear, advertising, caption";
    std::string image_types =
        "photo, screenshot_news, screenshot_social_media, meme, infographic, map, other";
    std::string prompt = cfg.template_text;
    detail::replace_all(prompt, "{{modality}}", to_string(r.modality));
    detail::replace_all(prompt, "{{topic_id}}", std::to_string(topic.topic_id));
    detail::replace_all(prompt, "{{keywords}}", join(kw, ", "));
    detail::replace_all(prompt, "{{documents}}", join(docs, "\n"));
    detail::replace_all(prompt, "{{topic_types}}", topic_types);
    detail::replace_all(prompt, "{{image_types}}", image_types);
    return prompt;
}

/// One annotation per topic, source=llm. Off-enum responses are retried
/// once and then coerced to content_unclear with a validation flag;
/// transport failures are retried with backoff and then recorded per
/// topic, the run continues.
inline LlmAnnotateResult llm_annotate(const TopicModelResult& r, const Corpus& corpus,
                                      LlmClient& client, const LlmPromptConfig& cfg) {
    LlmAnnotateResult out;
    for (const TopicInfo& topic : r.topics) {
        std::string prompt = render_annotation_prompt(cfg, r, corpus, topic);
        bool transport_failed = false;
        std::string last_error;
        std::optional<TopicAnnotation> annotation;
        for (int attempt = 0; attempt <= cfg.validation_retries && !annotation && !transport_failed;
             ++attempt) {
            std::string response;
            bool got_response = false;
            for (int t = 0; t <= cfg.transport_retries; ++t) {
                try {
                    response = client.complete(prompt);
                    got_response = true;
                    break;
                } catch (const BackendError& e) {
                    last_error = e.what();
                    if (cfg.backoff_ms > 0)
                        std::this_thread::sleep_for(std::chrono::milliseconds(cfg.backoff_ms << t));
                }
            }
            if (!got_response) {
                transport_failed = true;
                break;
            }
            try {
                annotation =
                    detail::annotation_from_response(detail::parse_llm_json(response), topic.topic_id,
                                                     r.modality);
            } catch (const DataError& e) {
                last_error = e.what();
            }
        }
        if (transport_failed) {
            out.failures.push_back({topic.topic_id, last_error});
            continue;
        }
        if (!annotation) {
            TopicAnnotation a;
            a.topic_id = topic.topic_id;
            a.modality = r.modality;
            a.source = AnnotationSource::llm;
            a.topic_type = TopicType::content_unclear;
            if (r.modality != Modality::text) a.image_type = ImageType::other;
            a.validation_flag = true;
            ++out.flagged;
            annotation = a;
        }
        out.annotations.push_back(*annotation);
    }
    return out;
}

}  // namespace mmt

#endif
