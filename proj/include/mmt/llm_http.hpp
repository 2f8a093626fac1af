#ifndef MMT_LLM_HTTP_HPP
#define MMT_LLM_HTTP_HPP

// Live LLM transport. Kept out of llm.hpp so translation units that only
// need the fixture client do not pull in sockets.

#include <cstdlib>
#include <string>

#include <httplib.h>

// glibc's <resolv.h> (pulled in by httplib) defines _res as a macro, which
// mangles Eigen headers that use _res as a parameter name. Nothing here
// needs the BIND compatibility alias.
#ifdef _res
#undef _res
#endif

#include <json.hpp>

#include "mmt/errors.hpp"
#include "mmt/llm.hpp"

namespace mmt {

struct HttpLlmConfig {
    std::string base_url = "http://localhost:8080";  // chat-completions style API root
    std::string model = "annotator";
    std::string api_key_env = "MMT_LLM_API_KEY";  // credentials only via environment
    double temperature = 0.0;
    int timeout_seconds = 60;
};

/// Minimal chat-completions client (POST {base_url}/v1/chat/completions).
class HttpLlmClient final : public LlmClient {
public:
    explicit HttpLlmClient(HttpLlmConfig cfg) : cfg_(std::move(cfg)) {}

    std::string name() const override { return "http:" + cfg_.model; }

    std::string complete(const std::string& prompt) override {
        httplib::Client client(cfg_.base_url);
        client.set_connection_timeout(cfg_.timeout_seconds);
        client.set_read_timeout(cfg_.timeout_seconds);
        httplib::Headers headers;
        if (const char* key = std::getenv(cfg_.api_key_env.c_str()))
            headers.emplace("Authorization", std::string("Bearer ") + key);
        nlohmann::json body;
        body["model"] = cfg_.model;
        body["temperature"] = cfg_.temperature;
        body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
        auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
        if (!res)
            throw BackendError("llm http: no response from " + cfg_.base_url + " (" +
                               httplib::to_string(res.error()) + ")");
        if (res->status != 200)
            throw BackendError("llm http: status " + std::to_string(res->status) + ": " + res->body);
        nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded()) throw BackendError("llm http: response is not JSON");
        try {
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const std::exception& e) {
            throw BackendError(std::string("llm http: unexpected response shape: ") + e.what());
        }
    }

private:
    HttpLlmConfig cfg_;
};

}  // namespace mmt

#endif
