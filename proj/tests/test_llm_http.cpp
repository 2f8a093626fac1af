#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "mmt/llm_http.hpp"

using namespace mmt;
using nlohmann::json;

namespace {

/// Chat-completions stub bound to an ephemeral localhost port.
struct StubServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> requests{0};
    std::string last_auth;
    std::string last_prompt;
    int fail_first = 0;  // respond 500 to this many requests

    StubServer() {
        server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            ++requests;
            auto it = req.headers.find("Authorization");
            last_auth = it != req.headers.end() ? it->second : "";
            json body = json::parse(req.body, nullptr, false);
            if (!body.is_discarded()) last_prompt = body["messages"][0]["content"];
            if (fail_first > 0) {
                --fail_first;
                res.status = 500;
                res.set_content("overloaded", "text/plain");
                return;
            }
            json reply;
            reply["choices"] = json::array(
                {{{"message", {{"role", "assistant"}, {"content", "echo: " + last_prompt}}}}});
            res.set_content(reply.dump(), "application/json");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~StubServer() {
        server.stop();
        thread.join();
    }
};

}  // namespace

TEST_CASE("http llm client round-trips a completion") {
    StubServer stub;
    HttpLlmConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(stub.port);
    cfg.model = "test-model";
    cfg.api_key_env = "MMT_TEST_LLM_KEY";
    ::setenv("MMT_TEST_LLM_KEY", "sekrit", 1);
    HttpLlmClient client(cfg);
    std::string out = client.complete("annotate topic 3");
    CHECK(out == "echo: annotate topic 3");
    CHECK(stub.last_auth == "Bearer sekrit");
    ::unsetenv("MMT_TEST_LLM_KEY");
}

TEST_CASE("http llm client surfaces transport failures as backend errors") {
    StubServer stub;
    stub.fail_first = 1;
    HttpLlmConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(stub.port);
    HttpLlmClient client(cfg);
    CHECK_THROWS_AS(client.complete("x"), BackendError);
    CHECK(client.complete("y") == "echo: y");  // server recovered
}

TEST_CASE("http llm client rejects an unreachable endpoint") {
    HttpLlmConfig cfg;
    cfg.base_url = "http://127.0.0.1:9";  // discard port, nothing listens
    cfg.timeout_seconds = 1;
    HttpLlmClient client(cfg);
    CHECK_THROWS_AS(client.complete("x"), BackendError);
}
