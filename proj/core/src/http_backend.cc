#include <cstdlib>
#include <regex>

#include "httplib.h"
#include "strategist/llm.h"

namespace strategist::llm {

HttpBackendConfig HttpBackendConfig::from_env() {
  HttpBackendConfig c;
  auto get = [](const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
  };
  c.endpoint = get("STRATEGIST_LLM_ENDPOINT");
  c.api_key = get("STRATEGIST_LLM_API_KEY");
  c.model = get("STRATEGIST_LLM_MODEL");
  return c;
}

namespace {

class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(config_.endpoint, m, url)) {
      throw LlmError("LLM endpoint must be an http(s) URL, got '" + config_.endpoint + "'");
    }
    base_ = m[1].str();
    path_ = m[2].matched ? m[2].str() : "/v1/chat/completions";
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (base_.rfind("https://", 0) == 0) throw LlmError("built without TLS support; cannot reach " + base_);
#endif
  }

  Completion send(const ChatRequest& request) override {
    httplib::Client client(base_);
    client.set_connection_timeout(config_.timeout_s);
    client.set_read_timeout(config_.timeout_s);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
    json body{{"model", request.model.empty() ? config_.model : request.model},
              {"temperature", request.temperature},
              {"max_tokens", request.max_tokens},
              {"messages", request.to_json()["messages"]}};
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw TransportError("LLM request failed: " + httplib::to_string(res.error()), true);
    if (res->status == 429 || res->status >= 500) {
      throw TransportError("LLM endpoint returned HTTP " + std::to_string(res->status), true, res->status);
    }
    if (res->status != 200) {
      throw TransportError("LLM endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body, false,
                           res->status);
    }
    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw TransportError("LLM endpoint returned malformed JSON", false, res->status);
    Completion c;
    try {
      c.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      throw TransportError("LLM reply has no choices[0].message.content", false, res->status);
    }
    if (j.contains("usage")) {
      c.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
      c.completion_tokens = j["usage"].value("completion_tokens", 0L);
    } else {
      c.prompt_tokens = estimate_tokens(request);
      c.completion_tokens = static_cast<long>(c.text.size()) / 4 + 1;
    }
    return c;
  }

  std::string name() const override { return "http"; }

 private:
  HttpBackendConfig config_;
  std::string base_;
  std::string path_;
};

}  // namespace

std::shared_ptr<Backend> make_http_backend(const HttpBackendConfig& config) {
  if (config.endpoint.empty()) throw LlmError("no LLM endpoint configured (set STRATEGIST_LLM_ENDPOINT)");
  return std::make_shared<HttpBackend>(config);
}

}  // namespace strategist::llm
