#pragma once

// Language-model access: chat requests, prompt templates, a retrying gateway
// with budgets and an audit log, an HTTP chat-completion backend and a
// playbook-driven mock.

#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "strategist/game.h"

namespace strategist::llm {

class LlmError : public StrategistError {
 public:
  using StrategistError::StrategistError;
};

class BudgetExceededError : public LlmError {
 public:
  using LlmError::LlmError;
};

class PlaybookExhaustedError : public LlmError {
 public:
  using LlmError::LlmError;
};

class TemplateError : public LlmError {
 public:
  using LlmError::LlmError;
};

// Transport or HTTP failure. Retryable failures are retried by the gateway.
class TransportError : public LlmError {
 public:
  TransportError(const std::string& what, bool retryable, int status = 0)
      : LlmError(what), retryable_(retryable), status_(status) {}
  bool retryable() const { return retryable_; }
  int status() const { return status_; }

 private:
  bool retryable_;
  int status_;
};

struct Message {
  std::string role;  // "system", "user" or "assistant"
  std::string content;
};

struct ChatRequest {
  // Template the request was rendered from; keys mock playbooks and the audit log.
  std::string template_id;
  std::vector<Message> messages;
  std::string model;
  double temperature = 0.7;
  int max_tokens = 2048;

  json to_json() const;
};

struct Completion {
  std::string text;
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual Completion send(const ChatRequest& request) = 0;
  virtual std::string name() const = 0;
};

struct PlaybookEntry {
  std::string template_id;
  // -1 answers every request of the template that has no entry of its own.
  int ordinal = 0;
  std::string reply;
  // When set, the entry only answers requests whose text contains `match`,
  // and its ordinal counts those requests alone. Matching entries are tried
  // in playbook order before the plain ones.
  std::string match;
};

// Replies keyed by (template id, how many times that template was requested
// before). Lookups are serialized so ordinals stay deterministic.
class MockBackend final : public Backend {
 public:
  explicit MockBackend(std::vector<PlaybookEntry> playbook);
  static std::shared_ptr<MockBackend> from_json(const json& j);
  static std::shared_ptr<MockBackend> from_file(const std::string& path);

  Completion send(const ChatRequest& request) override;
  std::string name() const override { return "mock"; }
  int calls(const std::string& template_id) const;

 private:
  std::map<std::pair<std::string, int>, std::string> replies_;
  std::vector<PlaybookEntry> matched_;
  std::map<std::string, int> counts_;
  mutable std::mutex mu_;
};

struct HttpBackendConfig {
  // Full URL of a chat-completion endpoint, e.g. https://host/v1/chat/completions.
  std::string endpoint;
  std::string api_key;
  std::string model;
  int timeout_s = 120;

  // STRATEGIST_LLM_ENDPOINT, STRATEGIST_LLM_API_KEY, STRATEGIST_LLM_MODEL.
  static HttpBackendConfig from_env();
};

std::shared_ptr<Backend> make_http_backend(const HttpBackendConfig& config);

struct GatewayConfig {
  int max_retries = 3;
  int backoff_ms = 250;
  // Negative means unlimited.
  long max_requests = -1;
  long max_tokens = -1;
  int max_in_flight = 4;
  std::string audit_log;
  std::string default_model;
};

// The single entry point to a model. Thread-safe.
class Gateway {
 public:
  Gateway(std::shared_ptr<Backend> backend, GatewayConfig config = {});

  // Throws BudgetExceededError before sending when the request would exceed
  // the request or token budget.
  std::string complete(const ChatRequest& request);

  long requests_made() const;
  long tokens_used() const;
  const GatewayConfig& config() const { return config_; }
  Backend& backend() { return *backend_; }

 private:
  void audit(const ChatRequest& request, const Completion* reply, int attempts, const std::string& error);

  std::shared_ptr<Backend> backend_;
  GatewayConfig config_;
  mutable std::mutex mu_;
  std::condition_variable slots_;
  int in_flight_ = 0;
  long requests_ = 0;
  long tokens_ = 0;
  long sequence_ = 0;
};

// Rough token count used for budgeting before a call.
long estimate_tokens(const ChatRequest& request);

std::uint64_t fnv1a64(std::string_view text);

class PromptTemplate {
 public:
  PromptTemplate(std::string id, std::string text);

  const std::string& id() const { return id_; }
  const std::string& text() const { return text_; }
  // Slot names in order of first appearance.
  const std::vector<std::string>& slots() const { return slots_; }
  std::uint64_t digest() const { return fnv1a64(text_); }

  // Throws TemplateError on a missing slot or a slot the template lacks.
  std::string render(const std::map<std::string, std::string>& values) const;

 private:
  std::string id_;
  std::string text_;
  std::vector<std::string> slots_;
};

const PromptTemplate& prompt_template(const std::string& id);
std::vector<std::string> template_ids();

// Renders `template_id` into a request. A "system_prompt" slot is also sent
// as the leading system message.
ChatRequest render(const std::string& template_id, const std::map<std::string, std::string>& values);

}  // namespace strategist::llm
