#include <chrono>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "strategist/llm.h"

namespace strategist::llm {

json ChatRequest::to_json() const {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return {{"template_id", template_id}, {"model", model}, {"temperature", temperature},
          {"max_tokens", max_tokens}, {"messages", msgs}};
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

long estimate_tokens(const ChatRequest& request) {
  long chars = 0;
  for (const auto& m : request.messages) chars += static_cast<long>(m.content.size());
  return chars / 4 + 1;
}

MockBackend::MockBackend(std::vector<PlaybookEntry> playbook) {
  for (auto& e : playbook) {
    if (e.ordinal < -1) throw LlmError("playbook ordinals must be non-negative, or -1 for a default reply");
    if (!e.match.empty()) {
      matched_.push_back(std::move(e));
      continue;
    }
    replies_[{e.template_id, e.ordinal}] = std::move(e.reply);
  }
}

std::shared_ptr<MockBackend> MockBackend::from_json(const json& j) {
  if (!j.is_array()) throw LlmError("playbook must be a JSON list");
  std::vector<PlaybookEntry> entries;
  for (const auto& e : j) {
    entries.push_back({e.at("template_id").get<std::string>(), e.value("ordinal", 0), e.at("reply").get<std::string>(),
                       e.value("match", std::string())});
  }
  return std::make_shared<MockBackend>(std::move(entries));
}

std::shared_ptr<MockBackend> MockBackend::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LlmError("cannot read playbook '" + path + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw LlmError("playbook '" + path + "' is not valid JSON");
  return from_json(j);
}

Completion MockBackend::send(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  std::string text;
  for (const auto& m : request.messages) text += m.content;
  const std::string* reply = nullptr;
  std::set<std::string> seen;
  for (const auto& e : matched_) {
    if (e.template_id != request.template_id || text.find(e.match) == std::string::npos) continue;
    if (!seen.insert(e.match).second) continue;
    const int ordinal = counts_[request.template_id + "\x1f" + e.match]++;
    for (int want : {ordinal, -1}) {
      for (const auto& candidate : matched_) {
        if (candidate.template_id == e.template_id && candidate.match == e.match && candidate.ordinal == want) {
          reply = &candidate.reply;
          break;
        }
      }
      if (reply) break;
    }
    if (!reply) {
      throw PlaybookExhaustedError("playbook has no reply for " + request.template_id + " matching '" + e.match +
                                   "' #" + std::to_string(ordinal));
    }
    break;
  }
  const int ordinal = counts_[request.template_id]++;
  if (!reply) {
    auto it = replies_.find({request.template_id, ordinal});
    if (it == replies_.end()) it = replies_.find({request.template_id, -1});
    if (it == replies_.end()) {
      throw PlaybookExhaustedError("playbook has no reply for " + request.template_id + " #" + std::to_string(ordinal));
    }
    reply = &it->second;
  }
  Completion c;
  c.text = *reply;
  c.prompt_tokens = estimate_tokens(request);
  c.completion_tokens = static_cast<long>(c.text.size()) / 4 + 1;
  return c;
}

int MockBackend::calls(const std::string& template_id) const {
  std::lock_guard lock(mu_);
  auto it = counts_.find(template_id);
  return it == counts_.end() ? 0 : it->second;
}

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayConfig config)
    : backend_(std::move(backend)), config_(std::move(config)) {
  if (!backend_) throw LlmError("gateway needs a backend");
  if (config_.max_in_flight < 1) config_.max_in_flight = 1;
}

long Gateway::requests_made() const {
  std::lock_guard lock(mu_);
  return requests_;
}

long Gateway::tokens_used() const {
  std::lock_guard lock(mu_);
  return tokens_;
}

std::string Gateway::complete(const ChatRequest& in) {
  ChatRequest request = in;
  if (request.model.empty()) request.model = config_.default_model;
  if (request.messages.empty()) throw LlmError("chat request has no messages");
  const long estimate = estimate_tokens(request);
  {
    std::unique_lock lock(mu_);
    if (config_.max_requests >= 0 && requests_ >= config_.max_requests) {
      throw BudgetExceededError("request budget of " + std::to_string(config_.max_requests) + " exhausted");
    }
    if (config_.max_tokens >= 0 && tokens_ + estimate > config_.max_tokens) {
      throw BudgetExceededError("token budget of " + std::to_string(config_.max_tokens) + " exhausted");
    }
    slots_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
    ++in_flight_;
    ++requests_;
  }
  auto release = [&] {
    std::lock_guard lock(mu_);
    --in_flight_;
    slots_.notify_one();
  };
  int attempts = 0;
  while (true) {
    ++attempts;
    try {
      Completion reply = backend_->send(request);
      {
        std::lock_guard lock(mu_);
        tokens_ += reply.prompt_tokens + reply.completion_tokens;
      }
      audit(request, &reply, attempts, {});
      release();
      return reply.text;
    } catch (const TransportError& e) {
      if (!e.retryable() || attempts > config_.max_retries) {
        audit(request, nullptr, attempts, e.what());
        release();
        throw;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms << (attempts - 1)));
    } catch (const std::exception& e) {
      audit(request, nullptr, attempts, e.what());
      release();
      throw;
    }
  }
}

void Gateway::audit(const ChatRequest& request, const Completion* reply, int attempts, const std::string& error) {
  if (config_.audit_log.empty()) return;
  std::ostringstream digest;
  digest << std::hex << fnv1a64(request.to_json().dump());
  json line{{"template_id", request.template_id},
            {"request_digest", digest.str()},
            {"backend", backend_->name()},
            {"attempts", attempts}};
  if (reply) {
    line["reply"] = reply->text;
    line["prompt_tokens"] = reply->prompt_tokens;
    line["completion_tokens"] = reply->completion_tokens;
  } else {
    line["error"] = error;
  }
  std::lock_guard lock(mu_);
  line["seq"] = sequence_++;
  std::ofstream out(config_.audit_log, std::ios::app);
  out << line.dump() << '\n';
}

}  // namespace strategist::llm
