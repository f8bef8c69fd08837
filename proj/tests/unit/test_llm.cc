#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "strategist/llm.h"

using namespace strategist;
using namespace strategist::llm;

namespace {

class FlakyBackend final : public Backend {
 public:
  explicit FlakyBackend(int failures, bool retryable) : failures_(failures), retryable_(retryable) {}
  Completion send(const ChatRequest&) override {
    ++calls;
    if (failures_-- > 0) throw TransportError("boom", retryable_, 503);
    return {"ok", 10, 2};
  }
  std::string name() const override { return "flaky"; }
  int calls = 0;

 private:
  int failures_;
  bool retryable_;
};

ChatRequest request(const std::string& id, const std::string& text) {
  ChatRequest r;
  r.template_id = id;
  r.messages = {{"user", text}};
  return r;
}

}  // namespace

TEST_SUITE("llm") {
  TEST_CASE("all prompt templates are registered with their slots") {
    const auto ids = template_ids();
    CHECK(ids.size() == 16);
    const std::set<std::string> expected{"gops_rules",         "avalon_rules",          "value_system",
                                         "gops_signature",     "value_feedback_reflection", "value_idea_generation",
                                         "value_implementation", "guide_system",        "guide_signature",
                                         "guide_feedback_reflection", "guide_idea_generation", "guide_implementation",
                                         "worksheet_fill",     "speech_generation",     "analysis_merlin",
                                         "analysis_evil"};
    CHECK(std::set<std::string>(ids.begin(), ids.end()) == expected);
    const auto& impl = prompt_template("value_implementation");
    CHECK(impl.slots() ==
          std::vector<std::string>{"system_prompt", "game_rules", "previous_guide", "improvement_ideas"});
    CHECK_THROWS_AS(prompt_template("nope"), TemplateError);
  }

  TEST_CASE("template digests are stable") {
    for (const auto& id : template_ids()) {
      CHECK(prompt_template(id).digest() == fnv1a64(prompt_template(id).text()));
    }
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  }

  TEST_CASE("rendering fills slots and rejects unknown or missing ones") {
    PromptTemplate t("t", "Hello {{name}}, {{name}} again and {{other}}.");
    CHECK(t.slots() == std::vector<std::string>{"name", "other"});
    CHECK(t.render({{"name", "A"}, {"other", "B"}}) == "Hello A, A again and B.");
    CHECK_THROWS_AS(t.render({{"name", "A"}}), TemplateError);
    CHECK_THROWS_AS(t.render({{"name", "A"}, {"other", "B"}, {"extra", "C"}}), TemplateError);
  }

  TEST_CASE("system prompt slot becomes the leading system message") {
    const auto r = render("value_implementation", {{"system_prompt", "SYS"},
                                                   {"game_rules", "RULES"},
                                                   {"previous_guide", "def f(): pass"},
                                                   {"improvement_ideas", "Idea"}});
    REQUIRE(r.messages.size() >= 2);
    CHECK(r.messages.front().role == "system");
    CHECK(r.messages.front().content == "SYS");
    CHECK(r.template_id == "value_implementation");
  }

  TEST_CASE("mock answers by template ordinal, then the default") {
    MockBackend mock({{"a", 0, "first", ""}, {"a", 1, "second", ""}, {"a", -1, "later", ""}, {"b", 0, "b0", ""}});
    CHECK(mock.send(request("a", "x")).text == "first");
    CHECK(mock.send(request("a", "x")).text == "second");
    CHECK(mock.send(request("a", "x")).text == "later");
    CHECK(mock.send(request("b", "x")).text == "b0");
    CHECK_THROWS_AS(mock.send(request("b", "x")), PlaybookExhaustedError);
    CHECK(mock.calls("a") == 3);
  }

  TEST_CASE("mock match entries count their own ordinals") {
    MockBackend mock({{"t", 0, "matched-0", "needle"}, {"t", 1, "matched-1", "needle"}, {"t", -1, "plain", ""}});
    CHECK(mock.send(request("t", "hay")).text == "plain");
    CHECK(mock.send(request("t", "a needle")).text == "matched-0");
    CHECK(mock.send(request("t", "hay")).text == "plain");
    CHECK(mock.send(request("t", "needle")).text == "matched-1");
    CHECK_THROWS_AS(mock.send(request("t", "needle")), PlaybookExhaustedError);
  }

  TEST_CASE("playbook json") {
    const auto mock = MockBackend::from_json(json::parse(R"([{"template_id": "x", "ordinal": 0, "reply": "r"}])"));
    CHECK(mock->send(request("x", "")).text == "r");
    CHECK_THROWS(MockBackend::from_json(json::parse(R"([{"ordinal": 0}])")));
  }

  TEST_CASE("gateway retries retryable failures only") {
    auto flaky = std::make_shared<FlakyBackend>(2, true);
    GatewayConfig cfg;
    cfg.backoff_ms = 0;
    Gateway g(flaky, cfg);
    CHECK(g.complete(request("t", "x")) == "ok");
    CHECK(flaky->calls == 3);
    CHECK(g.tokens_used() == 12);

    auto fatal = std::make_shared<FlakyBackend>(1, false);
    Gateway g2(fatal, cfg);
    CHECK_THROWS_AS(g2.complete(request("t", "x")), TransportError);
    CHECK(fatal->calls == 1);
  }

  TEST_CASE("gateway enforces the request budget") {
    GatewayConfig cfg;
    cfg.max_requests = 1;
    Gateway g(std::make_shared<MockBackend>(std::vector<PlaybookEntry>{{"t", -1, "r", ""}}), cfg);
    CHECK(g.complete(request("t", "x")) == "r");
    CHECK_THROWS_AS(g.complete(request("t", "x")), BudgetExceededError);
    CHECK(g.requests_made() == 1);
  }

  TEST_CASE("gateway writes an audit line per call") {
    const auto path = std::filesystem::temp_directory_path() / "strategist_audit_test.jsonl";
    std::filesystem::remove(path);
    GatewayConfig cfg;
    cfg.audit_log = path.string();
    {
      Gateway g(std::make_shared<MockBackend>(std::vector<PlaybookEntry>{{"t", -1, "r", ""}}), cfg);
      g.complete(request("t", "x"));
      g.complete(request("t", "y"));
    }
    std::ifstream in(path);
    int lines = 0;
    for (std::string line; std::getline(in, line);) {
      const auto j = json::parse(line);
      CHECK(j.contains("template_id"));
      ++lines;
    }
    CHECK(lines == 2);
  }
}
