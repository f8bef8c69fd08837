#include "doctest.h"
#include "strategist/gops.h"
#include "strategist/prompts.h"
#include "test_support.h"

using namespace strategist;

TEST_SUITE("prompts") {
  TEST_CASE("idea block parses into its ideas") {
    const auto ideas = parse_ideas(read_fixture("generated_ideas_fixture.txt"));
    REQUIRE(ideas.size() == 2);
    CHECK(ideas[0].rfind("Enhance the strategic adjustment component", 0) == 0);
    CHECK(ideas[1].rfind("Revise the dynamic penalty adjustment", 0) == 0);
    CHECK(ideas[1].find("Idea") == std::string::npos);
  }

  TEST_CASE("ideas spanning lines and missing ideas") {
    const auto ideas = parse_ideas("Idea 1: first\ncontinued\n\nIdea 2:second");
    REQUIRE(ideas.size() == 2);
    CHECK(ideas[0] == "first continued");
    CHECK(ideas[1] == "second");
    CHECK_THROWS_AS(parse_ideas("no ideas here"), ParseError);
  }

  TEST_CASE("heuristic replies") {
    const auto b = parse_heuristic("Sure.\n#builtin: gops_expected_share\n", GameKind::kGops);
    CHECK(b.kind == HeuristicKind::kBuiltin);
    CHECK(b.source_text == "gops_expected_share");
    const auto fenced =
        parse_heuristic("Here:\n```python\ndef evaluate_state(state):\n    return (0, 0), {}\n```\nDone.", GameKind::kGops);
    CHECK(fenced.kind == HeuristicKind::kExternal);
    CHECK(fenced.source_text == "def evaluate_state(state):\n    return (0, 0), {}\n");
    const auto bare = parse_heuristic("text\ndef evaluate_state(state):\n    return (1, 2), {}", GameKind::kGops);
    CHECK(bare.source_text.rfind("def evaluate_state", 0) == 0);
    CHECK_THROWS_AS(parse_heuristic("no code", GameKind::kGops), ParseError);
  }

  TEST_CASE("analysis fixtures parse to exact deltas") {
    const auto m = parse_analysis(read_fixture("analysis_merlin_fixture.txt"));
    REQUIRE(m.size() == 5);
    CHECK(m.at(2).delta == 2);
    CHECK(m.at(2).label == "increased significantly");
    CHECK(m.at(4).delta == -2);
    CHECK(m.at(0).delta == 0);
    const auto e = parse_analysis(read_fixture("analysis_evil_fixture.txt"));
    CHECK(e.at(0).delta == -1);
    CHECK(e.at(3).delta == 1);
    CHECK(e.at(4).delta == 2);
  }

  TEST_CASE("malformed analysis dictionaries are rejected") {
    CHECK_THROWS_AS(parse_analysis("{0: (3, 'increased significantly')}"), ParseError);
    CHECK_THROWS_AS(parse_analysis("{0: (1, 'increased slightly'), 0: (1, 'increased slightly')}"), ParseError);
    CHECK_THROWS_AS(parse_analysis("nothing"), ParseError);
    const auto ok = parse_analysis("{0: (1, \"increased slightly\")}");
    CHECK(ok.at(0).delta == 1);
    // The number decides when it disagrees with its label.
    CHECK(parse_analysis("{0: (1, 'stayed the same')}").at(0).delta == 1);
  }

  TEST_CASE("python literals") {
    CHECK(py_float(0.0) == "0.0");
    CHECK(py_float(3.0) == "3.0");
    CHECK(py_float(-2.5) == "-2.5");
    CHECK(py_float(0.1) == "0.1");
    CHECK(py_float(1e-5) == "1e-05");
    CHECK(py_float(1e16) == "1e+16");
    CHECK(py_float(123456.0) == "123456.0");
    CHECK(py_repr(ordered_json::array({1, 2})) == "[1, 2]");
    CHECK(py_repr(ordered_json("it's")) == "\"it's\"");
    CHECK(py_repr(ordered_json("a")) == "'a'");
    CHECK(py_repr(ordered_json("a'b\"c\n")) == "'a\\'b\"c\\n'");
    CHECK(py_player_dict(std::vector<double>{3.0, -3.0}) == "{0: 3.0, 1: -3.0}");
    CHECK(player_set_text(5) == "{0, 1, 2, 3, 4}");
  }

  TEST_CASE("feedback example matches the reference rendering") {
    const auto s = gops::replay({2, 4, 5, 1, 3}, {1, 2, 4, 3, 5}, {3, 5, 1, 2, 4});
    FeedbackExample ex;
    ex.index = 9;
    ex.state_text = render_gops_state(s);
    ex.values = ordered_json::array({3, -3});
    ex.intermediates = ordered_json::object();
    ex.intermediates["player_0_expected_score"] = 9;
    ex.intermediates["player_1_expected_score"] = 6;
    ex.intermediates["dynamic_penalty"] = 0.0;
    for (const char* k : {"player_0_hand_reward", "player_1_hand_reward", "player_0_adjustment",
                          "player_1_adjustment", "player_0_strategic_adjustment", "player_1_strategic_adjustment"}) {
      ex.intermediates[k] = 0;
    }
    ex.search_estimate = {0.0, 0.0};
    ex.actual = {3.0, -3.0};
    std::string expected = read_fixture("feedback_example_fixture.txt");
    while (!expected.empty() && expected.back() == '\n') expected.pop_back();
    std::string got = render_feedback_example(ex);
    while (!got.empty() && got.back() == '\n') got.pop_back();
    CHECK(got == expected);
  }

  TEST_CASE("guides parse from numbered and worksheet forms") {
    const auto g = parse_guide("Questions to fill out before speaking\n1. Who is Evil?\n2. What team?\n");
    CHECK(g.title == "Questions to fill out before speaking");
    CHECK(g.questions == std::vector<std::string>{"Who is Evil?", "What team?"});
    CHECK(g.worksheet_text() == "Questions to fill out before speaking\n\nQ1: Who is Evil?\n\nQ2: What team?\n");
    const auto back = parse_guide(g.worksheet_text());
    CHECK(back.questions == g.questions);
    CHECK(DialogueGuide::from_json(g.to_json()).questions == g.questions);
    DialogueGuide big{"T", std::vector<std::string>(7, "q")};
    CHECK_FALSE(big.lint().empty());
    CHECK(g.lint().empty());
  }

  TEST_CASE("worksheet fixture parses as six answered questions") {
    const auto g = parse_guide("Worksheet\n" + read_fixture("worksheet_fixture.txt"));
    CHECK(g.questions.size() == 6);
  }
}
