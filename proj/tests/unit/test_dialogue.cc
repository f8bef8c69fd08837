#include <cmath>

#include "doctest.h"
#include "strategist/dialogue.h"

using namespace strategist;
using avalon::Role;

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

HeuristicHandle quest_progress() {
  return load_heuristic(HeuristicSpec::builtin("avalon_quest_progress", GameKind::kAvalon));
}

}  // namespace

TEST_SUITE("dialogue") {
  TEST_CASE("delta log-odds table") {
    CHECK(delta_log_odds(-2) == -1.0);
    CHECK(delta_log_odds(-1) == -0.5);
    CHECK(delta_log_odds(0) == 0.0);
    CHECK(delta_log_odds(1) == 0.5);
    CHECK(delta_log_odds(2) == 1.0);
  }

  TEST_CASE("deltas shift unpinned beliefs in log-odds space") {
    const auto game = avalon::new_game(5, 4, 0);
    int observer = 0;
    while (game.role_of(observer) != Role::kServant) ++observer;
    auto b = Beliefs::prior(game, observer);
    const auto before = b;
    std::map<int, AnalysisEntry> deltas;
    for (int s = 0; s < 5; ++s) deltas[s] = {2, delta_labels()[4]};
    apply_deltas(b, deltas, false);
    for (int s = 0; s < 5; ++s) {
      if (s == observer) {
        CHECK(b.p_evil[s] == before.p_evil[s]);
      } else {
        CHECK(logit(b.p_evil[s]) == doctest::Approx(logit(before.p_evil[s]) + 1.0));
      }
    }
    CHECK(b.p_merlin == before.p_merlin);
  }

  TEST_CASE("guide objectives") {
    CHECK(combine_guide_score(GuideObjective::kMinimum, 0.5, -0.25) == -0.25);
    CHECK(combine_guide_score(GuideObjective::kEvilSuspicion, std::nullopt, 0.75) == 0.75);
    CHECK(combine_guide_score(GuideObjective::kMinimum, std::nullopt, 0.75) == 0.75);
    CHECK_THROWS(combine_guide_score(GuideObjective::kMinimum, std::nullopt, std::nullopt));
    CHECK_THROWS(combine_guide_score(GuideObjective::kEvilSuspicion, 0.5, std::nullopt));
    CHECK(default_objective(Role::kMerlin) == GuideObjective::kMinimum);
    for (auto o : {GuideObjective::kMinimum, GuideObjective::kEvilSuspicion}) {
      CHECK(guide_objective_from_string(to_string(o)) == o);
    }
    CHECK_THROWS(guide_objective_from_string("nonsense"));
  }

  TEST_CASE("speech falls back without a gateway") {
    const auto scenarios = make_scenarios(Role::kMerlin, 1, 5, 3, quest_progress());
    REQUIRE(scenarios.size() == 1);
    const auto& sc = scenarios[0];
    CHECK(sc.state.role_of(sc.speaker) == Role::kMerlin);
    DialogueConfig cfg;
    const auto out = generate_dialogue(sc.state, sc.speaker, sc.intent, parse_guide("1. Who do you trust?"), nullptr, cfg);
    CHECK(out.fallback);
    CHECK(out.speech == cfg.fallback_utterance);
    CHECK(Scenario::from_json(sc.to_json()).to_json() == sc.to_json());
  }

  TEST_CASE("agents update beliefs from analysed speeches") {
    auto game = avalon::new_game(5, 6, 1);
    REQUIRE(game.discussion_open());
    game = game.record_dialogue(PlayerId(*game.next_speaker()), "I trust seat 1 completely.");
    int observer = 0;
    while (game.role_of(observer) != Role::kServant) ++observer;
    llm::Gateway gateway(std::make_shared<llm::MockBackend>(std::vector<llm::PlaybookEntry>{
        {"analysis_evil", -1, "Thought:\nHmm.\n\nDictionary:\n{1: (2, 'increased significantly')}", ""},
        {"analysis_merlin", -1, "Thought:\nHmm.\n\nDictionary:\n{}", ""},
    }));
    DialogueAgent agent(observer, {quest_progress(), SearchConfig{}, std::nullopt, DialogueConfig{}}, &gateway);
    agent.observe(game);
    REQUIRE(agent.beliefs());
    const auto prior = Beliefs::prior(game, observer);
    if (observer != 1) CHECK(agent.beliefs()->p_evil[1] > prior.p_evil[1]);
  }

  TEST_CASE("fallback dialogue game terminates") {
    DialogueGameConfig gc;
    gc.num_players = 5;
    gc.discussion_rounds = 1;
    gc.seed = 2;
    gc.heuristic = quest_progress();
    gc.search.budget = 8;
    const auto r = play_dialogue_game(gc, nullptr);
    CHECK(r.final_state.is_terminal());
    CHECK(r.speeches > 0);
    CHECK(r.fallback_speeches == r.speeches);
    CHECK(r.returns == r.final_state.returns());
  }
}
