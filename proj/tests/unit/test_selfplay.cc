#include <cmath>

#include "doctest.h"
#include "strategist/gops.h"
#include "strategist/selfplay.h"
#include "strategist/stats.h"

using namespace strategist;

namespace {

Competitor builtin(const std::string& name, GameKind game = GameKind::kGops) {
  return {name, load_heuristic(HeuristicSpec::builtin(name, game, name))};
}

}  // namespace

TEST_SUITE("selfplay") {
  TEST_CASE("summary statistics") {
    CHECK(mean({1, 2, 3}) == 2.0);
    CHECK(*sample_sd({1, 2, 3}) == doctest::Approx(1.0));
    CHECK(*standard_error({1, 2, 3}) == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK_FALSE(sample_sd({1}).has_value());
  }

  TEST_CASE("one-way ANOVA") {
    const auto a = anova_oneway({{1, 2, 3}, {2, 3, 4}});
    CHECK(a.f == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(a.df_between == 1);
    CHECK(a.df_within == 4);
    CHECK(a.p == doctest::Approx(0.2879).epsilon(1e-3));
    const auto z = anova_oneway({{1, 2, 3}, {1, 2, 3}});
    CHECK(z.f == 0.0);
    CHECK(z.p == doctest::Approx(1.0));
    const auto inf = anova_oneway({{1, 1}, {2, 2}});
    CHECK(inf.f_infinite);
    CHECK_THROWS(anova_oneway({{1, 2, 3}}));
    CHECK_THROWS(anova_oneway({{1}, {2, 3}}));
  }

  TEST_CASE("round robin plays both seatings and is deterministic") {
    TournamentConfig tc;
    tc.gops_cards = 4;
    tc.games_per_pair = 2;
    tc.search.budget = 8;
    tc.seed = 5;
    const std::vector<Competitor> cs{builtin("constant_zero"), builtin("gops_current_score"),
                                     builtin("gops_expected_share")};
    const auto a = round_robin(cs, tc);
    const auto b = round_robin(cs, tc);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].games.size() == 4);
      CHECK(a[i].to_json() == b[i].to_json());
      for (const auto& g : a[i].games) CHECK(*g.score_a == -*g.score_b);
    }
    const auto report = score_population(a);
    CHECK(report.ids.size() == 3);
    CHECK_FALSE(report.matrix[0][0].has_value());
    CHECK(*report.matrix[0][1] == doctest::Approx(-*report.matrix[1][0]));
    double total = 0.0;
    for (const auto& s : report.scores) total += s.mean * s.games;
    CHECK(total == doctest::Approx(0.0).epsilon(1e-9));
  }

  TEST_CASE("avalon tournaments report role breakdowns") {
    TournamentConfig tc;
    tc.game = GameKind::kAvalon;
    tc.games_per_pair = 1;
    tc.search.budget = 4;
    const auto report = score_population(
        round_robin({builtin("avalon_quest_progress", GameKind::kAvalon), builtin("constant_zero", GameKind::kAvalon)},
                    tc));
    for (const auto& s : report.scores) {
      CHECK(s.mean >= 0.0);
      CHECK(s.mean <= 1.0);
      CHECK_FALSE(s.by_role.empty());
    }
  }

  TEST_CASE("a failing heuristic scores zero without crediting its opponent") {
    struct Broken final : Evaluator {
      ValueEstimate evaluate(const State&) const override { throw EvaluationError("broken"); }
    };
    TournamentConfig tc;
    tc.gops_cards = 3;
    tc.games_per_pair = 1;
    tc.search.budget = 4;
    const auto results = round_robin(
        {{"broken", HeuristicHandle(HeuristicSpec::builtin("constant_zero", GameKind::kGops), std::make_shared<Broken>())},
         builtin("gops_current_score")},
        tc);
    const auto report = score_population(results);
    CHECK(report.score_of("broken").mean == 0.0);
    CHECK(report.score_of("gops_current_score").games == 0);
    CHECK(results[0].games[0].error.has_value());
  }

  TEST_CASE("rollout determinism and returns") {
    StrategicProfile p({std::make_shared<UniformRandomPolicy>(), std::make_shared<UniformRandomPolicy>()});
    const auto a = rollout(gops::GopsState(5), p, 9);
    const auto b = rollout(gops::GopsState(5), p, 9);
    CHECK(a.final_state->state_key() == b.final_state->state_key());
    CHECK(a.final_returns == a.final_state->returns());
  }
}
