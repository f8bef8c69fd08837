#include "doctest.h"
#include "strategist/gops.h"
#include "strategist/prompts.h"
#include "test_support.h"

using namespace strategist;
using gops::GopsState;

TEST_SUITE("gops") {
  TEST_CASE("fixture episode scores") {
    const auto s = gops::replay({2, 4, 5, 1, 3}, {1, 2, 4, 3, 5}, {3, 5, 1, 2, 4});
    CHECK(s.is_terminal());
    CHECK(s.score(0) == 9);
    CHECK(s.score(1) == 6);
    CHECK(s.returns() == std::vector<double>{3.0, -3.0});
  }

  TEST_CASE("tie carries the pot to the next round") {
    auto s = GopsState(3).apply(2).apply(1).apply(1);
    CHECK(s.pot() == 2);
    CHECK(s.score(0) == 0);
    s = s.apply(3).apply(3).apply(2);
    CHECK(s.score(0) == 5);
    CHECK(s.pot() == 0);
  }

  TEST_CASE("final tie keeps the pot out of both scores") {
    const auto s = gops::replay({1, 2}, {1, 2}, {1, 2});
    CHECK(s.is_terminal());
    CHECK(s.pot() == 3);
    CHECK(s.returns() == std::vector<double>{0.0, 0.0});
    CHECK(s.conserved_total() == 3);
  }

  TEST_CASE("turn order: chance, player 0, player 1") {
    GopsState s(4);
    CHECK(s.is_chance());
    CHECK(s.chance_outcomes().entries().size() == 4);
    s = s.apply(3);
    CHECK(s.current_actor() == PlayerId(0));
    s = s.apply(2);
    CHECK(s.current_actor() == PlayerId(1));
    CHECK(s.pending_p0_card() == 2);
  }

  TEST_CASE("pending card is hidden from player 1 and the public") {
    const auto s = GopsState(4).apply(3).apply(2);
    const std::string secret = s.observation(PlayerId(1)).dump();
    CHECK(s.observation(PlayerId(0)).dump() != secret);
    CHECK(s.infoset_key(PlayerId(1)) == s.with_pending(4).infoset_key(PlayerId(1)));
    CHECK(s.infoset_key(PlayerId(0)) != s.with_pending(4).infoset_key(PlayerId(0)));
  }

  TEST_CASE("illegal moves throw") {
    const auto s = GopsState(3).apply(1);
    CHECK_THROWS_AS(s.apply(7), IllegalActionError);
    CHECK_THROWS_AS(apply_action(s, PlayerId(1), 1), IllegalActionError);
  }

  TEST_CASE("json round trip") {
    const auto s = GopsState(5).apply(4).apply(2);
    const auto back = GopsState::from_json(s.to_json());
    CHECK(back.state_key() == s.state_key());
    CHECK(state_from_json(s.to_json())->state_key() == s.state_key());
  }

  TEST_CASE("action json") {
    const auto s = GopsState(5).apply(4);
    CHECK(s.action_from_json(json{{"card", 3}}) == 3);
    CHECK(s.action_from_json(json(2)) == 2);
    CHECK_THROWS(s.action_from_json(json("x")));
  }

  TEST_CASE("conservation holds on random play (property)") {
    Rng rng(1);
    UniformRandomPolicy random;
    for (int g = 0; g < 500; ++g) {
      const int n = 2 + g % 8;
      StatePtr s = std::make_unique<GopsState>(n);
      while (!s->is_terminal()) {
        s = s->child(s->is_chance() ? s->chance_outcomes().sample(rng) : random.act(*s, rng));
        REQUIRE(static_cast<const GopsState&>(*s).conserved_total() == n * (n + 1) / 2);
      }
      const auto r = s->returns();
      CHECK(r[0] == -r[1]);
    }
  }

  TEST_CASE("state rendering matches the feedback format") {
    const auto s = gops::replay({2, 4, 5, 1, 3}, {1, 2, 4, 3, 5}, {3, 5, 1, 2, 4});
    const std::string text = render_gops_state(s);
    CHECK(text.find("- The score cards that have been revealed are: (2, 4, 5, 1, 3)") != std::string::npos);
    CHECK(text.find("- The score cards left in the deck are: set()") != std::string::npos);
  }
}
