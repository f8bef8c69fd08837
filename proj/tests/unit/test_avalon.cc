#include <algorithm>

#include "doctest.h"
#include "strategist/avalon.h"
#include "strategist/dialogue.h"
#include "strategist/prompts.h"
#include "test_support.h"

using namespace strategist;
using avalon::AvalonState;
using avalon::Phase;
using avalon::Role;

namespace {

const std::vector<Role> kRoles{Role::kMerlin, Role::kServant, Role::kAssassin, Role::kServant, Role::kMinion};

AvalonState vote_all(AvalonState s, ActionId vote) {
  while (s.phase() == Phase::kVoting) s = s.apply(vote);
  return s;
}

}  // namespace

TEST_SUITE("avalon") {
  TEST_CASE("quest table") {
    CHECK(avalon::quest_config(5).team_sizes == std::array<int, 5>{2, 3, 2, 3, 3});
    CHECK(avalon::quest_config(6).team_sizes == std::array<int, 5>{2, 3, 4, 3, 4});
    CHECK_THROWS(avalon::quest_config(7));
    CHECK(avalon::role_multiset(6).size() == 6);
  }

  TEST_CASE("team selection only offers teams of the quest size") {
    const AvalonState s(kRoles, 0, 0);
    for (ActionId a : s.legal_actions()) CHECK(avalon::team_members(static_cast<avalon::TeamMask>(a)).size() == 2);
    CHECK(s.legal_actions().size() == 10);
    CHECK_THROWS_AS(s.apply(avalon::team_mask({0, 1, 2})), IllegalActionError);
  }

  TEST_CASE("rejection passes leadership and the fifth proposal is forced") {
    AvalonState s(kRoles, 3, 0);
    for (int i = 0; i < 4; ++i) {
      CHECK(s.leader() == (3 + i) % 5);
      s = vote_all(s.apply(s.legal_actions().front()), avalon::kReject);
      CHECK(s.rejection_streak() == i + 1);
    }
    s = s.apply(s.legal_actions().front());
    CHECK(s.phase() == Phase::kQuest);
    CHECK(s.proposals().back().forced);
    CHECK(s.proposals().back().votes.empty());
  }

  TEST_CASE("good players can only pass quests") {
    AvalonState s(kRoles, 0, 0);
    s = vote_all(s.apply(avalon::team_mask({0, 2})), avalon::kApprove);
    REQUIRE(s.phase() == Phase::kQuest);
    CHECK(s.current_actor() == PlayerId(0));
    CHECK(s.legal_actions() == std::vector<ActionId>{avalon::kPass});
    s = s.apply(avalon::kPass);
    CHECK(s.legal_actions().size() == 2);
    s = s.apply(avalon::kFail);
    CHECK(s.quests().back().fails == 1);
    CHECK_FALSE(s.quests().back().success);
  }

  TEST_CASE("observations expose only the viewer's role") {
    const AvalonState s(kRoles, 0, 0);
    for (int seat = 0; seat < 5; ++seat) {
      const json o = s.observation(PlayerId(seat));
      CHECK(o.at("private").at("role") == avalon::to_string(kRoles[seat]));
      CHECK(o.at("private").contains("known_evil") == (seat == 0 || seat == 2 || seat == 4));
      json pub = o;
      pub.erase("private");
      for (Role r : {Role::kMerlin, Role::kServant, Role::kAssassin, Role::kMinion}) {
        CHECK(pub.dump().find(avalon::to_string(r)) == std::string::npos);
      }
    }
    CHECK(s.observation(PlayerId::environment()).at("private").is_null());
  }

  TEST_CASE("infoset keys ignore other seats' roles") {
    const AvalonState a(kRoles, 0, 0);
    const AvalonState b({Role::kMerlin, Role::kAssassin, Role::kServant, Role::kMinion, Role::kServant}, 0, 0);
    CHECK(a.infoset_key(PlayerId(3)) != b.infoset_key(PlayerId(3)));  // Servant vs Minion at seat 3
    const AvalonState c({Role::kServant, Role::kServant, Role::kAssassin, Role::kMerlin, Role::kMinion}, 0, 0);
    CHECK(a.infoset_key(PlayerId(1)) == c.infoset_key(PlayerId(1)));
  }

  TEST_CASE("discussion windows take speeches in seat order from the leader") {
    AvalonState s(kRoles, 2, 1);
    REQUIRE(s.discussion_open());
    CHECK(s.next_speaker() == 2);
    s = s.record_dialogue(PlayerId(2), "hello");
    CHECK(s.next_speaker() == 3);
    for (int i = 0; i < 4; ++i) s = s.record_dialogue(PlayerId(*s.next_speaker()), "x");
    CHECK_FALSE(s.discussion_open());
    CHECK(s.discussion_log().size() == 5);
    CHECK_THROWS(s.record_dialogue(PlayerId(0), "late"));
  }

  TEST_CASE("json round trip keeps hidden votes") {
    AvalonState s(kRoles, 0, 0);
    s = s.apply(avalon::team_mask({0, 1})).apply(avalon::kApprove).apply(avalon::kReject);
    const auto back = AvalonState::from_json(s.to_json());
    CHECK(back.state_key() == s.state_key());
  }

  TEST_CASE("random games end with side-partitioned returns (property)") {
    Rng rng(4);
    UniformRandomPolicy random;
    for (int g = 0; g < 300; ++g) {
      AvalonState s = avalon::new_game(5 + g % 2, static_cast<std::uint64_t>(g), g % 3 == 0 ? 1 : 0);
      int guard = 0;
      while (!s.is_terminal() && guard++ < 2000) {
        if (s.discussion_open()) {
          s = s.record_dialogue(PlayerId(*s.next_speaker()), "...");
        } else {
          s = s.apply(random.act(s, rng));
        }
      }
      REQUIRE(s.is_terminal());
      const auto r = s.returns();
      double good_total = 0.0, evil_total = 0.0;
      for (int i = 0; i < s.num_players(); ++i) {
        (s.side_of_seat(i) == avalon::Side::kGood ? good_total : evil_total) += r[i];
        CHECK((r[i] == 0.0 || r[i] == 1.0));
      }
      CHECK(((good_total == 0.0) != (evil_total == 0.0)));
    }
  }

  TEST_CASE("state description matches the dialogue prompt format") {
    AvalonState s({Role::kMerlin, Role::kServant, Role::kAssassin, Role::kServant, Role::kMinion}, 1, 1);
    const std::string text = avalon::describe_state(s, 0) + "\n" +
                             intent_text(s, avalon::team_mask({0, 1})) + "\n";
    CHECK(text == read_fixture("state_description.txt"));
  }

  TEST_CASE("discussion history matches the dialogue prompt format") {
    const std::string fixture = read_fixture("discussion_history.txt");
    AvalonState s(kRoles, 1, 1);
    std::size_t pos = 0;
    while ((pos = fixture.find("- Player ", pos)) != std::string::npos) {
      const int player = fixture[pos + 9] - '0';
      const auto open = fixture.find('"', pos);
      const auto close = fixture.find("\"\n", open + 1);
      s = s.record_dialogue(PlayerId(player), fixture.substr(open + 1, close - open - 1));
      pos = close;
    }
    CHECK(s.discussion_log().size() == 4);
    CHECK(render_discussion_history(s) == fixture);
  }
}
