#include <cmath>
#include <map>

#include "doctest.h"
#include "strategist/improve.h"
#include "strategist/stats.h"
#include "strategist/value_domain.h"
#include "test_support.h"

using namespace strategist;

namespace {

StrategyNode scored(double z, std::optional<std::string> parent = std::nullopt) {
  StrategyNode n;
  n.heuristic = HeuristicSpec::builtin("constant_zero", GameKind::kGops);
  n.score = z;
  n.parent = std::move(parent);
  return n;
}

}  // namespace

TEST_SUITE("improve") {
  TEST_CASE("UCB score") {
    CHECK(ucb_score(0.2, 1.0, 8, 2) == doctest::Approx(0.2 + std::sqrt(std::log(8.0) / 2.0)).epsilon(1e-12));
    CHECK(std::isinf(ucb_score(5.0, 1.0, 8, 0)));
    CHECK(ucb_score(0.5, 1.0, 1, 1) == 0.5);
  }

  TEST_CASE("running average equals the mean of improvements (property)") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
      IdeaQueue q;
      const auto a = q.add("a");
      const auto b = q.add("b");
      std::map<std::string, std::vector<double>> seen;
      const int steps = 1 + static_cast<int>(rng() % 40);
      for (int i = 0; i < steps; ++i) {
        const auto& id = (rng() % 2) ? a : b;
        const double v = std::uniform_real_distribution<double>(-10, 10)(rng);
        q.update(id, v);
        seen[id].push_back(v);
      }
      for (const auto& [id, vs] : seen) {
        CHECK(q.at(id).score == doctest::Approx(mean(vs)).epsilon(1e-9));
        CHECK(q.at(id).tries == static_cast<int>(vs.size()));
      }
    }
  }

  TEST_CASE("unvisited ideas are selected first, oldest first") {
    IdeaQueue q;
    q.add("a");
    q.add("b");
    Rng rng(1);
    CHECK(q.select(1.0, 0.5, rng).id == "i0");
    CHECK(q.select(1.0, 0.5, rng, {{"i0", 1}}).id == "i1");
    q.update("i0", 1.0);
    CHECK(q.select(1.0, 0.5, rng).id == "i1");
  }

  TEST_CASE("zero temperature takes the best UCB score") {
    IdeaQueue q;
    q.add("a");
    q.add("b");
    q.update("i0", 1.0);
    q.update("i1", 3.0);
    Rng rng(1);
    for (int i = 0; i < 10; ++i) CHECK(q.select(1.0, 0.0, rng).id == "i1");
    CHECK_THROWS_AS(IdeaQueue().select(1.0, 0.0, rng), EmptyQueueError);
  }

  TEST_CASE("queue json round trip") {
    IdeaQueue q;
    q.add("a", "s0", "k");
    q.update("i0", 2.0);
    const auto back = IdeaQueue::from_json(q.to_json());
    CHECK(back.at("i0").score == 2.0);
    CHECK(back.at("i0").origin_strategy == "s0");
    CHECK(back.to_json() == q.to_json());
  }

  TEST_CASE("tree ids, ranking and lineage") {
    StrategyTree t;
    CHECK(t.add(scored(0.0)) == "s0");
    CHECK(t.add(scored(2.0, "s0")) == "s1");
    CHECK(t.add(scored(1.0, "s1")) == "s2");
    auto failed = scored(0.0, "s0");
    failed.failure = "parse error";
    t.add(failed);
    const auto ranked = t.ranked();
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0]->id == "s1");
    CHECK(t.lineage("s2") == std::vector<std::string>{"s0", "s1", "s2"});
    CHECK(StrategyTree::from_json(t.to_json()).to_json() == t.to_json());
    CHECK(t.at("s1").heuristic->parent_id == "s0");
  }

  TEST_CASE("strategy selection draws from the two best") {
    StrategyTree t;
    t.add(scored(0.0));
    t.add(scored(5.0));
    t.add(scored(4.9));
    Rng rng(3);
    std::map<std::string, int> picks;
    for (int i = 0; i < 500; ++i) picks[select_strategy(t, 0.3, rng).id]++;
    CHECK(picks["s0"] == 0);
    CHECK(picks["s1"] > picks["s2"]);
    CHECK(picks["s2"] > 0);
    CHECK_THROWS(select_strategy(StrategyTree(), 0.3, rng));
  }

  TEST_CASE("key states by discrepancy, ties in trajectory order") {
    std::vector<KeyState> ks(4);
    const double d[] = {1.0, 3.0, 3.0, 0.5};
    for (int i = 0; i < 4; ++i) {
      ks[i].discrepancy = d[i];
      ks[i].position = i;
    }
    const auto top = select_key_states(ks, 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0].position == 1);
    CHECK(top[1].position == 2);
    CHECK(top[2].position == 0);
  }

  TEST_CASE("evolution config validation and json") {
    EvolutionConfig c;
    CHECK_NOTHROW(c.validate());
    c.strategies_per_step = 0;
    CHECK_THROWS(c.validate());
    EvolutionConfig d;
    d.ucb_c = 2.5;
    CHECK(EvolutionConfig::from_json(d.to_json()).ucb_c == 2.5);
    CHECK(improver_kind_from_string(to_string(ImproverKind::kBestFirstWithThought)) ==
          ImproverKind::kBestFirstWithThought);
    CHECK_THROWS(improver_kind_from_string("nope"));
  }

  TEST_CASE("a reply without ideas is retried once, then skipped") {
    ValueDomainConfig vc;
    vc.tournament.gops_cards = 4;
    vc.feedback_search.budget = 8;
    vc.feedback_games = 1;
    ValueHeuristicDomain domain(vc);
    llm::Gateway gateway(std::make_shared<llm::MockBackend>(std::vector<llm::PlaybookEntry>{
        {"value_feedback_reflection", -1, "reflections", ""},
        {"value_idea_generation", -1, "I have no ideas.", ""},
    }));
    EvolutionConfig ec;
    Rng rng(1);
    EvolutionContext ctx{domain, gateway, ec, rng};
    StrategyTree tree;
    tree.add(seed_node(HeuristicSpec::builtin("gops_current_score", GameKind::kGops)));
    tree.at("s0").score = 0.0;
    IdeaQueue queue;
    CHECK(generate_ideas(tree, queue, ctx) == 0);
    CHECK(queue.empty());
    CHECK(ctx.warnings.size() == 1);
    CHECK(gateway.requests_made() == 3);
  }

  TEST_CASE("failed children stay in the tree with score 0") {
    ValueDomainConfig vc;
    vc.tournament.gops_cards = 4;
    vc.tournament.games_per_pair = 1;
    vc.tournament.search.budget = 8;
    vc.feedback_search.budget = 8;
    vc.feedback_games = 1;
    ValueHeuristicDomain domain(vc);
    llm::Gateway gateway(std::make_shared<llm::MockBackend>(std::vector<llm::PlaybookEntry>{
        {"value_feedback_reflection", -1, "reflections", ""},
        {"value_idea_generation", -1, read_fixture("generated_ideas_fixture.txt"), ""},
        {"value_implementation", -1, "I cannot write that.", ""},
    }));
    EvolutionConfig ec;
    ec.evolutions = 1;
    const auto r = run_evolution({seed_node(HeuristicSpec::builtin("gops_current_score", GameKind::kGops))}, domain,
                                 gateway, ec);
    REQUIRE(r.tree.size() == 3);
    for (std::size_t i = 1; i < 3; ++i) {
      CHECK_FALSE(r.tree.nodes()[i].usable());
      CHECK(r.tree.nodes()[i].score == 0.0);
    }
    CHECK(r.best == std::vector<std::string>{"s0"});
  }

  TEST_CASE("baselines shape their trees") {
    ValueDomainConfig vc;
    vc.tournament.gops_cards = 4;
    vc.tournament.games_per_pair = 1;
    vc.tournament.search.budget = 8;
    vc.feedback_search.budget = 8;
    vc.feedback_games = 1;
    for (auto kind : {ImproverKind::kGreedySearch, ImproverKind::kBestFirst, ImproverKind::kBestFirstWithThought}) {
      ValueHeuristicDomain domain(vc);
      llm::Gateway gateway(std::make_shared<llm::MockBackend>(std::vector<llm::PlaybookEntry>{
          {"value_feedback_reflection", -1, "reflections", ""},
          {"value_idea_generation", -1, read_fixture("generated_ideas_fixture.txt"), ""},
          {"value_implementation", -1, "#builtin: gops_hand_potential", ""},
      }));
      EvolutionConfig ec;
      ec.evolutions = 2;
      const auto r = run_evolution({seed_node(HeuristicSpec::builtin("gops_current_score", GameKind::kGops))}, domain,
                                   gateway, ec, kind, 2);
      CHECK(r.tree.size() == 5);
      CHECK(r.queue.empty());
      for (const auto& n : r.tree.nodes()) {
        if (n.parent) CHECK(r.tree.contains(*n.parent));
      }
      CHECK(gateway.requests_made() >= 4);
    }
  }
}
