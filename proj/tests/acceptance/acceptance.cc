// Acceptance runner: one PASS/FAIL line per criterion. Arguments select
// criteria by number; none runs them all. Exit status is the number of
// failures (capped at 100).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "strategist/avalon.h"
#include "strategist/belief.h"
#include "strategist/dialogue.h"
#include "strategist/gops.h"
#include "strategist/improve.h"
#include "strategist/llm.h"
#include "strategist/search.h"
#include "strategist/selfplay.h"
#include "strategist/stats.h"
#include "strategist/value_domain.h"
#include "strategist/value_net.h"

using namespace strategist;
using avalon::AvalonState;
using avalon::Phase;
using avalon::Role;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::string fixture(const std::string& name) {
  std::ifstream f(std::string(STRATEGIST_FIXTURE_DIR) + "/" + name, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

bool close(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

// 1. Fixture episode.
Outcome gops_fixture() {
  const auto s = gops::replay({2, 4, 5, 1, 3}, {1, 2, 4, 3, 5}, {3, 5, 1, 2, 4});
  const auto r = s.returns();
  const bool ok = s.is_terminal() && s.score(0) == 9 && s.score(1) == 6 && r == std::vector<double>{3.0, -3.0};
  return {ok, fmt("scores %d/%d returns (%+g, %+g)", s.score(0), s.score(1), r[0], r[1])};
}

// 2. Conservation at every transition and seat-swap antisymmetry.
Outcome gops_conservation() {
  Rng rng(2024);
  int violations = 0, asym = 0;
  for (int g = 0; g < 10000; ++g) {
    gops::GopsState s(5);
    while (!s.is_terminal()) {
      auto legal = s.legal_actions();
      s = s.apply(legal[std::uniform_int_distribution<std::size_t>(0, legal.size() - 1)(rng)]);
      if (s.conserved_total() != 15) ++violations;
    }
    const auto swapped = gops::replay(s.score_cards(), s.played(1), s.played(0));
    if (swapped.returns()[0] != -s.returns()[0] || swapped.returns()[1] != -s.returns()[1]) ++asym;
  }
  return {violations == 0 && asym == 0, fmt("%d conservation violations, %d antisymmetry violations", violations, asym)};
}

// 3. Avalon state machine.
const std::vector<Role> kRoles{Role::kMerlin, Role::kServant, Role::kAssassin, Role::kServant, Role::kMinion};

// Leader proposes `team` (or the first legal team), everyone votes `approve`,
// Evil members vote `evil_fail` on the quest.
AvalonState drive_round(AvalonState s, bool approve, bool evil_fail, std::optional<std::vector<int>> team = {}) {
  s = s.apply(team ? avalon::team_mask(*team) : s.legal_actions().front());
  while (s.phase() == Phase::kVoting) s = s.apply(approve ? avalon::kApprove : avalon::kReject);
  while (s.phase() == Phase::kQuest) {
    const int seat = s.current_actor().seat();
    const bool evil = s.side_of_seat(seat) == avalon::Side::kEvil;
    s = s.apply(evil && evil_fail ? avalon::kFail : avalon::kPass);
  }
  return s;
}

std::vector<int> team_with(const AvalonState& s, int seat) {
  std::vector<int> t{seat};
  for (int i = 0; static_cast<int>(t.size()) < s.team_size(); ++i) {
    if (i != seat) t.push_back(i);
  }
  std::sort(t.begin(), t.end());
  return t;
}

std::vector<int> good_team(const AvalonState& s) {
  std::vector<int> t;
  for (int i = 0; i < s.num_players() && static_cast<int>(t.size()) < s.team_size(); ++i) {
    if (s.side_of_seat(i) == avalon::Side::kGood) t.push_back(i);
  }
  return t;
}

Outcome avalon_machine() {
  std::vector<std::string> failed;
  // Fifth proposal goes straight to the quest.
  {
    AvalonState s(kRoles, 0, 0);
    for (int i = 0; i < 4; ++i) {
      s = s.apply(s.legal_actions().front());
      while (s.phase() == Phase::kVoting) s = s.apply(avalon::kReject);
    }
    s = s.apply(s.legal_actions().front());
    if (!(s.phase() == Phase::kQuest && s.proposals().back().forced && s.proposals().back().approved)) {
      failed.push_back("fifth-proposal");
    }
  }
  // Three failed quests.
  {
    AvalonState s(kRoles, 0, 0);
    for (int q = 0; q < 3; ++q) s = drive_round(s, true, true, team_with(s, 2));
    if (!(s.is_terminal() && s.winner() == avalon::Side::kEvil)) failed.push_back("three-fails");
  }
  // Three successes, then both assassination outcomes.
  AvalonState s(kRoles, 0, 0);
  for (int q = 0; q < 3; ++q) s = drive_round(s, true, false, good_team(s));
  if (s.phase() != Phase::kAssassination) {
    failed.push_back("assassination-phase");
  } else {
    const auto hit = s.apply(s.merlin_seat());
    if (!(hit.is_terminal() && hit.winner() == avalon::Side::kEvil)) failed.push_back("merlin-assassinated");
    const auto miss = s.apply(1);
    if (!(miss.is_terminal() && miss.winner() == avalon::Side::kGood)) failed.push_back("non-merlin-target");
  }
  // Random games.
  Rng rng(3);
  UniformRandomPolicy random;
  int bad = 0;
  for (int g = 0; g < 1000; ++g) {
    AvalonState a = avalon::new_game(5 + g % 2, mix_seed(3, g), 0);
    int steps = 0;
    while (!a.is_terminal() && steps++ < 1000) a = a.apply(random.act(a, rng));
    if (!a.is_terminal()) {
      ++bad;
      continue;
    }
    const auto r = a.returns();
    const double good = a.winner() == avalon::Side::kGood ? 1.0 : 0.0;
    for (int i = 0; i < a.num_players(); ++i) {
      const double expected = a.side_of_seat(i) == avalon::Side::kGood ? good : 1.0 - good;
      if (r[i] != expected) {
        ++bad;
        break;
      }
    }
  }
  if (bad) failed.push_back(fmt("%d random games inconsistent", bad));
  std::string detail = failed.empty() ? "all scripted cases and 1000 random games consistent" : "";
  for (const auto& f : failed) detail += f + " ";
  return {failed.empty(), detail};
}

// 4. Search against exhaustive expectimax with a uniform opponent.
double expectimax(const State& s) {
  if (s.is_terminal()) return s.returns()[0];
  const auto legal = s.legal_actions();
  if (s.is_chance() || s.current_actor().seat() == 1) {
    double total = 0.0;
    for (auto a : legal) total += expectimax(*s.child(a));
    return total / static_cast<double>(legal.size());
  }
  double best = -1e18;
  for (auto a : legal) best = std::max(best, expectimax(*s.child(a)));
  return best;
}

Outcome mcts_oracle() {
  auto heuristic = load_heuristic(HeuristicSpec::builtin("gops_current_score", GameKind::kGops, "h"));
  Rng rng(5);
  UniformRandomPolicy random;
  int ok = 0;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    StatePtr s = std::make_unique<gops::GopsState>(3);
    // Mid-game: one round played, two cards left in each hand.
    const int round = 1;
    while (true) {
      if (s->is_chance()) {
        s = s->child(s->chance_outcomes().sample(rng));
        continue;
      }
      const auto& g = static_cast<const gops::GopsState&>(*s);
      if (g.round() == round && s->current_actor().seat() == 0) break;
      s = s->child(random.act(*s, rng));
    }
    SearchConfig cfg;
    cfg.budget = 10000;
    cfg.seed = static_cast<std::uint64_t>(k);
    OpponentModels models;
    models.fixed[1] = [](const State& st) {
      const auto legal = st.legal_actions();
      return ActionDistribution::uniform(legal);
    };
    const auto r = run_search(*s, heuristic, cfg, models);
    bool good = true;
    double best = -1e18, chosen = 0.0;
    for (const auto& av : r.action_values) {
      const double exact = expectimax(*s->child(av.action));
      best = std::max(best, exact);
      if (av.action == r.chosen_action) chosen = exact;
      worst = std::max(worst, std::abs(av.value - exact));
      if (std::abs(av.value - exact) > 0.05) good = false;
    }
    if (chosen < best - 1e-9) good = false;
    ok += good;
  }
  return {ok >= 18, fmt("%d/20 positions within 0.05 and optimal (max error %.4f)", ok, worst)};
}

// 5. Closed-form formulas.
Outcome formulas() {
  std::vector<std::string> failed;
  if (!close(blended_q(0, 123.0, 0.4, 1.0), 0.4)) failed.push_back("blended-N0");
  if (!close(blended_q(1, 1.0, 0.5, 1.0), 0.75)) failed.push_back("blended-0.75");
  if (!close(puct_score({{1.0, 0.5, 0.5, 4.0, 1}}, 1.25), 1.125)) failed.push_back("puct-1.125");
  if (!close(ucb_score(0.2, 1.0, 8, 2), 0.2 + std::sqrt(std::log(8.0) / 2.0))) failed.push_back("ucb");
  IdeaQueue q;
  const auto id = q.add("x");
  Rng rng(9);
  std::vector<double> seen;
  for (int i = 0; i < 50; ++i) {
    const double v = std::uniform_real_distribution<double>(-3, 3)(rng);
    q.update(id, v);
    seen.push_back(v);
    if (!close(q.at(id).score, mean(seen), 1e-9) || q.at(id).tries != i + 1) {
      failed.push_back("running-average");
      break;
    }
  }
  const auto a = anova_oneway({{1, 2, 3}, {2, 3, 4}});
  if (!close(a.f, 1.5)) failed.push_back("anova-1.5");
  const auto z = anova_oneway({{1, 2, 3}, {1, 2, 3}});
  if (!close(z.f, 0.0)) failed.push_back("anova-0");
  std::string detail = failed.empty() ? "blended Q, PUCT, UCB, running average, ANOVA exact" : "";
  for (const auto& f : failed) detail += f + " ";
  return {failed.empty(), detail};
}

// 6. Metropolis-Hastings over role assignments.
Outcome mh_sampling() {
  const AvalonState s(kRoles, 0, 0);
  const int observer = 1;  // Servant
  auto pair_counts = [&](BeliefSampler& sampler, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::map<std::pair<int, int>, int> counts;
    for (const auto& st : sampler.sample(n, rng)) {
      const auto evil = static_cast<const AvalonState&>(*st).evil_seats();
      counts[{evil[0], evil[1]}]++;
    }
    return counts;
  };
  const int n = 10000;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      if (i != observer && j != observer) pairs.push_back({i, j});
    }
  }
  BeliefSampler uniform(s, PlayerId(observer));
  auto counts = pair_counts(uniform, n, 11);
  double tv = 0.0;
  int outside = n;
  for (const auto& p : pairs) {
    tv += std::abs(counts[p] / static_cast<double>(n) - 1.0 / pairs.size());
    outside -= counts[p];
  }
  tv = 0.5 * tv + static_cast<double>(outside) / n;

  const std::vector<double> w{1.0, 1.0, 2.0, 3.0, 4.0};
  BeliefSampler skewed(s, PlayerId(observer));
  skewed.set_role_weight([&](const std::vector<Role>& roles) {
    double x = 1.0;
    for (int i = 0; i < 5; ++i) {
      if (avalon::side_of(roles[i]) == avalon::Side::kEvil) x *= w[i];
    }
    return x;
  });
  auto sk = pair_counts(skewed, n, 12);
  double z = 0.0;
  for (const auto& p : pairs) z += w[p.first] * w[p.second];
  double worst = 0.0;
  for (const auto& p : pairs) {
    const double expected = w[p.first] * w[p.second] / z;
    worst = std::max(worst, std::abs(sk[p] / static_cast<double>(n) - expected) / expected);
  }
  return {tv <= 0.02 && worst <= 0.10, fmt("uniform TV %.4f, skewed max relative error %.3f", tv, worst)};
}

// Playbook shared by the mock evolution criteria.
std::vector<llm::PlaybookEntry> evolution_playbook(const std::string& good_child, const std::string& other_child) {
  return {
      {"value_feedback_reflection", -1,
       "The function ignores the cards still to come, so it misjudges states early in the game.", ""},
      {"value_idea_generation", -1, fixture("generated_ideas_fixture.txt"), ""},
      {"value_implementation", -1, "#builtin: " + good_child, "strategic adjustment component"},
      {"value_implementation", -1, "#builtin: " + other_child, ""},
  };
}

ValueDomainConfig small_gops_domain(std::uint64_t seed) {
  ValueDomainConfig vc;
  vc.game = GameKind::kGops;
  vc.tournament.game = GameKind::kGops;
  vc.tournament.gops_cards = 5;
  vc.tournament.games_per_pair = 2;
  vc.tournament.search.budget = 16;
  vc.tournament.seed = seed;
  vc.feedback_search.budget = 32;
  vc.feedback_games = 1;
  return vc;
}

EvolutionResult mock_run(std::uint64_t seed, ImproverKind kind, const std::string& root, const std::string& good,
                         const std::string& other, ValueDomainConfig vc) {
  llm::Gateway gateway(std::make_shared<llm::MockBackend>(evolution_playbook(good, other)));
  ValueHeuristicDomain domain(vc);
  EvolutionConfig ec;
  ec.evolutions = 2;
  ec.strategies_per_step = 2;
  ec.seed = seed;
  return run_evolution({seed_node(HeuristicSpec::builtin(root, GameKind::kGops))}, domain, gateway, ec, kind);
}

// 7. Mock end-to-end evolution.
Outcome mock_evolution() {
  const auto ideas = parse_ideas(fixture("generated_ideas_fixture.txt"));
  const auto a = mock_run(7, ImproverKind::kStrategist, "constant_zero", "gops_expected_share", "gops_hand_potential",
                          small_gops_domain(7));
  const auto b = mock_run(7, ImproverKind::kStrategist, "constant_zero", "gops_expected_share", "gops_hand_potential",
                          small_gops_domain(7));
  const bool same = a.tree.to_json().dump() == b.tree.to_json().dump() &&
                    a.queue.to_json().dump() == b.queue.to_json().dump() && a.report.dump() == b.report.dump();
  bool running = !a.queue.empty();
  int updates = 0;
  for (const auto& idea : a.queue.ideas()) {
    updates += idea.tries;
    if (idea.tries != static_cast<int>(idea.improvements.size())) running = false;
    if (idea.tries > 0 && !close(idea.score, mean(idea.improvements), 1e-9)) running = false;
  }
  const bool ok = ideas.size() == 2 && same && a.tree.size() == 5 && running && updates == 4;
  return {ok, fmt("%zu ideas parsed, %zu nodes, reproducible %s, %d idea updates consistent %s", ideas.size(),
                  a.tree.size(), same ? "yes" : "no", updates, running ? "yes" : "no")};
}

// 8. Improvement-method differentiation.
Outcome differentiation() {
  // The seed only counts the points won so far; the playbook's strong child
  // also credits each player a share of the prizes still in play.
  const std::string root = "gops_current_score";
  const auto result = mock_run(8, ImproverKind::kStrategist, root, "gops_expected_share", "gops_strategic_adjustment",
                               small_gops_domain(8));
  const auto& best = result.tree.at(result.best.front());
  TournamentConfig tc;
  tc.game = GameKind::kGops;
  tc.gops_cards = 5;
  tc.games_per_pair = 100;
  tc.search.budget = 32;
  tc.seed = 808;
  const auto report = score_population(round_robin(
      {{"best", load_heuristic(*best.heuristic)},
       {"seed", load_heuristic(HeuristicSpec::builtin(root, GameKind::kGops))}},
      tc));
  const auto& s = report.score_of("best");
  const bool beats = s.se && s.mean > 2.0 * *s.se;

  const auto line = mock_run(8, ImproverKind::kLineSearch, root, "gops_expected_share", "gops_strategic_adjustment",
                             small_gops_domain(8));
  bool chain = true;
  std::map<std::string, int> children;
  for (const auto& n : line.tree.nodes()) {
    if (n.parent) children[*n.parent]++;
  }
  for (std::size_t i = 1; i < line.tree.nodes().size(); ++i) {
    const auto& n = line.tree.nodes()[i];
    if (!n.parent || *n.parent != line.tree.nodes()[i - 1].id) chain = false;
  }
  for (const auto& [id, c] : children) {
    if (c > 1) chain = false;
  }
  return {beats && chain, fmt("best %s (%s) vs seed: mean %+.3f se %.3f over %d games; line search chain %s",
                              best.id.c_str(), best.heuristic->source_text.c_str(), s.mean, s.se.value_or(0.0),
                              s.games, chain ? "yes" : "no")};
}

// 9. Neural value baseline.
Outcome rl_baseline() {
  Rng rng(99);
  Mlp net(7, {5, 4}, 2, 3);
  std::vector<Sample> batch;
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < 6; ++i) {
    Sample s;
    for (int k = 0; k < 7; ++k) s.x.push_back(nd(rng));
    s.y = {nd(rng), nd(rng)};
    batch.push_back(s);
  }
  std::vector<double> grad;
  net.loss_and_gradient(batch, grad);
  double max_rel = 0.0;
  auto params = net.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double h = 1e-6;
    auto p = params;
    p[i] += h;
    net.set_parameters(p);
    const double up = net.loss(batch);
    p[i] -= 2 * h;
    net.set_parameters(p);
    const double down = net.loss(batch);
    const double numeric = (up - down) / (2 * h);
    max_rel = std::max(max_rel, std::abs(numeric - grad[i]) / std::max(1e-6, std::abs(numeric) + std::abs(grad[i])));
  }
  net.set_parameters(params);

  const RlConfig cfg = RlConfig::defaults(GameKind::kGops);
  int decreasing = 0;
  std::optional<ValueModel> first;
  std::string losses;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RlReport report;
    auto model = rl_train(cfg, seed, &report);
    const bool down = report.loss_before.back() < report.loss_before.front();
    decreasing += down;
    losses += fmt("%.2f->%.2f ", report.loss_before.front(), report.loss_before.back());
    if (!first) first = std::move(model);
  }
  TournamentConfig tc;
  tc.game = GameKind::kGops;
  tc.gops_cards = first->size_parameter;
  tc.games_per_pair = 100;
  tc.search.budget = 64;
  tc.seed = 909;
  const auto report = score_population(round_robin(
      {{"rl", rl_heuristic(*first)},
       {"zero", load_heuristic(HeuristicSpec::builtin("constant_zero", GameKind::kGops))}},
      tc));
  const auto& s = report.score_of("rl");
  const bool beats = s.se && s.mean > 2.0 * *s.se;
  return {max_rel < 1e-4 && decreasing >= 4 && beats,
          fmt("gradient max rel err %.2e; loss fell on %d/5 seeds (%s); rl vs zero mean %+.3f se %.3f", max_rel,
              decreasing, losses.c_str(), s.mean, s.se.value_or(0.0))};
}

// 10. Dialogue pipeline.
Outcome dialogue_pipeline() {
  std::vector<std::string> failed;
  const auto merlin = parse_analysis(fixture("analysis_merlin_fixture.txt"));
  const auto evil = parse_analysis(fixture("analysis_evil_fixture.txt"));
  auto deltas = [](const std::map<int, AnalysisEntry>& m) {
    std::vector<int> d;
    for (const auto& [k, v] : m) d.push_back(k * 10 + v.delta);
    return d;
  };
  if (deltas(merlin) != std::vector<int>{0, 10, 22, 30, 38}) failed.push_back("merlin-fixture");
  if (deltas(evil) != std::vector<int>{-1, 9, 21, 31, 42}) failed.push_back("evil-fixture");

  // Mock analyzers answering by seat: Merlin deltas 2,1,0,-1,-2; Evil deltas -1,0,1,2,-2.
  const std::vector<int> md{2, 1, 0, -1, -2}, ed{-1, 0, 1, 2, -2};
  auto dict = [](const std::vector<int>& d) {
    std::string s = "Thought:\nReading the speech.\n\nDictionary:\n{";
    for (std::size_t i = 0; i < d.size(); ++i) {
      s += (i ? ", " : "") + std::to_string(i) + ": (" + std::to_string(d[i]) + ", '" + delta_labels()[d[i] + 2] + "')";
    }
    return s + "}";
  };
  llm::Gateway gateway(std::make_shared<llm::MockBackend>(std::vector<llm::PlaybookEntry>{
      {"worksheet_fill", -1, "Q1: I want a team I trust.", ""},
      {"speech_generation", -1, "I think we should trust the leader's choice this round.", ""},
      {"analysis_merlin", -1, dict(md), ""},
      {"analysis_evil", -1, dict(ed), ""},
  }));
  auto heuristic = load_heuristic(HeuristicSpec::builtin("avalon_quest_progress", GameKind::kAvalon));
  const auto scenarios = make_scenarios(Role::kMerlin, 3, 5, 10, heuristic);
  const auto guide = parse_guide("Questions to fill out before speaking\n1. Who do you trust?\n2. What team do you want?");
  const auto score = evaluate_guide(guide, scenarios, gateway, GuideObjective::kMinimum);
  double zm = 0.0, ze = 0.0;
  for (const auto& sc : scenarios) {
    zm += md[sc.speaker];
    ze += ed[sc.speaker];
  }
  zm /= scenarios.size();
  ze /= scenarios.size();
  if (!(score.z_merlin && score.z_evil && close(*score.z_merlin, zm) && close(*score.z_evil, ze) &&
        close(score.z, std::min(zm, ze)))) {
    failed.push_back("guide-score");
  }

  DialogueGameConfig gc;
  gc.num_players = 5;
  gc.discussion_rounds = 1;
  gc.seed = 10;
  gc.heuristic = heuristic;
  gc.search.budget = 16;
  int speeches = 0;
  try {
    const auto game = play_dialogue_game(gc, nullptr);
    speeches = game.speeches;
    if (!game.final_state.is_terminal() || game.speeches == 0 || game.fallback_speeches != game.speeches) {
      failed.push_back("fallback-game");
    }
  } catch (const std::exception& e) {
    failed.push_back(std::string("fallback-game: ") + e.what());
  }
  std::string detail = fmt("guide z %.3f (merlin %.3f, evil %.3f); fallback game with %d speeches ", score.z,
                           score.z_merlin.value_or(NAN), score.z_evil.value_or(NAN), speeches);
  for (const auto& f : failed) detail += f + " ";
  return {failed.empty(), detail};
}

// 11. Search budget scaling with a weak heuristic.
Outcome budget_scaling() {
  auto weak = load_heuristic(HeuristicSpec::builtin("constant_zero", GameKind::kGops));
  std::map<int, double> means;
  for (int budget : {16, 64, 256}) {
    SearchConfig cfg;
    cfg.budget = budget;
    std::vector<double> scores;
    for (int g = 0; g < 300; ++g) {
      const int seat = g % 2;
      cfg.seed = mix_seed(1100 + static_cast<std::uint64_t>(budget), g);
      std::vector<PolicyPtr> policies(2);
      policies[seat] = std::make_shared<SearchPolicy>(weak, cfg);
      policies[1 - seat] = std::make_shared<UniformRandomPolicy>();
      const auto t = rollout(gops::GopsState(5), StrategicProfile(policies), mix_seed(11, g));
      scores.push_back(t.final_returns[seat]);
    }
    means[budget] = mean(scores);
  }
  return {means[256] >= means[16] - 0.1,
          fmt("mean point difference vs uniform: 16 -> %+.3f, 64 -> %+.3f, 256 -> %+.3f", means[16], means[64],
              means[256])};
}

struct Criterion {
  int number;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "GOPS rules fixture", 1, gops_fixture},
      {2, "GOPS conservation and antisymmetry", 30, gops_conservation},
      {3, "Avalon state machine", 30, avalon_machine},
      {4, "search vs expectimax oracle", 120, mcts_oracle},
      {5, "formula suite", 1, formulas},
      {6, "belief sampling", 30, mh_sampling},
      {7, "mock evolution end to end", 120, mock_evolution},
      {8, "improvement-method differentiation", 300, differentiation},
      {9, "neural value baseline", 600, rl_baseline},
      {10, "dialogue pipeline", 60, dialogue_pipeline},
      {11, "budget scaling", 600, budget_scaling},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.number)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("criterion %2d %s: %s (%s) [%.2fs of %.0fs]\n", c.number, c.name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.limit_s);
    std::fflush(stdout);
  }
  return std::min(failures, 100);
}
