#include "strategist/value_domain.h"

#include "strategist/avalon.h"
#include "strategist/gops.h"

namespace strategist {

namespace {

constexpr const char* kAvalonSignature =
    R"(Your function should be called evaluate_state and take a single argument, a dictionary describing the full game state with these keys:

- 'num_players': the number of players
- 'roles': list of role names by seat ('Merlin', 'Servant', 'Assassin', 'Minion')
- 'phase': one of 'TeamSelection', 'Voting', 'Quest', 'Assassination', 'Terminal'
- 'quest_index': index of the current quest, 0 to 4
- 'quest_results': list of booleans, True for a successful quest
- 'rejection_streak': number of rejected teams in a row
- 'leader': seat of the current leader
- 'proposed_team': list of seats on the proposed team (empty while selecting)

It should return a tuple (values, intermediate_values): values is a tuple with each player's probability of winning, in seat order, and intermediate_values is a dictionary of the named quantities you computed along the way.

Please start with "def evaluate_state(state):" and make sure the function is executable using exec().
)";

}  // namespace

json ValueDomainConfig::to_json() const {
  return {{"game", strategist::to_string(game)},
          {"tournament", tournament.to_json()},
          {"feedback_search", feedback_search.to_json()},
          {"feedback_games", feedback_games},
          {"external_timeout_ms", external.timeout_ms}};
}

ValueDomainConfig ValueDomainConfig::from_json(const json& j) {
  ValueDomainConfig c;
  c.game = game_kind_from_string(j.value("game", std::string("gops")));
  if (j.contains("tournament")) c.tournament = TournamentConfig::from_json(j.at("tournament"));
  c.tournament.game = c.game;
  if (j.contains("feedback_search")) c.feedback_search = SearchConfig::from_json(j.at("feedback_search"));
  c.feedback_games = j.value("feedback_games", c.feedback_games);
  c.external.timeout_ms = j.value("external_timeout_ms", c.external.timeout_ms);
  return c;
}

std::string strategy_source(const HeuristicSpec& spec) {
  if (spec.kind == HeuristicKind::kExternal) return spec.source_text;
  const std::string name = spec.source_text.substr(0, spec.source_text.find(':'));
  const auto& registry = BuiltinRegistry::instance();
  if (registry.contains(name)) return registry.info(name).source;
  return "#builtin: " + spec.source_text + "\n";
}

std::string signature_text(GameKind game) {
  if (game == GameKind::kGops) return llm::prompt_template("gops_signature").text();
  return kAvalonSignature;
}

StrategyNode seed_node(const HeuristicSpec& spec) {
  StrategyNode n;
  n.kind = StrategyKind::kValueHeuristic;
  n.heuristic = spec;
  return n;
}

ValueHeuristicDomain::ValueHeuristicDomain(ValueDomainConfig config) : config_(std::move(config)) {
  config_.tournament.game = config_.game;
  if (config_.feedback_games < 1) throw StrategistError("feedback_games must be at least 1");
}

HeuristicHandle ValueHeuristicDomain::handle(const StrategyNode& node) {
  if (!node.heuristic) throw StrategistError("strategy " + node.id + " has no heuristic");
  std::lock_guard lock(mu_);
  auto it = handles_.find(node.id);
  if (it != handles_.end()) return it->second;
  HeuristicHandle h = load_heuristic(*node.heuristic, config_.external);
  handles_[node.id] = h;
  return h;
}

std::vector<KeyState> ValueHeuristicDomain::collect_feedback(const StrategyNode& node, int k, std::uint64_t seed) {
  const HeuristicHandle h = handle(node);
  std::vector<KeyState> candidates;
  int position = 0;
  for (int g = 0; g < config_.feedback_games; ++g) {
    const std::uint64_t game_seed = mix_seed(seed, static_cast<std::uint64_t>(g));
    StatePtr s;
    if (config_.game == GameKind::kGops) {
      s = std::make_unique<gops::GopsState>(gops::new_game(config_.tournament.gops_cards, game_seed));
    } else {
      s = std::make_unique<avalon::AvalonState>(
          avalon::new_game(config_.tournament.avalon_players, mix_seed(game_seed, 2), 0));
    }
    Rng rng(mix_seed(game_seed, 1));
    const std::size_t first = candidates.size();
    int move = 0;
    while (!s->is_terminal()) {
      if (s->is_chance()) {
        s = s->child(s->chance_outcomes().sample(rng));
        continue;
      }
      const int actor = s->current_actor().seat();
      SearchConfig search = config_.feedback_search;
      search.seed = mix_seed(game_seed, 100 + static_cast<std::uint64_t>(move++));
      const SearchResult result = run_search(*s, h, search);
      const ValueEstimate estimate = h.evaluate(*s);
      KeyState key;
      key.state_text = render_state(*s);
      key.state = s->to_json();
      key.heuristic_output = estimate.raw;
      key.intermediates = estimate.intermediates;
      key.heuristic_value = h.value(*s);
      key.search_estimate = result.root_value_estimate.per_player;
      key.focal_player = actor;
      const double d = key.search_estimate.at(actor) - key.heuristic_value.at(actor);
      key.discrepancy = d * d;
      key.position = position++;
      candidates.push_back(std::move(key));
      s = s->child(result.chosen_action);
    }
    const auto returns = s->returns();
    for (std::size_t i = first; i < candidates.size(); ++i) candidates[i].actual = returns;
  }
  return select_key_states(std::move(candidates), k);
}

std::map<std::string, std::string> ValueHeuristicDomain::base_slots(const StrategyNode& node) const {
  return {{"system_prompt", llm::prompt_template("value_system").text()},
          {"game_rules", llm::prompt_template(config_.game == GameKind::kGops ? "gops_rules" : "avalon_rules").text()},
          {"previous_guide", strategy_source(*node.heuristic)}};
}

llm::ChatRequest ValueHeuristicDomain::reflection_request(const StrategyNode& node, const std::string& feedback) const {
  auto slots = base_slots(node);
  slots["feedback_examples"] = feedback;
  return llm::render("value_feedback_reflection", slots);
}

llm::ChatRequest ValueHeuristicDomain::idea_request(const StrategyNode& node, const std::string& reflections,
                                                    int num_ideas) const {
  auto slots = base_slots(node);
  slots["feedback_reflections"] = reflections;
  slots["num_ideas"] = std::to_string(num_ideas);
  return llm::render("value_idea_generation", slots);
}

llm::ChatRequest ValueHeuristicDomain::implementation_request(const StrategyNode& node,
                                                              const std::string& ideas) const {
  auto slots = base_slots(node);
  slots["improvement_ideas"] = ideas;
  auto request = llm::render("value_implementation", slots);
  request.messages.push_back({"user", signature_text(config_.game)});
  return request;
}

void ValueHeuristicDomain::apply_reply(StrategyNode& child, const std::string& reply) const {
  child.heuristic = parse_heuristic(reply, config_.game);
}

std::map<std::string, double> ValueHeuristicDomain::evaluate(const std::vector<const StrategyNode*>& batch,
                                                             std::uint64_t seed) {
  std::map<std::string, double> w;
  std::vector<Competitor> competitors;
  for (const auto* node : batch) {
    try {
      competitors.push_back({node->id, handle(*node)});
    } catch (const StrategistError&) {
      w[node->id] = 0.0;
    }
  }
  if (competitors.size() < 2) {
    for (const auto& c : competitors) w[c.id] = 0.0;
    return w;
  }
  TournamentConfig t = config_.tournament;
  t.seed = seed;
  t.population_cap = std::max<int>(t.population_cap, static_cast<int>(competitors.size()));
  const EvalReport report = score_population(round_robin(competitors, t));
  for (const auto& c : competitors) w[c.id] = report.score_of(c.id).mean;
  return w;
}

}  // namespace strategist
