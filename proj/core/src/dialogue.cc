#include "strategist/dialogue.h"

#include <cmath>
#include <fstream>

namespace strategist {

using avalon::AvalonState;
using avalon::Phase;
using avalon::Role;
using avalon::Side;

namespace {

std::string team_text(avalon::TeamMask mask) {
  const auto members = avalon::team_members(mask);
  std::string s = "[";
  for (std::size_t i = 0; i < members.size(); ++i) s += (i ? ", " : "") + std::to_string(members[i]);
  return s + "]";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::string state_description(const AvalonState& state, int viewer, std::optional<ActionId> intent) {
  std::string s = avalon::describe_state(state, viewer);
  if (intent) s += "\n" + intent_text(state, *intent) + "\n";
  return s;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

double delta_log_odds(int delta) {
  if (delta < -2 || delta > 2) throw StrategistError("analysis delta outside -2..2");
  return 0.5 * delta;
}

void apply_deltas(Beliefs& beliefs, const std::map<int, AnalysisEntry>& deltas, bool merlin) {
  auto& p = merlin ? beliefs.p_merlin : beliefs.p_evil;
  const auto& pinned = merlin ? beliefs.pinned_merlin : beliefs.pinned_evil;
  for (const auto& [player, entry] : deltas) {
    if (player < 0 || player >= static_cast<int>(p.size())) continue;
    const auto i = static_cast<std::size_t>(player);
    if (pinned[i] || p[i] <= 0.0 || p[i] >= 1.0) continue;
    const double x = logit(p[i]) + delta_log_odds(entry.delta);
    p[i] = 1.0 / (1.0 + std::exp(-x));
  }
}

json DialogueConfig::to_json() const {
  return {{"fallback_utterance", fallback_utterance}, {"temperature", temperature}, {"intent_samples", intent_samples}};
}

DialogueConfig DialogueConfig::from_json(const json& j) {
  DialogueConfig c;
  c.fallback_utterance = j.value("fallback_utterance", c.fallback_utterance);
  c.temperature = j.value("temperature", c.temperature);
  c.intent_samples = j.value("intent_samples", c.intent_samples);
  if (c.intent_samples < 1) throw StrategistError("intent_samples must be at least 1");
  return c;
}

std::string dialogue_system_prompt(const AvalonState& state, int seat) {
  return "You are Player " + std::to_string(seat) + " in a game of The Resistance: Avalon with " +
         std::to_string(state.num_players()) + " players. Your role is " + avalon::to_string(state.role_of(seat)) +
         ".";
}

std::string intent_text(const AvalonState& state, ActionId action) {
  switch (state.phase()) {
    case Phase::kTeamSelection:
      return "You would like the following team to be approved:  " +
             team_text(static_cast<avalon::TeamMask>(action));
    case Phase::kVoting:
      return "You would like the following team to be " +
             std::string(action == avalon::kApprove ? "approved" : "rejected") + ":  " +
             team_text(state.proposed_team());
    case Phase::kQuest:
      return std::string("You would like the quest to ") + (action == avalon::kPass ? "succeed." : "fail.");
    case Phase::kAssassination:
      return "You would like Player " + std::to_string(action) + " to be assassinated.";
    case Phase::kTerminal:
      break;
  }
  throw StrategistError("no intent in a finished game");
}

llm::ChatRequest analysis_request(const AvalonState& state, int observer, AnalysisKind kind) {
  return llm::render(kind == AnalysisKind::kMerlin ? "analysis_merlin" : "analysis_evil",
                     {{"system_prompt", dialogue_system_prompt(state, observer)},
                      {"game_rules", llm::prompt_template("avalon_rules").text()},
                      {"discussion_history", render_discussion_history(state)},
                      {"state_description", state_description(state, observer, std::nullopt)},
                      {"players", player_set_text(state.num_players())}});
}

std::map<int, AnalysisEntry> run_analysis(const AvalonState& state, int observer, AnalysisKind kind,
                                          llm::Gateway& gateway) {
  return parse_analysis(gateway.complete(analysis_request(state, observer, kind)));
}

AnalysisResult analyze(const AvalonState& state, int observer, const Beliefs& beliefs, llm::Gateway& gateway) {
  AnalysisResult result;
  result.beliefs = beliefs;
  for (AnalysisKind kind : {AnalysisKind::kMerlin, AnalysisKind::kEvil}) {
    const bool merlin = kind == AnalysisKind::kMerlin;
    const auto& pinned = merlin ? beliefs.pinned_merlin : beliefs.pinned_evil;
    if (std::all_of(pinned.begin(), pinned.end(), [](bool b) { return b; })) continue;
    try {
      apply_deltas(result.beliefs, run_analysis(state, observer, kind, gateway), merlin);
    } catch (const ParseError& e) {
      result.warnings.push_back(std::string(merlin ? "merlin" : "evil") + " analysis unparseable: " + e.what());
    } catch (const llm::LlmError& e) {
      result.warnings.push_back(std::string(merlin ? "merlin" : "evil") + " analysis failed: " + e.what());
    }
  }
  return result;
}

ActionId plan_action(const State& state, const HeuristicHandle& heuristic, const SearchConfig& search,
                     const std::optional<Beliefs>& beliefs, const PredictedJointPolicy& policy) {
  OpponentModels models;
  models.beliefs = beliefs;
  models.root_stage = policy.per_player;
  return run_search(state, heuristic, search, models).chosen_action;
}

ActionId preferred_action(const AvalonState& state, int observer, const Beliefs& beliefs,
                          const HeuristicHandle& heuristic, int samples, std::uint64_t seed) {
  const auto actions = state.legal_actions();
  if (actions.empty()) throw StrategistError("no action to prefer in a finished game");
  BeliefSampler sampler(state, PlayerId(observer));
  sampler.set_beliefs(beliefs);
  Rng rng(seed);
  const auto worlds = sampler.sample(samples, rng);
  std::vector<double> value(actions.size(), 0.0);
  for (const auto& w : worlds) {
    for (std::size_t i = 0; i < actions.size(); ++i) {
      value[i] += heuristic.value(*w->child(actions[i])).at(static_cast<std::size_t>(observer));
    }
  }
  return actions[static_cast<std::size_t>(std::max_element(value.begin(), value.end()) - value.begin())];
}

ActionId plan_intent(const AvalonState& state, int observer, const Beliefs& beliefs, const HeuristicHandle& heuristic,
                     const SearchConfig& search, const DialogueConfig& config, const PredictedJointPolicy& policy) {
  if (state.current_actor() == PlayerId(observer)) return plan_action(state, heuristic, search, beliefs, policy);
  return preferred_action(state, observer, beliefs, heuristic, config.intent_samples,
                          mix_seed(search.seed, static_cast<std::uint64_t>(observer) + 17));
}

DialogueOutput generate_dialogue(const AvalonState& state, int speaker, ActionId intent, const DialogueGuide& guide,
                                 llm::Gateway* gateway, const DialogueConfig& config) {
  DialogueOutput out;
  if (!gateway) {
    out.speech = config.fallback_utterance;
    out.fallback = true;
    return out;
  }
  const std::string system = dialogue_system_prompt(state, speaker);
  try {
    auto fill = llm::render("worksheet_fill", {{"system_prompt", system},
                                               {"game_rules", llm::prompt_template("avalon_rules").text()},
                                               {"discussion_history", render_discussion_history(state)},
                                               {"state_description", state_description(state, speaker, intent)},
                                               {"guide", guide.worksheet_text()}});
    fill.temperature = config.temperature;
    out.worksheet = gateway->complete(fill);
    auto speech = llm::render("speech_generation", {{"system_prompt", system}, {"worksheet", out.worksheet}});
    speech.temperature = config.temperature;
    out.speech = trim(gateway->complete(speech));
    if (out.speech.empty()) out.error = "empty speech";
  } catch (const llm::LlmError& e) {
    out.error = e.what();
  }
  if (out.error) {
    out.speech = config.fallback_utterance;
    out.fallback = true;
  }
  return out;
}

json Scenario::to_json() const {
  return {{"state", state.to_json()}, {"speaker", speaker}, {"intent", state.action_to_json(intent)}};
}

Scenario Scenario::from_json(const json& j) {
  Scenario s{AvalonState::from_json(j.at("state")), j.at("speaker").get<int>(), 0};
  if (s.speaker < 0 || s.speaker >= s.state.num_players()) throw StrategistError("scenario speaker is not a seat");
  s.intent = s.state.action_from_json(j.at("intent"));
  if (!s.state.is_legal(s.intent)) throw StrategistError("scenario intent is not a legal action");
  return s;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StrategistError("cannot read scenarios '" + path + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array()) throw StrategistError("scenario file must be a JSON list");
  std::vector<Scenario> out;
  for (const auto& s : j) out.push_back(Scenario::from_json(s));
  return out;
}

std::vector<Scenario> make_scenarios(Role role, int count, int num_players, std::uint64_t seed,
                                     const HeuristicHandle& heuristic) {
  std::vector<Scenario> out;
  UniformRandomPolicy random;
  for (std::uint64_t g = 0; static_cast<int>(out.size()) < count && g < static_cast<std::uint64_t>(count) * 20; ++g) {
    AvalonState s = avalon::new_game(num_players, mix_seed(seed, g), 1);
    Rng rng(mix_seed(seed, g + 1000003));
    const auto& roles = s.roles();
    const int speaker = static_cast<int>(std::find(roles.begin(), roles.end(), role) - roles.begin());
    // One scenario per game keeps them independent; the window is taken at a
    // random quest.
    const int target_quest = std::uniform_int_distribution<int>(0, 2)(rng);
    while (!s.is_terminal()) {
      if (s.discussion_open() && s.speeches_in_window() == 0 &&
          (s.quest_index() >= target_quest || s.phase() == Phase::kAssassination)) {
        const Beliefs prior = Beliefs::prior(s, speaker);
        const ActionId intent = preferred_action(s, speaker, prior, heuristic, 8, mix_seed(seed, g + 7));
        out.push_back({s, speaker, intent});
        break;
      }
      s = s.apply(random.act(s, rng));
    }
  }
  if (static_cast<int>(out.size()) < count) throw StrategistError("could not build enough scenarios");
  return out;
}

GuideObjective default_objective(Role role) {
  return role == Role::kMerlin ? GuideObjective::kMinimum : GuideObjective::kEvilSuspicion;
}

std::string to_string(GuideObjective objective) {
  return objective == GuideObjective::kMinimum ? "minimum" : "evil_suspicion";
}

GuideObjective guide_objective_from_string(const std::string& name) {
  if (name == "minimum") return GuideObjective::kMinimum;
  if (name == "evil_suspicion") return GuideObjective::kEvilSuspicion;
  throw StrategistError("unknown guide objective '" + name + "'");
}

double combine_guide_score(GuideObjective objective, std::optional<double> z_merlin, std::optional<double> z_evil) {
  if (objective == GuideObjective::kEvilSuspicion) {
    if (!z_evil) throw StrategistError("no Good-side analyses to score the guide");
    return *z_evil;
  }
  if (z_merlin && z_evil) return std::min(*z_merlin, *z_evil);
  if (z_merlin) return *z_merlin;
  if (z_evil) return *z_evil;
  throw StrategistError("no analyses to score the guide");
}

json ScenarioOutcome::to_json() const {
  return {{"index", index},
          {"worksheet", worksheet},
          {"speech", speech},
          {"merlin_deltas", merlin_deltas},
          {"evil_deltas", evil_deltas},
          {"z", z ? json(*z) : json(nullptr)}};
}

json GuideScore::to_json() const {
  json outs = json::array();
  for (const auto& o : outcomes) outs.push_back(o.to_json());
  return {{"z", z},
          {"z_merlin", z_merlin ? json(*z_merlin) : json(nullptr)},
          {"z_evil", z_evil ? json(*z_evil) : json(nullptr)},
          {"scenarios_used", scenarios_used},
          {"outcomes", outs},
          {"warnings", warnings}};
}

namespace {

std::optional<double> mean_of(const std::vector<int>& xs) {
  if (xs.empty()) return std::nullopt;
  double s = 0.0;
  for (int x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

GuideScore evaluate_guide(const DialogueGuide& guide, const std::vector<Scenario>& scenarios, llm::Gateway& gateway,
                          GuideObjective objective, const DialogueConfig& config) {
  GuideScore score;
  std::vector<int> merlin_all, evil_all;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& sc = scenarios[i];
    ScenarioOutcome outcome;
    outcome.index = static_cast<int>(i);
    try {
      const DialogueOutput said = generate_dialogue(sc.state, sc.speaker, sc.intent, guide, &gateway, config);
      if (said.error) throw StrategistError("dialogue generation failed: " + *said.error);
      outcome.worksheet = said.worksheet;
      outcome.speech = said.speech;
      const AvalonState after = sc.state.record_dialogue(PlayerId(sc.speaker), said.speech);
      for (int seat = 0; seat < after.num_players(); ++seat) {
        if (seat == sc.speaker) continue;
        const bool evil = after.side_of_seat(seat) == Side::kEvil;
        const auto deltas = run_analysis(after, seat, evil ? AnalysisKind::kMerlin : AnalysisKind::kEvil, gateway);
        auto it = deltas.find(sc.speaker);
        if (it == deltas.end()) throw ParseError("analysis omits the speaker", "");
        (evil ? outcome.merlin_deltas : outcome.evil_deltas).push_back(it->second.delta);
      }
      outcome.z = combine_guide_score(objective, mean_of(outcome.merlin_deltas), mean_of(outcome.evil_deltas));
    } catch (const StrategistError& e) {
      score.warnings.push_back("scenario " + std::to_string(i) + " dropped: " + e.what());
      continue;
    }
    merlin_all.insert(merlin_all.end(), outcome.merlin_deltas.begin(), outcome.merlin_deltas.end());
    evil_all.insert(evil_all.end(), outcome.evil_deltas.begin(), outcome.evil_deltas.end());
    score.outcomes.push_back(std::move(outcome));
  }
  score.scenarios_used = static_cast<int>(score.outcomes.size());
  if (score.scenarios_used == 0) throw StrategistError("no scenario could be scored");
  score.z_merlin = mean_of(merlin_all);
  score.z_evil = mean_of(evil_all);
  score.z = combine_guide_score(objective, score.z_merlin, score.z_evil);
  return score;
}

DialogueAgent::DialogueAgent(int seat, Options options, llm::Gateway* gateway)
    : seat_(seat), options_(std::move(options)), gateway_(gateway) {}

void DialogueAgent::ensure_beliefs(const AvalonState& state) {
  if (!beliefs_) beliefs_ = Beliefs::prior(state, seat_);
}

void DialogueAgent::observe(const AvalonState& state) {
  ensure_beliefs(state);
  if (!gateway_ || state.discussion_log().size() <= analyzed_) return;
  analyzed_ = state.discussion_log().size();
  AnalysisResult r = analyze(state, seat_, *beliefs_, *gateway_);
  beliefs_ = std::move(r.beliefs);
  policy_ = std::move(r.policy);
}

ActionId DialogueAgent::act(const AvalonState& state) {
  ensure_beliefs(state);
  SearchConfig search = options_.search;
  search.seed = mix_seed(options_.search.seed, static_cast<std::uint64_t>(seat_) * 7919 + moves_++);
  return plan_action(state, options_.heuristic, search, beliefs_, policy_);
}

DialogueOutput DialogueAgent::speak(const AvalonState& state) {
  ensure_beliefs(state);
  SearchConfig search = options_.search;
  search.seed = mix_seed(options_.search.seed, static_cast<std::uint64_t>(seat_) * 7919 + moves_++);
  const ActionId intent = plan_intent(state, seat_, *beliefs_, options_.heuristic, search, options_.dialogue, policy_);
  if (!options_.guide) {
    DialogueOutput out;
    out.speech = options_.dialogue.fallback_utterance;
    out.fallback = true;
    return out;
  }
  return generate_dialogue(state, seat_, intent, *options_.guide, gateway_, options_.dialogue);
}

DialogueGameResult play_dialogue_game(const DialogueGameConfig& config, llm::Gateway* gateway) {
  if (!config.heuristic.valid()) throw StrategistError("dialogue game needs a heuristic");
  AvalonState s = avalon::new_game(config.num_players, config.seed, config.discussion_rounds);
  std::vector<DialogueAgent> agents;
  for (int seat = 0; seat < config.num_players; ++seat) {
    SearchConfig search = config.search;
    search.seed = mix_seed(config.seed, 100 + static_cast<std::uint64_t>(seat));
    agents.emplace_back(seat, DialogueAgent::Options{config.heuristic, search, config.guide, config.dialogue}, gateway);
  }
  DialogueGameResult result{s, {}, 0, 0};
  while (!s.is_terminal()) {
    if (s.discussion_open()) {
      const int speaker = *s.next_speaker();
      agents[static_cast<std::size_t>(speaker)].observe(s);
      const DialogueOutput said = agents[static_cast<std::size_t>(speaker)].speak(s);
      s = s.record_dialogue(PlayerId(speaker), said.speech);
      ++result.speeches;
      if (said.fallback) ++result.fallback_speeches;
      continue;
    }
    const int actor = s.current_actor().seat();
    agents[static_cast<std::size_t>(actor)].observe(s);
    s = s.apply(agents[static_cast<std::size_t>(actor)].act(s));
  }
  result.returns = s.returns();
  result.final_state = s;
  return result;
}

GuideDomain::GuideDomain(Role role, std::vector<Scenario> scenarios, GuideObjective objective, llm::Gateway& gateway,
                         DialogueConfig config)
    : role_(role), scenarios_(std::move(scenarios)), objective_(objective), gateway_(gateway),
      config_(std::move(config)) {
  if (scenarios_.empty()) throw StrategistError("guide improvement needs scenarios");
}

const GuideScore& GuideDomain::score(const StrategyNode& node) {
  auto it = scores_.find(node.id);
  if (it != scores_.end()) return it->second;
  if (!node.guide) throw StrategistError("strategy " + node.id + " has no guide");
  return scores_.emplace(node.id, evaluate_guide(*node.guide, scenarios_, gateway_, objective_, config_)).first->second;
}

std::vector<KeyState> GuideDomain::collect_feedback(const StrategyNode& node, int k, std::uint64_t) {
  const GuideScore& s = score(node);
  std::vector<KeyState> out;
  for (const auto& o : s.outcomes) {
    const Scenario& sc = scenarios_[static_cast<std::size_t>(o.index)];
    KeyState key;
    key.state_text = state_description(sc.state, sc.speaker, sc.intent);
    key.state = sc.to_json();
    key.intermediates["worksheet"] = o.worksheet;
    key.intermediates["speech"] = o.speech;
    const auto zm = mean_of(o.merlin_deltas), ze = mean_of(o.evil_deltas);
    key.intermediates["merlin_suspicion"] = zm ? ordered_json(*zm) : ordered_json(nullptr);
    key.intermediates["evil_suspicion"] = ze ? ordered_json(*ze) : ordered_json(nullptr);
    key.focal_player = sc.speaker;
    key.discrepancy = o.z.value_or(0.0);
    key.position = o.index;
    out.push_back(std::move(key));
  }
  return select_key_states(std::move(out), k);
}

std::string GuideDomain::render_feedback(const std::vector<KeyState>& states) const {
  std::string out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& k = states[i];
    auto number = [](const ordered_json& v) { return v.is_null() ? std::string("n/a") : py_repr(v); };
    if (i) out += "\n";
    out += "Example " + std::to_string(i + 1) + ":\n\n";
    out += "The scenario was:\n\n" + k.state_text + "\n";
    out += "Your answers to the worksheet were:\n\n" + k.intermediates.value("worksheet", std::string()) + "\n\n";
    out += "The speech you gave was:\n\n\"" + k.intermediates.value("speech", std::string()) + "\"\n\n";
    out += "After the speech, the average change in how likely the Evil players thought you were Merlin was " +
           number(k.intermediates.at("merlin_suspicion")) +
           ", and the average change in how likely the Good players thought you were Evil was " +
           number(k.intermediates.at("evil_suspicion")) + " (from -2, decreased significantly, to 2, increased "
           "significantly).\n";
  }
  return out;
}

std::map<std::string, std::string> GuideDomain::base_slots(const StrategyNode& node) const {
  const std::string role = avalon::to_string(role_);
  return {{"system_prompt", llm::prompt_template("guide_system").render({{"role", role}})},
          {"game_rules", llm::prompt_template("avalon_rules").text()},
          {"previous_guide", node.guide ? node.guide->to_text() : std::string()}};
}

llm::ChatRequest GuideDomain::reflection_request(const StrategyNode& node, const std::string& feedback) const {
  auto slots = base_slots(node);
  slots["feedback_examples"] = feedback;
  return llm::render("guide_feedback_reflection", slots);
}

llm::ChatRequest GuideDomain::idea_request(const StrategyNode& node, const std::string& reflections,
                                           int num_ideas) const {
  auto slots = base_slots(node);
  slots["feedback_reflections"] = reflections;
  slots["num_ideas"] = std::to_string(num_ideas);
  return llm::render("guide_idea_generation", slots);
}

llm::ChatRequest GuideDomain::implementation_request(const StrategyNode& node, const std::string& ideas) const {
  auto slots = base_slots(node);
  slots["improvement_idea"] = ideas;
  slots["guide_signature"] = llm::prompt_template("guide_signature").render({{"role", avalon::to_string(role_)}});
  return llm::render("guide_implementation", slots);
}

void GuideDomain::apply_reply(StrategyNode& child, const std::string& reply) const { child.guide = parse_guide(reply); }

std::map<std::string, double> GuideDomain::evaluate(const std::vector<const StrategyNode*>& batch, std::uint64_t) {
  std::map<std::string, double> w;
  for (const auto* node : batch) {
    try {
      w[node->id] = -score(*node).z;
    } catch (const StrategistError&) {
      w[node->id] = 0.0;
    }
  }
  return w;
}

StrategyNode seed_node(const DialogueGuide& guide) {
  StrategyNode n;
  n.kind = StrategyKind::kDialogueGuide;
  n.guide = guide;
  return n;
}

}  // namespace strategist
