#pragma once

// The Avalon dialogue agent: analyze the discussion into belief updates, plan
// an intended action by search, and turn a dialogue guide plus that intent
// into a speech. Also scores dialogue guides by how other agents read the
// speeches they produce.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strategist/avalon.h"
#include "strategist/belief.h"
#include "strategist/improve.h"
#include "strategist/llm.h"
#include "strategist/prompts.h"
#include "strategist/search.h"

namespace strategist {

// Log-odds increment for an analysis answer: −2 → −1, −1 → −0.5, 0 → 0,
// +1 → +0.5, +2 → +1.
double delta_log_odds(int delta);

// Shifts unpinned p_merlin (`merlin`) or p_evil entries by the deltas'
// log-odds increments. Entries at exactly 0 or 1 stay put.
void apply_deltas(Beliefs& beliefs, const std::map<int, AnalysisEntry>& deltas, bool merlin);

// Next-step action predictions for other seats; empty entries fall back to
// the heuristic profile inside search.
struct PredictedJointPolicy {
  std::map<int, ActionDistribution> per_player;
};

enum class AnalysisKind { kMerlin, kEvil };

struct DialogueConfig {
  // Spoken when a model call fails or returns nothing.
  std::string fallback_utterance = "I have nothing to add this round.";
  double temperature = 0.7;
  // Determinizations used to pick an intent for a seat that is not acting.
  int intent_samples = 16;

  json to_json() const;
  static DialogueConfig from_json(const json& j);
};

// System prompt for in-game prompts of `seat`.
std::string dialogue_system_prompt(const avalon::AvalonState& state, int seat);

// "You would like ..." sentence describing `action` of the current actor.
std::string intent_text(const avalon::AvalonState& state, ActionId action);

// One analysis prompt from `observer`'s view, parsed.
llm::ChatRequest analysis_request(const avalon::AvalonState& state, int observer, AnalysisKind kind);
std::map<int, AnalysisEntry> run_analysis(const avalon::AvalonState& state, int observer, AnalysisKind kind,
                                          llm::Gateway& gateway);

struct AnalysisResult {
  Beliefs beliefs;
  PredictedJointPolicy policy;
  std::vector<std::string> warnings;
};

// Both analysis variants, skipping a variant whose entries are all pinned.
// Parse failures leave the corresponding beliefs unchanged.
AnalysisResult analyze(const avalon::AvalonState& state, int observer, const Beliefs& beliefs, llm::Gateway& gateway);

// Search for the acting observer with belief-weighted determinizations and the
// predicted policies applied to the root stage.
ActionId plan_action(const State& state, const HeuristicHandle& heuristic, const SearchConfig& search,
                     const std::optional<Beliefs>& beliefs = std::nullopt, const PredictedJointPolicy& policy = {});

// The current actor's action the observer would most like to see, by the
// observer's heuristic value averaged over belief-sampled states.
ActionId preferred_action(const avalon::AvalonState& state, int observer, const Beliefs& beliefs,
                          const HeuristicHandle& heuristic, int samples, std::uint64_t seed);

// plan_action when the observer acts, preferred_action otherwise.
ActionId plan_intent(const avalon::AvalonState& state, int observer, const Beliefs& beliefs,
                     const HeuristicHandle& heuristic, const SearchConfig& search, const DialogueConfig& config,
                     const PredictedJointPolicy& policy = {});

struct DialogueOutput {
  std::string worksheet;
  std::string speech;
  bool fallback = false;
  std::optional<std::string> error;
};

// Worksheet answers, then the speech assembled from them.
DialogueOutput generate_dialogue(const avalon::AvalonState& state, int speaker, ActionId intent,
                                 const DialogueGuide& guide, llm::Gateway* gateway, const DialogueConfig& config);

struct Scenario {
  avalon::AvalonState state;
  int speaker = 0;
  ActionId intent = 0;

  json to_json() const;
  static Scenario from_json(const json& j);
};

std::vector<Scenario> load_scenarios(const std::string& path);

// States with a freshly opened discussion window from uniform-random games,
// spoken by the seat holding `role`; intents from preferred_action.
std::vector<Scenario> make_scenarios(avalon::Role role, int count, int num_players, std::uint64_t seed,
                                     const HeuristicHandle& heuristic);

// How a guide's score combines its components. kMinimum: min(z̄_evil,
// z̄_merlin). kEvilSuspicion: z̄_evil alone. Lower is better concealment.
enum class GuideObjective { kMinimum, kEvilSuspicion };

GuideObjective default_objective(avalon::Role role);
std::string to_string(GuideObjective objective);
GuideObjective guide_objective_from_string(const std::string& name);

// kMinimum uses whichever component exists. Throws StrategistError when none
// the objective can use is present.
double combine_guide_score(GuideObjective objective, std::optional<double> z_merlin, std::optional<double> z_evil);

struct ScenarioOutcome {
  int index = 0;
  std::string worksheet;
  std::string speech;
  std::vector<int> merlin_deltas;  // from Evil seats
  std::vector<int> evil_deltas;    // from Good seats
  std::optional<double> z;

  json to_json() const;
};

struct GuideScore {
  std::optional<double> z_merlin;
  std::optional<double> z_evil;
  double z = 0.0;
  int scenarios_used = 0;
  std::vector<ScenarioOutcome> outcomes;
  std::vector<std::string> warnings;

  json to_json() const;
};

// Speaks each scenario with the guide, has every other seat analyze the
// speech, and pools Evil seats' Merlin deltas and Good seats' Evil deltas for
// the speaker. Failing scenarios are dropped with a warning; none left throws.
GuideScore evaluate_guide(const DialogueGuide& guide, const std::vector<Scenario>& scenarios, llm::Gateway& gateway,
                          GuideObjective objective, const DialogueConfig& config = {});

// One seat's agent; owns its beliefs.
class DialogueAgent {
 public:
  struct Options {
    HeuristicHandle heuristic;
    SearchConfig search;
    std::optional<DialogueGuide> guide;
    DialogueConfig dialogue;
  };

  DialogueAgent(int seat, Options options, llm::Gateway* gateway);

  int seat() const { return seat_; }
  const std::optional<Beliefs>& beliefs() const { return beliefs_; }

  // Analyzes speeches added since the last call (needs a gateway).
  void observe(const avalon::AvalonState& state);
  ActionId act(const avalon::AvalonState& state);
  DialogueOutput speak(const avalon::AvalonState& state);

 private:
  void ensure_beliefs(const avalon::AvalonState& state);

  int seat_;
  Options options_;
  llm::Gateway* gateway_;
  std::optional<Beliefs> beliefs_;
  PredictedJointPolicy policy_;
  std::size_t analyzed_ = 0;
  int moves_ = 0;
};

struct DialogueGameConfig {
  int num_players = 5;
  int discussion_rounds = 1;
  std::uint64_t seed = 0;
  HeuristicHandle heuristic;
  SearchConfig search;
  std::optional<DialogueGuide> guide;
  DialogueConfig dialogue;
};

struct DialogueGameResult {
  avalon::AvalonState final_state;
  std::vector<double> returns;
  int speeches = 0;
  int fallback_speeches = 0;
};

// Plays a dialogue-enabled game among agents. With no gateway every speech is
// the fallback utterance and beliefs stay at their priors.
DialogueGameResult play_dialogue_game(const DialogueGameConfig& config, llm::Gateway* gateway);

// Improvement domain for dialogue guides. W = −z.
class GuideDomain final : public StrategyDomain {
 public:
  GuideDomain(avalon::Role role, std::vector<Scenario> scenarios, GuideObjective objective, llm::Gateway& gateway,
              DialogueConfig config = {});

  StrategyKind kind() const override { return StrategyKind::kDialogueGuide; }
  GameKind game() const override { return GameKind::kAvalon; }

  std::vector<KeyState> collect_feedback(const StrategyNode& node, int k, std::uint64_t seed) override;
  std::string render_feedback(const std::vector<KeyState>& states) const override;
  llm::ChatRequest reflection_request(const StrategyNode& node, const std::string& feedback) const override;
  llm::ChatRequest idea_request(const StrategyNode& node, const std::string& reflections,
                                int num_ideas) const override;
  llm::ChatRequest implementation_request(const StrategyNode& node, const std::string& ideas) const override;
  void apply_reply(StrategyNode& child, const std::string& reply) const override;
  std::map<std::string, double> evaluate(const std::vector<const StrategyNode*>& batch, std::uint64_t seed) override;

 private:
  std::map<std::string, std::string> base_slots(const StrategyNode& node) const;
  const GuideScore& score(const StrategyNode& node);

  avalon::Role role_;
  std::vector<Scenario> scenarios_;
  GuideObjective objective_;
  llm::Gateway& gateway_;
  DialogueConfig config_;
  std::map<std::string, GuideScore> scores_;
};

StrategyNode seed_node(const DialogueGuide& guide);

}  // namespace strategist
