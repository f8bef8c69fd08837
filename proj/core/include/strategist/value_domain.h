#pragma once

// Improvement domain for value heuristics: key states come from self-play
// games searched with the heuristic, evaluation is a round-robin tournament.

#include <map>
#include <mutex>

#include "strategist/improve.h"
#include "strategist/selfplay.h"

namespace strategist {

struct ValueDomainConfig {
  GameKind game = GameKind::kGops;
  TournamentConfig tournament;
  // Search used to produce the look-ahead estimates shown as feedback.
  SearchConfig feedback_search;
  int feedback_games = 2;
  ExternalOptions external;

  json to_json() const;
  static ValueDomainConfig from_json(const json& j);
};

// Program text shown to the model for a heuristic: the source of an external
// heuristic, the listing registered with a builtin.
std::string strategy_source(const HeuristicSpec& spec);

// Function-signature instructions appended to implementation requests.
std::string signature_text(GameKind game);

StrategyNode seed_node(const HeuristicSpec& spec);

class ValueHeuristicDomain final : public StrategyDomain {
 public:
  explicit ValueHeuristicDomain(ValueDomainConfig config);

  StrategyKind kind() const override { return StrategyKind::kValueHeuristic; }
  GameKind game() const override { return config_.game; }

  std::vector<KeyState> collect_feedback(const StrategyNode& node, int k, std::uint64_t seed) override;
  llm::ChatRequest reflection_request(const StrategyNode& node, const std::string& feedback) const override;
  llm::ChatRequest idea_request(const StrategyNode& node, const std::string& reflections,
                                int num_ideas) const override;
  llm::ChatRequest implementation_request(const StrategyNode& node, const std::string& ideas) const override;
  void apply_reply(StrategyNode& child, const std::string& reply) const override;
  std::map<std::string, double> evaluate(const std::vector<const StrategyNode*>& batch, std::uint64_t seed) override;

  // Loaded once per node id.
  HeuristicHandle handle(const StrategyNode& node);
  const ValueDomainConfig& config() const { return config_; }

 private:
  std::map<std::string, std::string> base_slots(const StrategyNode& node) const;

  ValueDomainConfig config_;
  std::mutex mu_;
  std::map<std::string, HeuristicHandle> handles_;
};

}  // namespace strategist
