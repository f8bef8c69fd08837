#pragma once

// Information-set Monte Carlo tree search driven by a value heuristic.
//
// Each rollout determinizes the root by sampling a hidden state consistent
// with the searcher's information set, then descends by maximising an
// information-set PUCT score for whichever player acts. Statistics are kept
// per concrete state; PUCT averages them over the states of the acting
// player's information set, weighted by how often each was visited.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "strategist/belief.h"
#include "strategist/heuristics.h"

namespace strategist {

struct SearchConfig {
  int budget = 64;
  double c_puct = 1.25;
  double alpha = 1.0;
  int max_depth = 256;
  std::uint64_t seed = 0;
  MhConfig mh;
  // Chance and modelled-player outcomes are chosen to track their
  // probabilities (largest deficit first) instead of being sampled.
  bool stratified_chance = true;
  // Optional JSON-lines dump of every rollout path and leaf value.
  std::string rollout_log;

  json to_json() const;
  static SearchConfig from_json(const json& j);
};

// (N·Q_emp + α·Q̂)/(N + α); exactly Q̂ when N = 0.
double blended_q(int visits, double q_emp, double q_hat, double alpha);

// One state's contribution to an information-set PUCT score.
struct PuctTerm {
  double belief = 0.0;  // π_B(s|I)
  double q = 0.0;       // blended Q(s,a)
  double prior = 0.0;   // P(s,a)
  double parent_visits = 0.0;  // Σ_b N(s,b)
  int visits = 0;       // N(s,a)
};

// Σ_s π_B(s|I)·[Q(s,a) + C·P(s,a)·√(Σ_b N(s,b))/(1 + N(s,a))].
double puct_score(const std::vector<PuctTerm>& terms, double c_puct);

// Players whose moves the search does not choose: their actions are drawn
// from the given policy like chance events.
struct OpponentModels {
  // Whole-game fixed policies, e.g. a scripted or uniform opponent.
  std::map<int, std::function<ActionDistribution(const State&)>> fixed;
  // Predicted policies for the root's action stage only (stage_key equal to
  // the root's). Deeper stages fall back to search.
  std::map<int, ActionDistribution> root_stage;
  // Weights the root determinization (Avalon role assignments).
  std::optional<Beliefs> beliefs;
};

struct ActionStats {
  ActionId action = 0;
  int visits = 0;
  // Visit-weighted Q_emp over the root information set for the searcher, or
  // Q̂ when the action was never tried.
  double value = 0.0;
};

struct SearchResult {
  ActionId chosen_action = 0;
  std::vector<ActionStats> action_values;
  // Per-player values on the return scale: the mean leaf value credited
  // through the root information set.
  ValueEstimate root_value_estimate;
  int rollouts = 0;
};

// Node statistics, exposed for inspection and tests.
struct NodeStats {
  std::string state_key;
  std::string infoset_key;
  PlayerId actor;
  std::vector<ActionId> actions;
  std::vector<int> visits;
  // [action][player] sums of credited leaf values.
  std::vector<std::vector<double>> value_sums;
  // [action][player] heuristic (or exact) value of the successor.
  std::vector<std::vector<double>> q_hat;

  int total_visits() const;
  double q_emp(std::size_t action_index, int player) const;
};

class Searcher {
 public:
  Searcher(HeuristicHandle heuristic, SearchConfig config, OpponentModels models = {});

  // `state` is any state in the searcher's information set; the searcher is
  // the player to act.
  SearchResult run(const State& state);

  const NodeStats* node(const std::string& state_key) const;
  std::vector<const NodeStats*> infoset(const std::string& infoset_key) const;
  std::size_t num_nodes() const { return nodes_.size(); }

 private:
  void simulate(const State& root, Rng& rng, std::ostream* log, int index);
  NodeStats& expand(const State& state);
  std::size_t select(const NodeStats& node) const;
  ActionId choose_outcome(const State& state, const ActionDistribution& dist, Rng& rng);
  const std::vector<double>& leaf_value(const State& state);
  std::optional<ActionDistribution> modelled_policy(const State& state) const;

  HeuristicHandle heuristic_;
  SearchConfig config_;
  OpponentModels models_;
  std::string root_stage_;
  std::unordered_map<std::string, NodeStats> nodes_;
  std::unordered_map<std::string, std::vector<NodeStats*>> infosets_;
  std::unordered_map<std::string, std::vector<int>> outcome_counts_;
  std::unordered_map<std::string, std::vector<double>> value_cache_;
};

SearchResult run_search(const State& state, const HeuristicHandle& heuristic, const SearchConfig& config,
                        const OpponentModels& models = {});

// Plays every move by a fresh search from the acting player's view.
class SearchPolicy final : public Policy {
 public:
  SearchPolicy(HeuristicHandle heuristic, SearchConfig config)
      : heuristic_(std::move(heuristic)), config_(std::move(config)) {}
  ActionId act(const State& state, Rng& rng) override;
  std::string name() const override { return "mcts:" + heuristic_.spec().id; }

 private:
  HeuristicHandle heuristic_;
  SearchConfig config_;
};

}  // namespace strategist
