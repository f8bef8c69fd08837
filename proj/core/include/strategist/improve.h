#pragma once

// The bi-level improvement loop: a tree of strategies and a bandit-managed
// queue of natural-language improvement ideas. Strategies are value
// heuristics or dialogue guides; a StrategyDomain supplies the game-specific
// prompts, feedback and evaluation.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strategist/heuristics.h"
#include "strategist/llm.h"
#include "strategist/prompts.h"

namespace strategist {

enum class StrategyKind { kValueHeuristic, kDialogueGuide };

std::string to_string(StrategyKind kind);
StrategyKind strategy_kind_from_string(const std::string& name);

struct KeyState {
  std::string state_text;
  json state;  // canonical JSON
  ordered_json heuristic_output = ordered_json::array();
  ordered_json intermediates = ordered_json::object();
  std::vector<double> heuristic_value;  // return scale
  std::vector<double> search_estimate;  // return scale
  std::vector<double> actual;
  int focal_player = 0;
  // (search_estimate − heuristic_value)² for the focal player.
  double discrepancy = 0.0;
  int position = 0;  // order of appearance across the collected trajectories

  std::string digest() const;
  json to_json() const;
  static KeyState from_json(const json& j);
};

// The k states of largest discrepancy, descending; ties keep trajectory order.
std::vector<KeyState> select_key_states(std::vector<KeyState> candidates, int k);

struct StrategyNode {
  std::string id;
  StrategyKind kind = StrategyKind::kValueHeuristic;
  std::optional<HeuristicSpec> heuristic;
  std::optional<DialogueGuide> guide;
  std::optional<double> score;
  std::vector<KeyState> feedback;
  std::optional<std::string> parent;
  std::optional<std::string> idea;
  int generation = 0;
  // Set when generating the strategy failed; such nodes keep score 0.
  std::optional<std::string> failure;

  bool usable() const { return !failure.has_value(); }
  json to_json() const;
  static StrategyNode from_json(const json& j);
};

class StrategyTree {
 public:
  // Assigns the next id ("s0", "s1", ...) and returns it.
  std::string add(StrategyNode node);
  StrategyNode& at(const std::string& id);
  const StrategyNode& at(const std::string& id) const;
  bool contains(const std::string& id) const { return index_.count(id) > 0; }
  const std::vector<StrategyNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  // Usable nodes with a score, by score descending; ties keep insertion order.
  std::vector<const StrategyNode*> ranked() const;
  // Ids from the root down to `id`.
  std::vector<std::string> lineage(const std::string& id) const;

  json to_json() const;
  static StrategyTree from_json(const json& j);

 private:
  std::vector<StrategyNode> nodes_;
  std::map<std::string, std::size_t> index_;
};

// Softmax with the given temperature over the scores of the two best usable
// nodes. Throws StrategistError when no node has been evaluated.
const StrategyNode& select_strategy(const StrategyTree& tree, double temperature, Rng& rng);

struct Idea {
  std::string id;
  std::string text;
  double score = 0.0;
  int tries = 0;
  std::string origin_strategy;
  std::string origin_key_state;
  // Every improvement the idea has been credited with, in order.
  std::vector<double> improvements;

  json to_json() const;
  static Idea from_json(const json& j);
};

// z̄ + c·√(ln N_total / N_idea); +∞ when N_idea = 0.
double ucb_score(double mean, double c, long total_tries, long tries);

class EmptyQueueError : public StrategistError {
 public:
  using StrategistError::StrategistError;
};

class IdeaQueue {
 public:
  std::string add(std::string text, std::string origin_strategy = {}, std::string origin_key_state = {});
  bool empty() const { return ideas_.empty(); }
  std::size_t size() const { return ideas_.size(); }
  const std::vector<Idea>& ideas() const { return ideas_; }
  const Idea& at(const std::string& id) const;
  long total_tries() const;

  // Unvisited ideas first, oldest first; otherwise a softmax with the given
  // temperature over UCB scores. `pending` adds tries for selections made
  // earlier in the same batch whose results are not in yet. Throws
  // EmptyQueueError on an empty queue.
  const Idea& select(double c, double temperature, Rng& rng, const std::map<std::string, int>& pending = {}) const;

  // z ← n/(n+1)·z + 1/(n+1)·improvement; n ← n + 1.
  void update(const std::string& id, double improvement);

  json to_json() const;
  static IdeaQueue from_json(const json& j);

 private:
  std::vector<Idea> ideas_;
};

struct EvolutionConfig {
  int num_ideas = 2;
  int strategies_per_step = 2;
  int evolutions = 2;
  int feedback_examples = 10;
  double ucb_c = 1.0;
  double strategy_temperature = 0.3;
  double idea_temperature = 0.5;
  std::uint64_t seed = 0;
  // When set, the tree and queue are written here after every evolution.
  std::string output_dir;

  void validate() const;
  json to_json() const;
  static EvolutionConfig from_json(const json& j);
};

// Game- and strategy-specific half of the loop.
class StrategyDomain {
 public:
  virtual ~StrategyDomain() = default;

  virtual StrategyKind kind() const = 0;
  virtual GameKind game() const = 0;

  // Key states for `node`, most informative first, at most `k`.
  virtual std::vector<KeyState> collect_feedback(const StrategyNode& node, int k, std::uint64_t seed) = 0;
  virtual std::string render_feedback(const std::vector<KeyState>& states) const;

  virtual llm::ChatRequest reflection_request(const StrategyNode& node, const std::string& feedback) const = 0;
  virtual llm::ChatRequest idea_request(const StrategyNode& node, const std::string& reflections,
                                        int num_ideas) const = 0;
  virtual llm::ChatRequest implementation_request(const StrategyNode& node, const std::string& ideas) const = 0;

  // Fills the strategy of `child` from a model reply. Throws ParseError.
  virtual void apply_reply(StrategyNode& child, const std::string& reply) const = 0;

  // W for every node of the batch.
  virtual std::map<std::string, double> evaluate(const std::vector<const StrategyNode*>& batch,
                                                 std::uint64_t seed) = 0;
};

// Shared run state; `log` receives warnings and progress lines.
struct EvolutionContext {
  StrategyDomain& domain;
  llm::Gateway& gateway;
  const EvolutionConfig& config;
  Rng& rng;
  std::ostream* log = nullptr;
  std::vector<std::string> warnings;

  void warn(const std::string& message);
  void note(const std::string& message) const;
};

// Feedback for `id`, collected on first use and cached in the tree.
const std::vector<KeyState>& ensure_feedback(StrategyTree& tree, const std::string& id, EvolutionContext& ctx);

// Picks a strategy, asks for reflections on its key states, then for ideas,
// and enqueues them. A reply without ideas is retried once at temperature 0;
// a second failure leaves the queue unchanged with a warning. Returns the
// number of ideas added.
int generate_ideas(StrategyTree& tree, IdeaQueue& queue, EvolutionContext& ctx);

// Evaluates `batch` and records scores on nodes that have none yet. Failed
// nodes get 0. Returns W for every id in the batch.
std::map<std::string, double> evaluate_batch(StrategyTree& tree, const std::vector<std::string>& batch,
                                             EvolutionContext& ctx, std::uint64_t seed);

// Creates a child of `parent` from an implementation request. Generation
// failures still add the child, marked failed. Returns the child id.
std::string implement_child(StrategyTree& tree, const std::string& parent, const llm::ChatRequest& request,
                            const std::optional<std::string>& idea, int generation, EvolutionContext& ctx);

// One implementation step: strategies_per_step (strategy, idea) pairs,
// children generated, the children and their parents evaluated together,
// idea scores updated with W[child] − W[parent]. Throws EmptyQueueError when
// the queue is empty. Returns the new child ids.
std::vector<std::string> implement_strategies(StrategyTree& tree, IdeaQueue& queue, int generation,
                                              EvolutionContext& ctx);

enum class ImproverKind { kStrategist, kLineSearch, kGreedySearch, kBestFirst, kBestFirstWithThought };

std::string to_string(ImproverKind kind);
ImproverKind improver_kind_from_string(const std::string& name);

struct EvolutionResult {
  StrategyTree tree;
  IdeaQueue queue;
  std::vector<std::string> best;  // usable evaluated ids, score descending
  json report;
};

// Seeds the tree, evaluates the seeds, then runs `config.evolutions` steps of
// the chosen improver. Deterministic for a deterministic backend and seed.
EvolutionResult run_evolution(const std::vector<StrategyNode>& seeds, StrategyDomain& domain, llm::Gateway& gateway,
                              const EvolutionConfig& config, ImproverKind kind = ImproverKind::kStrategist,
                              int bfs_k = 2, std::ostream* log = nullptr);

// One baseline step producing config.strategies_per_step children:
//   LineSearch: each child revises the most recent usable node.
//   GreedySearch: every child revises the best node of the last generation.
//   BestFirst(k): children revise the top-k nodes in turn.
//   BestFirstWithThought(k): as BestFirst with a reflection and idea turn
//     inlined into the revision prompt.
std::vector<std::string> improve_step(ImproverKind kind, int k, StrategyTree& tree, int generation,
                                      EvolutionContext& ctx);

// Plain-text summary of a finished run.
std::string summarize(const EvolutionResult& result);

}  // namespace strategist
