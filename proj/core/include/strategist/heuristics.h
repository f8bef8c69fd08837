#pragma once

// Value heuristics: state -> per-player expected return, with named
// intermediate values. Builtins are native; generated programs run in an
// external interpreter over a JSON-lines protocol.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "strategist/game.h"

namespace strategist {

using ordered_json = nlohmann::ordered_json;

class EvaluationError : public StrategistError {
 public:
  EvaluationError(const std::string& what, std::string raw_output = {})
      : StrategistError(what), raw_output_(std::move(raw_output)) {}
  const std::string& raw_output() const { return raw_output_; }

 private:
  std::string raw_output_;
};

struct ValueEstimate {
  // Raw per-player values as the heuristic reported them. GOPS heuristics
  // report expected final scores, Avalon heuristics win probabilities.
  std::vector<double> per_player;
  // Named intermediate numbers in the order the heuristic produced them. Kept
  // as JSON numbers so integer and float values render as they were returned.
  ordered_json intermediates = ordered_json::object();
  // Per-player values as JSON numbers, for rendering.
  ordered_json raw = ordered_json::array();

  static ValueEstimate from_values(std::vector<double> values);
  json to_json() const;
};

// Per-player values on the scale of State::returns(): point differences for
// GOPS, win probabilities for Avalon.
std::vector<double> to_return_scale(GameKind game, const std::vector<double>& per_player);

enum class HeuristicKind { kBuiltin, kExternal };

struct HeuristicSpec {
  std::string id;
  GameKind game = GameKind::kGops;
  HeuristicKind kind = HeuristicKind::kBuiltin;
  // Builtins: the registry name (optionally "name:argument"). External: the
  // program text.
  std::string source_text;
  std::optional<std::string> parent_id;
  std::optional<std::string> idea_id;

  static HeuristicSpec builtin(std::string name, GameKind game, std::string id = {});
  static HeuristicSpec external(std::string source, GameKind game, std::string id = {});

  json to_json() const;
  static HeuristicSpec from_json(const json& j);
};

class Evaluator {
 public:
  virtual ~Evaluator() = default;
  // Must be safe to call concurrently.
  virtual ValueEstimate evaluate(const State& state) const = 0;
};

// A loaded heuristic. Copies share the evaluator.
class HeuristicHandle {
 public:
  HeuristicHandle() = default;
  HeuristicHandle(HeuristicSpec spec, std::shared_ptr<const Evaluator> evaluator)
      : spec_(std::move(spec)), evaluator_(std::move(evaluator)) {}

  const HeuristicSpec& spec() const { return spec_; }
  bool valid() const { return evaluator_ != nullptr; }

  // Validates the state's game and the estimate's shape. Throws
  // EvaluationError on any evaluator failure.
  ValueEstimate evaluate(const State& state) const;
  // Exact returns at terminal states, heuristic values on the return scale
  // otherwise.
  std::vector<double> value(const State& state) const;

 private:
  HeuristicSpec spec_;
  std::shared_ptr<const Evaluator> evaluator_;
};

struct BuiltinInfo {
  std::string name;
  std::optional<GameKind> game;  // nullopt: any game
  std::string description;
  // Program-like text shown to the language model in place of source code.
  std::string source;
};

// Native heuristics resolvable by name.
class BuiltinRegistry {
 public:
  using Factory = std::function<std::shared_ptr<const Evaluator>(const std::string& argument)>;

  static BuiltinRegistry& instance();

  void add(BuiltinInfo info, Factory factory);
  bool contains(const std::string& name) const;
  const BuiltinInfo& info(const std::string& name) const;
  // `name_and_argument` is "name" or "name:argument".
  std::shared_ptr<const Evaluator> create(const std::string& name_and_argument) const;
  std::vector<std::string> names() const;

 private:
  BuiltinRegistry();
  std::map<std::string, std::pair<BuiltinInfo, Factory>> entries_;
};

struct ExternalOptions {
  // Interpreter argv prefix; the host script path is appended.
  std::vector<std::string> interpreter{"python3"};
  // Host script speaking the protocol. Empty selects the bundled one.
  std::string host_script;
  int timeout_ms = 1000;
  int max_processes = 4;
};

// Resolved bundled host script path (honours STRATEGIST_HEURISTIC_HOST).
std::string default_host_script();

// Throws StrategistError for unknown builtins or an unusable interpreter.
// External processes start lazily on the first evaluation.
HeuristicHandle load_heuristic(const HeuristicSpec& spec, const ExternalOptions& options = {});

// One-step lookahead on a fully specified state: argmax over legal actions of
// the acting player's exact-or-heuristic value of the successor. Ties go to
// the lowest action id.
ActionId greedy_action(const HeuristicHandle& heuristic, const State& state);

// Policy wrapper. Hidden information is first resolved by sampling one state
// consistent with the acting player's information set.
class GreedyPolicy final : public Policy {
 public:
  explicit GreedyPolicy(HeuristicHandle heuristic) : heuristic_(std::move(heuristic)) {}
  ActionId act(const State& state, Rng& rng) override;
  std::string name() const override { return "greedy:" + heuristic_.spec().id; }

 private:
  HeuristicHandle heuristic_;
};

}  // namespace strategist
