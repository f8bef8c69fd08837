#pragma once

// Partially observable Markov decision game abstraction shared by every
// engine, searcher and evaluator.

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace strategist {

using json = nlohmann::json;
using ActionId = std::int64_t;
using Rng = std::mt19937_64;

enum class GameKind { kGops, kAvalon };

std::string to_string(GameKind kind);
GameKind game_kind_from_string(const std::string& name);

// Seat index for players; the environment actor (chance) is a distinguished
// value that never occupies a seat.
class PlayerId {
 public:
  constexpr PlayerId() = default;
  constexpr explicit PlayerId(int seat) : seat_(seat) {}

  static constexpr PlayerId environment() { return PlayerId(); }

  constexpr bool is_environment() const { return seat_ < 0; }
  constexpr int seat() const { return seat_; }

  auto operator<=>(const PlayerId&) const = default;

 private:
  int seat_ = -1;
};

class StrategistError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EngineMismatchError : public StrategistError {
 public:
  using StrategistError::StrategistError;
};

class IllegalActionError : public StrategistError {
 public:
  IllegalActionError(PlayerId actor, ActionId action, std::string detail);

  PlayerId actor() const { return actor_; }
  ActionId action() const { return action_; }

 private:
  PlayerId actor_;
  ActionId action_;
};

struct ActionProb {
  ActionId action = 0;
  double prob = 0.0;
};

// Probability distribution over action ids. Construction validates that the
// probabilities lie in [0,1] and sum to one within 1e-9.
class ActionDistribution {
 public:
  ActionDistribution() = default;
  explicit ActionDistribution(std::vector<ActionProb> entries);

  static ActionDistribution uniform(std::span<const ActionId> actions);
  static ActionDistribution point(ActionId action);

  const std::vector<ActionProb>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  double prob_of(ActionId action) const;
  ActionId sample(Rng& rng) const;

 private:
  std::vector<ActionProb> entries_;
};

class State;
using StatePtr = std::unique_ptr<State>;
using SharedState = std::shared_ptr<const State>;

// An immutable game state. Transitions produce new states; nothing mutates a
// state after construction, so states can be shared across threads.
class State {
 public:
  virtual ~State() = default;

  virtual GameKind game() const = 0;
  virtual int num_players() const = 0;

  // PlayerId::environment() while a chance event is pending.
  virtual PlayerId current_actor() const = 0;
  // Sorted ascending; empty iff terminal.
  virtual std::vector<ActionId> legal_actions() const = 0;
  virtual bool is_terminal() const = 0;
  // Per-player returns; only valid on terminal states.
  virtual std::vector<double> returns() const = 0;
  // The environment actor's policy at a chance node.
  virtual ActionDistribution chance_outcomes() const = 0;

  virtual StatePtr child(ActionId action) const = 0;
  virtual StatePtr clone() const = 0;

  // Canonical full-state JSON (hidden information included).
  virtual json to_json() const = 0;
  // Everything `viewer` may see.
  virtual json observation(PlayerId viewer) const = 0;

  // Compact identity of the full state.
  virtual std::string state_key() const = 0;
  // Identity of the information set `viewer` is in.
  virtual std::string infoset_key(PlayerId viewer) const = 0;
  // Identity of the current action stage (a round of simultaneous-in-spirit
  // moves), used to scope dialogue-predicted opponent policies in search.
  virtual std::string stage_key() const = 0;

  virtual std::string action_to_string(ActionId action) const = 0;
  virtual json action_to_json(ActionId action) const = 0;
  virtual ActionId action_from_json(const json& j) const = 0;

  bool is_chance() const { return !is_terminal() && current_actor().is_environment(); }
  bool is_legal(ActionId action) const;
};

StatePtr state_from_json(const json& j);

// Checked transition: `actor` must be the current actor and `action` legal.
StatePtr apply_action(const State& state, PlayerId actor, ActionId action);

struct GameContract {
  PlayerId current_actor;
  std::vector<ActionId> legal_actions;
  bool is_terminal = false;
  std::optional<std::vector<double>> returns;
};

// Throws EngineMismatchError when `state` is not from the expected engine.
GameContract game_contract(const State& state, GameKind expected);
GameContract game_contract(const State& state);

// Policies see the full state but must only act on what the acting player's
// information set reveals.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual ActionId act(const State& state, Rng& rng) = 0;
  virtual std::string name() const = 0;
};

using PolicyPtr = std::shared_ptr<Policy>;

class UniformRandomPolicy final : public Policy {
 public:
  ActionId act(const State& state, Rng& rng) override;
  std::string name() const override { return "uniform_random"; }
};

// Replays a fixed action list; used for fixtures and scripted opponents.
class ScriptedPolicy final : public Policy {
 public:
  explicit ScriptedPolicy(std::vector<ActionId> script) : script_(std::move(script)) {}
  ActionId act(const State& state, Rng& rng) override;
  std::string name() const override { return "scripted"; }

 private:
  std::vector<ActionId> script_;
  std::size_t next_ = 0;
};

// One policy per non-environment seat.
class StrategicProfile {
 public:
  StrategicProfile() = default;
  explicit StrategicProfile(std::vector<PolicyPtr> policies);

  std::size_t size() const { return policies_.size(); }
  Policy& at(PlayerId player) const;
  void check_total(int num_players) const;

 private:
  std::vector<PolicyPtr> policies_;
};

struct TrajectoryStep {
  SharedState state;
  PlayerId actor;
  ActionId action = 0;
  std::vector<double> rewards;
  bool terminal_next = false;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  SharedState final_state;
  std::vector<double> final_returns;

  json to_json() const;
};

// Simulates from `initial` until terminal. Chance events are drawn from the
// environment policy; every stochastic choice flows through a generator seeded
// from `seed`.
Trajectory rollout(const State& initial, const StrategicProfile& profile, std::uint64_t seed);

// Derives independent, reproducible sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace strategist
