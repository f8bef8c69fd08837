#include "strategist/game.h"

#include <algorithm>
#include <cmath>

#include "strategist/avalon.h"
#include "strategist/gops.h"

namespace strategist {

std::string to_string(GameKind kind) {
  switch (kind) {
    case GameKind::kGops:
      return "gops";
    case GameKind::kAvalon:
      return "avalon";
  }
  return "unknown";
}

GameKind game_kind_from_string(const std::string& name) {
  if (name == "gops") return GameKind::kGops;
  if (name == "avalon") return GameKind::kAvalon;
  throw EngineMismatchError("unknown game '" + name + "'");
}

IllegalActionError::IllegalActionError(PlayerId actor, ActionId action, std::string detail)
    : StrategistError("illegal action " + std::to_string(action) + " by " +
                      (actor.is_environment() ? std::string("environment")
                                              : "player " + std::to_string(actor.seat())) +
                      ": " + detail),
      actor_(actor),
      action_(action) {}

ActionDistribution::ActionDistribution(std::vector<ActionProb> entries)
    : entries_(std::move(entries)) {
  double total = 0.0;
  for (const auto& e : entries_) {
    if (!(e.prob >= 0.0 && e.prob <= 1.0)) {
      throw StrategistError("action probability out of [0,1]");
    }
    total += e.prob;
  }
  if (!entries_.empty() && std::abs(total - 1.0) > 1e-9) {
    throw StrategistError("action probabilities sum to " + std::to_string(total));
  }
}

ActionDistribution ActionDistribution::uniform(std::span<const ActionId> actions) {
  std::vector<ActionProb> entries;
  entries.reserve(actions.size());
  const double p = 1.0 / static_cast<double>(actions.size());
  for (ActionId a : actions) entries.push_back({a, p});
  // Renormalise the last entry so that floating error never trips validation.
  if (!entries.empty()) {
    double rest = 0.0;
    for (std::size_t i = 0; i + 1 < entries.size(); ++i) rest += entries[i].prob;
    entries.back().prob = std::max(0.0, 1.0 - rest);
  }
  return ActionDistribution(std::move(entries));
}

ActionDistribution ActionDistribution::point(ActionId action) {
  return ActionDistribution({{action, 1.0}});
}

double ActionDistribution::prob_of(ActionId action) const {
  for (const auto& e : entries_) {
    if (e.action == action) return e.prob;
  }
  return 0.0;
}

ActionId ActionDistribution::sample(Rng& rng) const {
  if (entries_.empty()) throw StrategistError("sampling from an empty distribution");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  for (const auto& e : entries_) {
    if (u < e.prob) return e.action;
    u -= e.prob;
  }
  return entries_.back().action;
}

bool State::is_legal(ActionId action) const {
  const auto legal = legal_actions();
  return std::binary_search(legal.begin(), legal.end(), action);
}

StatePtr state_from_json(const json& j) {
  if (!j.is_object() || !j.contains("game")) {
    throw EngineMismatchError("state JSON carries no game tag");
  }
  const auto kind = game_kind_from_string(j.at("game").get<std::string>());
  switch (kind) {
    case GameKind::kGops:
      return std::make_unique<gops::GopsState>(gops::GopsState::from_json(j));
    case GameKind::kAvalon:
      return std::make_unique<avalon::AvalonState>(avalon::AvalonState::from_json(j));
  }
  throw EngineMismatchError("unregistered engine");
}

StatePtr apply_action(const State& state, PlayerId actor, ActionId action) {
  if (state.is_terminal()) throw IllegalActionError(actor, action, "game is over");
  if (state.current_actor() != actor) throw IllegalActionError(actor, action, "not this actor's turn");
  if (!state.is_legal(action)) throw IllegalActionError(actor, action, state.action_to_string(action));
  return state.child(action);
}

GameContract game_contract(const State& state) {
  GameContract c;
  c.is_terminal = state.is_terminal();
  if (c.is_terminal) {
    c.returns = state.returns();
    return c;
  }
  c.current_actor = state.current_actor();
  c.legal_actions = state.legal_actions();
  return c;
}

GameContract game_contract(const State& state, GameKind expected) {
  if (state.game() != expected) {
    throw EngineMismatchError("expected a " + to_string(expected) + " state, got " +
                              to_string(state.game()));
  }
  return game_contract(state);
}

ActionId UniformRandomPolicy::act(const State& state, Rng& rng) {
  const auto legal = state.legal_actions();
  std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
  return legal[pick(rng)];
}

ActionId ScriptedPolicy::act(const State& /*state*/, Rng& /*rng*/) {
  if (next_ >= script_.size()) throw StrategistError("scripted policy ran out of actions");
  return script_[next_++];
}

StrategicProfile::StrategicProfile(std::vector<PolicyPtr> policies)
    : policies_(std::move(policies)) {}

Policy& StrategicProfile::at(PlayerId player) const {
  if (player.is_environment() || player.seat() >= static_cast<int>(policies_.size()) ||
      !policies_[player.seat()]) {
    throw StrategistError("no policy for seat " + std::to_string(player.seat()));
  }
  return *policies_[player.seat()];
}

void StrategicProfile::check_total(int num_players) const {
  if (static_cast<int>(policies_.size()) != num_players) {
    throw StrategistError("profile covers " + std::to_string(policies_.size()) + " seats, game has " +
                          std::to_string(num_players));
  }
  for (int i = 0; i < num_players; ++i) {
    if (!policies_[i]) throw StrategistError("missing policy for seat " + std::to_string(i));
  }
}

json Trajectory::to_json() const {
  json steps_json = json::array();
  for (const auto& s : steps) {
    steps_json.push_back({{"state", s.state->to_json()},
                          {"actor", s.actor.seat()},
                          {"action", s.action},
                          {"rewards", s.rewards},
                          {"terminal", s.terminal_next}});
  }
  return {{"steps", steps_json},
          {"final_state", final_state ? final_state->to_json() : json()},
          {"final_returns", final_returns}};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over the combined words.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Trajectory rollout(const State& initial, const StrategicProfile& profile, std::uint64_t seed) {
  profile.check_total(initial.num_players());
  Rng rng(seed);
  Trajectory traj;
  SharedState current = initial.clone();
  const auto zeros = std::vector<double>(initial.num_players(), 0.0);
  while (!current->is_terminal()) {
    const PlayerId actor = current->current_actor();
    ActionId action;
    if (actor.is_environment()) {
      action = current->chance_outcomes().sample(rng);
    } else {
      action = profile.at(actor).act(*current, rng);
      if (!current->is_legal(action)) {
        throw IllegalActionError(actor, action,
                                 "policy '" + profile.at(actor).name() + "' chose an illegal action");
      }
    }
    SharedState next = current->child(action);
    TrajectoryStep step;
    step.state = current;
    step.actor = actor;
    step.action = action;
    step.terminal_next = next->is_terminal();
    step.rewards = step.terminal_next ? next->returns() : zeros;
    traj.steps.push_back(std::move(step));
    current = std::move(next);
  }
  traj.final_state = current;
  traj.final_returns = current->returns();
  return traj;
}

}  // namespace strategist
