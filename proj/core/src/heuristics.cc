#include "strategist/heuristics.h"

#include <cmath>
#include <limits>

#include "strategist/belief.h"

namespace strategist {

ValueEstimate ValueEstimate::from_values(std::vector<double> values) {
  ValueEstimate v;
  v.raw = ordered_json::array();
  for (double x : values) v.raw.push_back(x);
  v.per_player = std::move(values);
  return v;
}

json ValueEstimate::to_json() const {
  return {{"values", json::parse(raw.dump())}, {"intermediates", json::parse(intermediates.dump())}};
}

std::vector<double> to_return_scale(GameKind game, const std::vector<double>& v) {
  if (game == GameKind::kGops) {
    if (v.size() != 2) throw EvaluationError("gops value must have two entries");
    return {v[0] - v[1], v[1] - v[0]};
  }
  return v;
}

HeuristicSpec HeuristicSpec::builtin(std::string name, GameKind game, std::string id) {
  HeuristicSpec s;
  s.id = id.empty() ? name : std::move(id);
  s.game = game;
  s.kind = HeuristicKind::kBuiltin;
  s.source_text = std::move(name);
  return s;
}

HeuristicSpec HeuristicSpec::external(std::string source, GameKind game, std::string id) {
  if (source.empty()) throw StrategistError("external heuristic with empty source");
  HeuristicSpec s;
  s.id = std::move(id);
  s.game = game;
  s.kind = HeuristicKind::kExternal;
  s.source_text = std::move(source);
  return s;
}

json HeuristicSpec::to_json() const {
  json j{{"id", id},
         {"game", to_string(game)},
         {"kind", kind == HeuristicKind::kBuiltin ? "builtin" : "external"},
         {"source_text", source_text}};
  j["parent_id"] = parent_id ? json(*parent_id) : json(nullptr);
  j["idea_id"] = idea_id ? json(*idea_id) : json(nullptr);
  return j;
}

HeuristicSpec HeuristicSpec::from_json(const json& j) {
  HeuristicSpec s;
  s.id = j.value("id", std::string());
  s.game = game_kind_from_string(j.at("game").get<std::string>());
  const auto kind = j.value("kind", std::string("builtin"));
  if (kind == "builtin") {
    s.kind = HeuristicKind::kBuiltin;
  } else if (kind == "external") {
    s.kind = HeuristicKind::kExternal;
  } else {
    throw StrategistError("unknown heuristic kind '" + kind + "'");
  }
  s.source_text = j.at("source_text").get<std::string>();
  if (s.kind == HeuristicKind::kExternal && s.source_text.empty()) {
    throw StrategistError("external heuristic with empty source");
  }
  if (j.contains("parent_id") && !j.at("parent_id").is_null()) s.parent_id = j.at("parent_id").get<std::string>();
  if (j.contains("idea_id") && !j.at("idea_id").is_null()) s.idea_id = j.at("idea_id").get<std::string>();
  if (s.id.empty()) s.id = s.kind == HeuristicKind::kBuiltin ? s.source_text : "external";
  return s;
}

ValueEstimate HeuristicHandle::evaluate(const State& state) const {
  if (!evaluator_) throw EvaluationError("heuristic not loaded");
  if (state.game() != spec_.game) {
    throw EngineMismatchError("heuristic '" + spec_.id + "' is for " + to_string(spec_.game) + ", state is " +
                              to_string(state.game()));
  }
  ValueEstimate v = evaluator_->evaluate(state);
  if (static_cast<int>(v.per_player.size()) != state.num_players()) {
    throw EvaluationError("heuristic '" + spec_.id + "' returned " + std::to_string(v.per_player.size()) +
                              " values for " + std::to_string(state.num_players()) + " players",
                          v.raw.dump());
  }
  for (double x : v.per_player) {
    if (!std::isfinite(x)) throw EvaluationError("heuristic '" + spec_.id + "' returned a non-finite value", v.raw.dump());
  }
  if (state.game() == GameKind::kAvalon) {
    for (double x : v.per_player) {
      if (x < 0.0 || x > 1.0) {
        throw EvaluationError("avalon heuristic '" + spec_.id + "' returned a value outside [0,1]", v.raw.dump());
      }
    }
  }
  for (const auto& [name, value] : v.intermediates.items()) {
    if (!value.is_number() || !std::isfinite(value.get<double>())) {
      throw EvaluationError("intermediate '" + name + "' is not a finite number", v.intermediates.dump());
    }
  }
  return v;
}

std::vector<double> HeuristicHandle::value(const State& state) const {
  if (state.is_terminal()) return state.returns();
  return to_return_scale(state.game(), evaluate(state).per_player);
}

ActionId greedy_action(const HeuristicHandle& heuristic, const State& state) {
  const PlayerId actor = state.current_actor();
  if (state.is_terminal() || actor.is_environment()) {
    throw StrategistError("greedy action requested where no player acts");
  }
  const auto legal = state.legal_actions();
  ActionId best = legal.front();
  double best_value = -std::numeric_limits<double>::infinity();
  for (ActionId a : legal) {
    const auto next = state.child(a);
    const double v = heuristic.value(*next)[actor.seat()];
    if (v > best_value) {
      best_value = v;
      best = a;
    }
  }
  return best;
}

ActionId GreedyPolicy::act(const State& state, Rng& rng) {
  const auto view = determinize(state, state.current_actor(), rng);
  return greedy_action(heuristic_, *view);
}

}  // namespace strategist
