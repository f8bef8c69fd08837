#include "session.h"

#include <algorithm>
#include <chrono>

#include "strategist/avalon.h"
#include "strategist/gops.h"

namespace strategist::app {

using avalon::AvalonState;

json SessionConfig::to_json() const {
  json j{{"game", strategist::to_string(game)},
         {"gops_cards", gops_cards},
         {"avalon_players", avalon_players},
         {"discussion_rounds", discussion_rounds},
         {"human_seats", human_seats},
         {"seed", seed},
         {"search", search.to_json()}};
  j["heuristic"] = heuristic ? heuristic->to_json() : json(nullptr);
  j["guide"] = guide ? guide->to_json() : json(nullptr);
  return j;
}

SessionConfig SessionConfig::from_json(const json& j) {
  try {
    if (!j.is_object()) throw StrategistError("session config must be a JSON object");
    SessionConfig c;
    c.game = game_kind_from_string(j.value("game", std::string("gops")));
    c.gops_cards = j.value("gops_cards", c.gops_cards);
    c.avalon_players = j.value("avalon_players", c.avalon_players);
    c.discussion_rounds = j.value("discussion_rounds", c.discussion_rounds);
    c.human_seats = j.value("human_seats", c.human_seats);
    c.seed = j.value("seed", c.seed);
    if (j.contains("search")) c.search = SearchConfig::from_json(j.at("search"));
    if (j.contains("heuristic") && !j.at("heuristic").is_null()) {
      const auto& h = j.at("heuristic");
      c.heuristic = h.is_string() ? HeuristicSpec::builtin(h.get<std::string>(), c.game)
                                  : HeuristicSpec::from_json(h);
    }
    if (j.contains("guide") && !j.at("guide").is_null()) c.guide = DialogueGuide::from_json(j.at("guide"));
    const int players = c.game == GameKind::kGops ? 2 : c.avalon_players;
    auto seats = c.human_seats;
    std::sort(seats.begin(), seats.end());
    if (std::adjacent_find(seats.begin(), seats.end()) != seats.end()) throw StrategistError("human seats repeat");
    for (int s : seats) {
      if (s < 0 || s >= players) throw StrategistError("human seat " + std::to_string(s) + " is not a seat");
    }
    if (c.search.budget < 0) throw StrategistError("search budget must be non-negative");
    if (c.discussion_rounds < 0) throw StrategistError("discussion_rounds must be non-negative");
    return c;
  } catch (const SessionError&) {
    throw;
  } catch (const std::exception& e) {
    throw SessionError(400, e.what());
  }
}

GameSession::GameSession(std::string id, SessionConfig config, llm::Gateway* gateway)
    : id_(std::move(id)), config_(std::move(config)), gateway_(gateway), rng_(mix_seed(config_.seed, 1)) {
  const HeuristicSpec spec = config_.heuristic.value_or(HeuristicSpec::builtin(
      config_.game == GameKind::kGops ? "gops_current_score" : "avalon_quest_progress", config_.game));
  try {
    heuristic_ = load_heuristic(spec);
    if (config_.game == GameKind::kGops) {
      state_ = std::make_unique<gops::GopsState>(gops::new_game(config_.gops_cards, config_.seed));
    } else {
      state_ = std::make_unique<AvalonState>(
          avalon::new_game(config_.avalon_players, config_.seed, config_.discussion_rounds));
    }
  } catch (const std::exception& e) {
    throw SessionError(400, e.what());
  }
  if (config_.game == GameKind::kAvalon) {
    for (int seat = 0; seat < state_->num_players(); ++seat) {
      if (is_human(seat)) {
        agents_.push_back(nullptr);
        continue;
      }
      SearchConfig search = config_.search;
      search.seed = mix_seed(config_.seed, 100 + static_cast<std::uint64_t>(seat));
      agents_.push_back(std::make_unique<DialogueAgent>(
          seat, DialogueAgent::Options{heuristic_, search, config_.guide, DialogueConfig{}}, gateway_));
    }
  }
  std::lock_guard lock(mu_);
  emit_locked("session_created", {{"game", strategist::to_string(config_.game)},
                                  {"num_players", state_->num_players()},
                                  {"human_seats", config_.human_seats},
                                  {"public", state_->observation(PlayerId::environment())}});
  advance_locked();
}

bool GameSession::is_human(int seat) const {
  return std::find(config_.human_seats.begin(), config_.human_seats.end(), seat) != config_.human_seats.end();
}

GameSession::Pending GameSession::pending_locked() const {
  if (state_->is_terminal() || state_->is_chance()) return {-1, "none"};
  if (state_->game() == GameKind::kAvalon) {
    const auto& a = static_cast<const AvalonState&>(*state_);
    if (a.discussion_open()) return {*a.next_speaker(), "speech"};
  }
  return {state_->current_actor().seat(), "action"};
}

void GameSession::emit_locked(std::string type, json payload) {
  events_.push_back({static_cast<long>(events_.size()) + 1, std::move(type), std::move(payload)});
  changed_.notify_all();
}

json GameSession::legal_json_locked() const {
  json legal = json::array();
  for (ActionId a : state_->legal_actions()) legal.push_back(state_->action_to_json(a));
  return legal;
}

void GameSession::apply_locked(int seat, ActionId action) {
  const PlayerId actor = seat < 0 ? PlayerId::environment() : PlayerId(seat);
  StatePtr next = apply_action(*state_, actor, action);
  json payload{{"seat", seat}};
  std::string type = "move";
  if (state_->game() == GameKind::kGops) {
    const auto& g = static_cast<const gops::GopsState&>(*next);
    if (seat < 0) {
      type = "score_card";
      payload["card"] = action;
    } else if (seat == 1) {
      type = "round";
      payload["player_0_card"] = g.played(0).back();
      payload["player_1_card"] = g.played(1).back();
      payload["scores"] = {g.score(0), g.score(1)};
    }
  } else {
    const auto& before = static_cast<const AvalonState&>(*state_);
    const auto& after = static_cast<const AvalonState&>(*next);
    if (before.phase() == avalon::Phase::kTeamSelection || before.phase() == avalon::Phase::kAssassination) {
      payload["action"] = before.action_to_json(action);
    }
    payload["phase"] = avalon::to_string(before.phase());
    if (after.proposals().size() > before.proposals().size()) {
      const auto& p = after.proposals().back();
      emit_locked("proposal_result", {{"leader", p.leader},
                                      {"team", avalon::team_members(p.team)},
                                      {"votes", p.votes},
                                      {"approved", p.approved},
                                      {"forced", p.forced}});
    }
    if (after.quests().size() > before.quests().size()) {
      const auto& q = after.quests().back();
      emit_locked("quest_result", {{"quest", q.quest}, {"fails", q.fails}, {"success", q.success}});
    }
  }
  state_ = std::move(next);
  payload["public"] = state_->observation(PlayerId::environment());
  emit_locked(type, std::move(payload));
  if (state_->is_terminal()) {
    json over{{"returns", state_->returns()}};
    if (state_->game() == GameKind::kGops) {
      const auto& g = static_cast<const gops::GopsState&>(*state_);
      over["scores"] = {g.score(0), g.score(1)};
      over["pot"] = g.pot();
    } else {
      const auto& a = static_cast<const AvalonState&>(*state_);
      over["winner"] = a.winner() ? avalon::to_string(*a.winner()) : "";
    }
    emit_locked("game_over", std::move(over));
  }
}

void GameSession::speak_locked(int seat, const std::string& text) {
  auto& a = static_cast<const AvalonState&>(*state_);
  state_ = std::make_unique<AvalonState>(a.record_dialogue(PlayerId(seat), text));
  emit_locked("speech", {{"seat", seat}, {"text", text}});
}

void GameSession::advance_locked() {
  while (!state_->is_terminal()) {
    if (state_->is_chance()) {
      apply_locked(-1, state_->chance_outcomes().sample(rng_));
      continue;
    }
    const Pending p = pending_locked();
    if (is_human(p.seat)) {
      emit_locked("awaiting", {{"seat", p.seat}, {"kind", p.kind}});
      return;
    }
    if (state_->game() == GameKind::kGops) {
      SearchConfig search = config_.search;
      search.seed = mix_seed(config_.seed, 1000 + static_cast<std::uint64_t>(agent_moves_++));
      apply_locked(p.seat, run_search(*state_, heuristic_, search).chosen_action);
      continue;
    }
    const auto& a = static_cast<const AvalonState&>(*state_);
    auto& agent = *agents_[static_cast<std::size_t>(p.seat)];
    agent.observe(a);
    if (p.kind == "speech") {
      speak_locked(p.seat, agent.speak(a).speech);
    } else {
      apply_locked(p.seat, agent.act(a));
    }
  }
}

void GameSession::submit(int seat, const json& body) {
  std::lock_guard lock(mu_);
  if (state_->is_terminal()) throw SessionError(409, "the game is over");
  const Pending p = pending_locked();
  if (p.seat != seat || !is_human(seat)) {
    throw SessionError(409, "it is not seat " + std::to_string(seat) + "'s turn",
                       {{"pending_seat", p.seat}, {"pending_kind", p.kind}});
  }
  if (!body.is_object()) throw SessionError(400, "request body must be a JSON object");
  if (p.kind == "speech") {
    if (!body.contains("speech") || !body.at("speech").is_string()) {
      throw SessionError(400, "a discussion turn expects {\"speech\": \"...\"}");
    }
    const std::string text = body.at("speech").get<std::string>();
    speak_locked(seat, text);
    action_log_.push_back({{"seat", seat}, {"speech", text}});
  } else {
    if (!body.contains("action")) throw SessionError(400, "expected {\"action\": ...}");
    json detail{{"legal", legal_json_locked()}};
    if (state_->game() == GameKind::kAvalon) {
      const auto& a = static_cast<const AvalonState&>(*state_);
      if (a.phase() == avalon::Phase::kTeamSelection) detail["team_size"] = a.team_size();
    }
    ActionId action = 0;
    try {
      action = state_->action_from_json(body.at("action"));
    } catch (const std::exception& e) {
      throw SessionError(422, e.what(), detail);
    }
    if (!state_->is_legal(action)) throw SessionError(422, "illegal action", detail);
    action_log_.push_back({{"seat", seat}, {"action", body.at("action")}});
    apply_locked(seat, action);
  }
  advance_locked();
}

json GameSession::view(std::optional<int> seat) const {
  std::lock_guard lock(mu_);
  if (seat && (*seat < 0 || *seat >= state_->num_players())) {
    throw SessionError(400, "seat " + std::to_string(*seat) + " is not in this game");
  }
  json v{{"id", id_},
         {"game", strategist::to_string(config_.game)},
         {"seat", seat ? json(*seat) : json(nullptr)},
         {"human_seats", config_.human_seats},
         {"observation", state_->observation(seat ? PlayerId(*seat) : PlayerId::environment())},
         {"status", state_->is_terminal() ? "finished" : "in_progress"},
         {"last_event", static_cast<long>(events_.size())}};
  const Pending p = pending_locked();
  v["pending"] = {{"seat", p.seat}, {"kind", p.kind}};
  if (seat && p.seat == *seat && p.kind == "action" && is_human(*seat)) {
    v["legal"] = legal_json_locked();
    if (config_.game == GameKind::kAvalon) {
      const auto& a = static_cast<const AvalonState&>(*state_);
      if (a.phase() == avalon::Phase::kTeamSelection) v["team_size"] = a.team_size();
    }
  }
  if (state_->is_terminal()) v["returns"] = state_->returns();
  return v;
}

std::vector<Event> GameSession::events_after(long after, int timeout_ms) const {
  std::unique_lock lock(mu_);
  changed_.wait_for(lock, std::chrono::milliseconds(std::max(0, timeout_ms)),
                    [&] { return static_cast<long>(events_.size()) > after; });
  std::vector<Event> out;
  for (const auto& e : events_) {
    if (e.seq > after) out.push_back(e);
  }
  return out;
}

bool GameSession::finished() const {
  std::lock_guard lock(mu_);
  return state_->is_terminal();
}

json GameSession::action_log() const {
  std::lock_guard lock(mu_);
  return action_log_;
}

std::string GameSession::final_state_key() const {
  std::lock_guard lock(mu_);
  return state_->state_key();
}

std::shared_ptr<GameSession> SessionManager::create(const SessionConfig& config) {
  std::string id;
  {
    std::lock_guard lock(mu_);
    id = "g" + std::to_string(next_++);
  }
  auto session = std::make_shared<GameSession>(id, config, gateway_);
  std::lock_guard lock(mu_);
  sessions_[id] = session;
  return session;
}

std::shared_ptr<GameSession> SessionManager::get(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionError(404, "no game '" + id + "'");
  return it->second;
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace strategist::app
