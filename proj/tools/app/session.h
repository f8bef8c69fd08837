#pragma once

// Live games between human seats and search agents. A session owns one game
// state; every mutation goes through the session's lock, and agents move
// until a human decision is pending or the game ends.

#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "strategist/dialogue.h"
#include "strategist/heuristics.h"
#include "strategist/llm.h"
#include "strategist/search.h"

namespace strategist::app {

class SessionError : public StrategistError {
 public:
  // `status` is the HTTP status the error maps to.
  SessionError(int status, const std::string& what, json detail = json::object())
      : StrategistError(what), status_(status), detail_(std::move(detail)) {}
  int status() const { return status_; }
  const json& detail() const { return detail_; }

 private:
  int status_;
  json detail_;
};

struct SessionConfig {
  GameKind game = GameKind::kGops;
  int gops_cards = 5;
  int avalon_players = 5;
  // Avalon discussion rounds per window; 0 plays without dialogue.
  int discussion_rounds = 0;
  std::vector<int> human_seats{0};
  std::uint64_t seed = 0;
  // Empty selects gops_current_score or avalon_quest_progress.
  std::optional<HeuristicSpec> heuristic;
  SearchConfig search;
  std::optional<DialogueGuide> guide;

  json to_json() const;
  // Throws SessionError(400) on invalid input.
  static SessionConfig from_json(const json& j);
};

struct Event {
  long seq = 0;
  std::string type;
  json payload;

  json to_json() const { return {{"seq", seq}, {"type", type}, {"payload", payload}}; }
};

class GameSession {
 public:
  GameSession(std::string id, SessionConfig config, llm::Gateway* gateway = nullptr);

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return config_; }

  // What `seat` may see; nullopt is the public view.
  json view(std::optional<int> seat) const;

  // A human move: {"action": ...} or, in an open discussion window,
  // {"speech": "..."}. Throws SessionError: 409 out of turn, 422 illegal
  // (legal set in the detail), 400 malformed.
  void submit(int seat, const json& body);

  // Events after `after`, waiting up to `timeout_ms` for one to appear.
  std::vector<Event> events_after(long after, int timeout_ms) const;

  bool finished() const;
  // Human actions in order, for replay.
  json action_log() const;
  std::string final_state_key() const;

 private:
  struct Pending {
    int seat = -1;
    std::string kind;  // "action", "speech" or "none"
  };

  Pending pending_locked() const;
  void advance_locked();
  void apply_locked(int seat, ActionId action);
  void speak_locked(int seat, const std::string& text);
  void emit_locked(std::string type, json payload);
  bool is_human(int seat) const;
  json legal_json_locked() const;

  std::string id_;
  SessionConfig config_;
  HeuristicHandle heuristic_;
  llm::Gateway* gateway_;
  StatePtr state_;
  Rng rng_;
  std::vector<std::unique_ptr<DialogueAgent>> agents_;
  std::vector<Event> events_;
  json action_log_ = json::array();
  int agent_moves_ = 0;
  mutable std::mutex mu_;
  mutable std::condition_variable changed_;
};

class SessionManager {
 public:
  explicit SessionManager(llm::Gateway* gateway = nullptr) : gateway_(gateway) {}

  std::shared_ptr<GameSession> create(const SessionConfig& config);
  // Throws SessionError(404).
  std::shared_ptr<GameSession> get(const std::string& id) const;
  std::size_t size() const;

 private:
  llm::Gateway* gateway_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<GameSession>> sessions_;
  long next_ = 1;
};

}  // namespace strategist::app
