#pragma once

// Resistance: Avalon for five or six players with Merlin, Servants, the
// Assassin and a Minion.
//
// Action encoding by phase:
//   TeamSelection  bitmask of seats, popcount equal to the quest's team size
//   Voting         0 reject, 1 approve (seats vote in order, hidden until all in)
//   Quest          0 fail, 1 pass (team members in seat order; Good must pass)
//   Assassination  target seat

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "strategist/game.h"

namespace strategist::avalon {

enum class Role { kMerlin, kServant, kAssassin, kMinion };
enum class Side { kGood, kEvil };
enum class Phase { kTeamSelection, kVoting, kQuest, kAssassination, kTerminal };

std::string to_string(Role role);
std::string to_string(Side side);
std::string to_string(Phase phase);
Role role_from_string(const std::string& name);
Phase phase_from_string(const std::string& name);
Side side_of(Role role);

inline constexpr ActionId kReject = 0;
inline constexpr ActionId kApprove = 1;
inline constexpr ActionId kFail = 0;
inline constexpr ActionId kPass = 1;

struct QuestConfig {
  std::array<int, 5> team_sizes{};
  std::array<int, 5> fails_required{};
};

QuestConfig quest_config(int num_players);
std::vector<Role> role_multiset(int num_players);

using TeamMask = std::uint32_t;
std::vector<int> team_members(TeamMask mask);
TeamMask team_mask(const std::vector<int>& members);

struct ProposalRecord {
  int quest = 0;
  int leader = 0;
  TeamMask team = 0;
  std::vector<int> votes;  // empty when voting was skipped
  bool approved = false;
  bool forced = false;  // fifth proposal, no vote held
};

struct QuestRecord {
  int quest = 0;
  TeamMask team = 0;
  int fails = 0;
  bool success = false;
};

struct Speech {
  int player = 0;
  std::string text;
  int quest = 0;
  Phase phase = Phase::kTeamSelection;
};

class AvalonState final : public State {
 public:
  // `roles` must be a permutation of role_multiset(roles.size()).
  AvalonState(std::vector<Role> roles, int leader, int discussion_rounds = 1);

  GameKind game() const override { return GameKind::kAvalon; }
  int num_players() const override { return static_cast<int>(roles_.size()); }
  PlayerId current_actor() const override;
  std::vector<ActionId> legal_actions() const override;
  bool is_terminal() const override { return phase_ == Phase::kTerminal; }
  std::vector<double> returns() const override;
  ActionDistribution chance_outcomes() const override { return {}; }
  StatePtr child(ActionId action) const override;
  StatePtr clone() const override { return std::make_unique<AvalonState>(*this); }
  json to_json() const override;
  json observation(PlayerId viewer) const override;
  std::string state_key() const override;
  std::string infoset_key(PlayerId viewer) const override;
  std::string stage_key() const override;
  std::string action_to_string(ActionId action) const override;
  json action_to_json(ActionId action) const override;
  ActionId action_from_json(const json& j) const override;

  static AvalonState from_json(const json& j);

  AvalonState apply(ActionId action) const;

  // Appends a public speech. Throws StrategistError when no discussion window
  // is open.
  AvalonState record_dialogue(PlayerId player, const std::string& text) const;
  bool discussion_open() const;
  int discussion_rounds() const { return discussion_rounds_; }
  int speeches_in_window() const { return speeches_in_window_; }
  // Seat expected to speak next in the open window, in seat order from the leader.
  std::optional<int> next_speaker() const;

  Phase phase() const { return phase_; }
  int quest_index() const { return quest_index_; }
  int rejection_streak() const { return rejection_streak_; }
  int leader() const { return leader_; }
  TeamMask proposed_team() const { return proposed_team_; }
  const std::vector<bool>& quest_results() const { return quest_results_; }
  const std::vector<ProposalRecord>& proposals() const { return proposals_; }
  const std::vector<QuestRecord>& quests() const { return quests_; }
  const std::vector<Speech>& discussion_log() const { return discussion_log_; }
  const std::vector<int>& pending_votes() const { return pending_votes_; }
  const std::vector<int>& pending_quest_votes() const { return pending_quest_votes_; }
  const std::vector<Role>& roles() const { return roles_; }
  Role role_of(int seat) const { return roles_.at(seat); }
  Side side_of_seat(int seat) const { return side_of(roles_.at(seat)); }
  std::vector<int> evil_seats() const;
  int merlin_seat() const;
  int assassin_seat() const;
  int team_size() const;
  int successes() const;
  int failures() const;
  std::optional<Side> winner() const { return winner_; }
  std::optional<int> assassination_target() const { return assassination_target_; }

  // Same public history, different hidden roles. Pending hidden votes are
  // kept; callers resample them when they are not consistent.
  AvalonState with_roles(std::vector<Role> roles) const;
  // Replaces the hidden, not yet revealed votes of the current stage.
  AvalonState with_pending_votes(std::vector<int> votes, std::vector<int> quest_votes) const;

  // Whether `viewer` knows the full Evil set.
  bool knows_evil(int viewer) const;

 private:
  AvalonState() = default;
  void validate() const;
  void advance_after_quest();
  void open_window();

  std::vector<Role> roles_;
  int discussion_rounds_ = 1;
  Phase phase_ = Phase::kTeamSelection;
  int quest_index_ = 0;
  int rejection_streak_ = 0;
  int leader_ = 0;
  TeamMask proposed_team_ = 0;
  std::vector<bool> quest_results_;
  std::vector<ProposalRecord> proposals_;
  std::vector<QuestRecord> quests_;
  std::vector<Speech> discussion_log_;
  std::vector<int> pending_votes_;
  std::vector<int> pending_quest_votes_;
  int speeches_in_window_ = 0;
  std::optional<Side> winner_;
  std::optional<int> assassination_target_;
};

// Roles shuffled and leader drawn from `seed`. Throws StrategistError for
// player counts other than 5 or 6.
AvalonState new_game(int num_players, std::uint64_t seed, int discussion_rounds = 1);

// Plain-language description of what `viewer` knows, in the form used by the
// dialogue prompts.
std::string describe_state(const AvalonState& state, int viewer);

}  // namespace strategist::avalon
