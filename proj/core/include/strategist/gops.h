#pragma once

// Game of Pure Strategy. Each round the environment reveals a score card and
// both players bid a card from identical hands; the higher bid takes the score
// card plus any pot built up by earlier ties. The simultaneous bids are
// serialized as player 0 then player 1, with player 0's pending card hidden
// from player 1.

#include <optional>
#include <vector>

#include "strategist/game.h"

namespace strategist::gops {

inline constexpr int kMinCards = 2;
inline constexpr int kMaxCards = 13;

class GopsState final : public State {
 public:
  // Fresh game with hands and deck {1..n}; the environment acts first.
  explicit GopsState(int num_cards);

  GameKind game() const override { return GameKind::kGops; }
  int num_players() const override { return 2; }
  PlayerId current_actor() const override;
  std::vector<ActionId> legal_actions() const override;
  bool is_terminal() const override;
  std::vector<double> returns() const override;
  ActionDistribution chance_outcomes() const override;
  StatePtr child(ActionId action) const override;
  StatePtr clone() const override { return std::make_unique<GopsState>(*this); }
  json to_json() const override;
  json observation(PlayerId viewer) const override;
  std::string state_key() const override;
  std::string infoset_key(PlayerId viewer) const override;
  std::string stage_key() const override;
  std::string action_to_string(ActionId action) const override;
  json action_to_json(ActionId action) const override;
  ActionId action_from_json(const json& j) const override;

  static GopsState from_json(const json& j);

  GopsState apply(ActionId action) const;
  // Same history with a different hidden card for player 0. The card must be
  // one player 0 has not played.
  GopsState with_pending(int card) const;

  int num_cards() const { return num_cards_; }
  // True while players are to bid on a revealed card.
  bool is_turn() const { return score_cards_.size() > p1_played_.size(); }
  int round() const { return static_cast<int>(p1_played_.size()); }
  const std::vector<int>& score_cards() const { return score_cards_; }
  const std::vector<int>& played(int seat) const { return seat == 0 ? p0_played_ : p1_played_; }
  const std::vector<int>& hand(int seat) const { return seat == 0 ? p0_hand_ : p1_hand_; }
  const std::vector<int>& score_deck() const { return score_deck_; }
  int score(int seat) const { return seat == 0 ? p0_score_ : p1_score_; }
  int pot() const { return pot_; }
  std::optional<int> pending_p0_card() const { return pending_p0_; }
  // The score card currently being bid on, if any.
  std::optional<int> card_on_table() const;

  // p0_score + p1_score + pot + deck + card on table; always n(n+1)/2.
  int conserved_total() const;

 private:
  GopsState() = default;
  void validate() const;

  int num_cards_ = 0;
  std::vector<int> score_cards_;
  std::vector<int> p0_played_;
  std::vector<int> p1_played_;
  int p0_score_ = 0;
  int p1_score_ = 0;
  int pot_ = 0;
  std::vector<int> score_deck_;
  std::vector<int> p0_hand_;
  std::vector<int> p1_hand_;
  std::optional<int> pending_p0_;
};

// Throws StrategistError unless kMinCards <= num_cards <= kMaxCards. The seed
// is accepted for interface symmetry; GOPS deals identically and draws happen
// through chance nodes.
GopsState new_game(int num_cards, std::uint64_t seed = 0);

// The nine-field heuristic view, keys in canonical order. The pending card of
// player 0, if any, is shown as played.
nlohmann::ordered_json heuristic_view(const GopsState& state);

// Python-literal rendering of the nine-field tuple, used in prompts.
std::string heuristic_tuple_text(const GopsState& state);

// Plays a full game from fixed orders: score card draws and both players'
// bids, one per round.
GopsState replay(const std::vector<int>& score_cards, const std::vector<int>& p0_plays,
                 const std::vector<int>& p1_plays);

}  // namespace strategist::gops
