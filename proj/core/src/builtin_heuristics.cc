#include <algorithm>
#include <array>
#include <numeric>

#include "registry_internal.h"
#include "strategist/avalon.h"
#include "strategist/gops.h"

namespace strategist::detail {

namespace {

// The nine fields a GOPS heuristic may look at.
struct GopsView {
  std::vector<int> score_cards, p0_played, p1_played;
  bool is_turn = false;
  int s0 = 0, s1 = 0;
  std::vector<int> deck, h0, h1;

  int sum(const std::vector<int>& v) const { return std::accumulate(v.begin(), v.end(), 0); }
  // Tied prizes waiting for the next winner, recovered from the visible fields.
  int pot() const {
    int revealed = sum(score_cards);
    if (is_turn && !score_cards.empty()) revealed -= score_cards.back();
    return revealed - s0 - s1;
  }
  int on_table() const { return is_turn && !score_cards.empty() ? score_cards.back() : 0; }
};

GopsView gops_view(const State& state) {
  if (state.game() != GameKind::kGops) throw EngineMismatchError("gops heuristic on a non-gops state");
  const auto& g = static_cast<const gops::GopsState&>(state);
  GopsView v;
  v.score_cards = g.score_cards();
  v.p0_played = g.played(0);
  if (auto p = g.pending_p0_card()) v.p0_played.push_back(*p);
  v.p1_played = g.played(1);
  v.is_turn = g.is_turn();
  v.s0 = g.score(0);
  v.s1 = g.score(1);
  v.deck = g.score_deck();
  v.h0 = g.hand(0);
  v.h1 = g.hand(1);
  return v;
}

class LambdaEvaluator final : public Evaluator {
 public:
  using Fn = std::function<ValueEstimate(const State&)>;
  explicit LambdaEvaluator(Fn fn) : fn_(std::move(fn)) {}
  ValueEstimate evaluate(const State& state) const override { return fn_(state); }

 private:
  Fn fn_;
};

ValueEstimate estimate(std::vector<double> values, ordered_json intermediates) {
  ValueEstimate v;
  for (double x : values) v.raw.push_back(number(x));
  v.per_player = std::move(values);
  v.intermediates = std::move(intermediates);
  return v;
}

ValueEstimate constant_zero(const State& state) {
  return estimate(std::vector<double>(state.num_players(), 0.0), ordered_json::object());
}

ValueEstimate gops_current_score(const State& state) {
  const auto v = gops_view(state);
  return estimate({double(v.s0), double(v.s1)}, ordered_json::object());
}

ValueEstimate gops_hand_potential(const State& state) {
  const auto v = gops_view(state);
  const int pot0 = v.sum(v.h0);
  const int pot1 = v.sum(v.h1);
  ordered_json im;
  im["player_0_potential_score"] = pot0;
  im["player_1_potential_score"] = pot1;
  return estimate({double(v.s0 + pot0), double(v.s1 + pot1)}, im);
}

// Splits every prize still in play (deck, the card on the table, the pot) in
// proportion to the bidding strength left in each hand.
ValueEstimate gops_expected_share(const State& state) {
  const auto v = gops_view(state);
  const int remaining = v.sum(v.deck) + v.on_table() + v.pot();
  // Player 0's committed bid still competes for the card on the table.
  double strength0 = v.sum(v.h0);
  double strength1 = v.sum(v.h1);
  if (v.is_turn && v.p0_played.size() > v.p1_played.size()) strength0 += v.p0_played.back();
  const double total = strength0 + strength1;
  const double share0 = total > 0.0 ? strength0 / total : 0.5;
  ordered_json im;
  im["remaining_value"] = remaining;
  im["player_0_share"] = share0;
  return estimate({v.s0 + remaining * share0, v.s1 + remaining * (1.0 - share0)}, im);
}

ValueEstimate gops_strategic_adjustment(const State& state) {
  const auto v = gops_view(state);
  const int n = static_cast<int>(v.deck.size() + v.score_cards.size());
  const int remaining = v.sum(v.deck) + v.on_table() + v.pot();
  const double s0 = v.sum(v.h0), s1 = v.sum(v.h1);
  const double share0 = s0 + s1 > 0 ? s0 / (s0 + s1) : 0.5;
  const double expected0 = v.s0 + remaining * share0;
  const double expected1 = v.s1 + remaining * (1.0 - share0);
  const int high_cards = static_cast<int>(
      std::count_if(v.deck.begin(), v.deck.end(), [n](int c) { return 2 * c > n; }));
  const double dynamic_penalty = 0.1 * high_cards;
  const int size0 = static_cast<int>(v.h0.size()), size1 = static_cast<int>(v.h1.size());
  const int hand_reward0 = std::max(0, size0 - size1);
  const int hand_reward1 = std::max(0, size1 - size0);
  const int max0 = v.h0.empty() ? 0 : v.h0.back();
  const int max1 = v.h1.empty() ? 0 : v.h1.back();
  const int adjustment0 = static_cast<int>(std::count_if(v.h0.begin(), v.h0.end(), [&](int c) { return c > max1; }));
  const int adjustment1 = static_cast<int>(std::count_if(v.h1.begin(), v.h1.end(), [&](int c) { return c > max0; }));
  // Spending high cards early leaves the opponent in control of the deck.
  const int spent0 = v.sum(v.p0_played), spent1 = v.sum(v.p1_played);
  const int strategic0 = remaining > 0 && spent0 < spent1 ? 1 : 0;
  const int strategic1 = remaining > 0 && spent1 < spent0 ? 1 : 0;
  const double final0 = expected0 + 0.5 * hand_reward0 + 0.25 * adjustment0 + 0.5 * strategic0 -
                        (expected0 < expected1 ? dynamic_penalty : 0.0);
  const double final1 = expected1 + 0.5 * hand_reward1 + 0.25 * adjustment1 + 0.5 * strategic1 -
                        (expected1 < expected0 ? dynamic_penalty : 0.0);
  ordered_json im;
  im["player_0_expected_score"] = number(expected0);
  im["player_1_expected_score"] = number(expected1);
  im["dynamic_penalty"] = dynamic_penalty;
  im["player_0_hand_reward"] = hand_reward0;
  im["player_1_hand_reward"] = hand_reward1;
  im["player_0_adjustment"] = adjustment0;
  im["player_1_adjustment"] = adjustment1;
  im["player_0_strategic_adjustment"] = strategic0;
  im["player_1_strategic_adjustment"] = strategic1;
  return estimate({final0 - final1, final1 - final0}, im);
}

// Good's chance of winning from (successes, failures) if every remaining quest
// is a coin flip and the Assassin guesses Merlin uniformly.
double good_win_probability(int successes, int failures, int num_good) {
  if (failures >= 3) return 0.0;
  if (successes >= 3) return 1.0 - 1.0 / num_good;
  return 0.5 * good_win_probability(successes + 1, failures, num_good) +
         0.5 * good_win_probability(successes, failures + 1, num_good);
}

ValueEstimate avalon_values(const avalon::AvalonState& s, double p_good, ordered_json im) {
  std::vector<double> values(s.num_players());
  for (int i = 0; i < s.num_players(); ++i) {
    values[i] = s.side_of_seat(i) == avalon::Side::kGood ? p_good : 1.0 - p_good;
  }
  im["good_win_probability"] = p_good;
  return estimate(std::move(values), std::move(im));
}

const avalon::AvalonState& avalon_state(const State& state) {
  if (state.game() != GameKind::kAvalon) throw EngineMismatchError("avalon heuristic on a non-avalon state");
  return static_cast<const avalon::AvalonState&>(state);
}

int num_good(const avalon::AvalonState& s) { return s.num_players() - static_cast<int>(s.evil_seats().size()); }

ValueEstimate avalon_quest_progress(const State& state) {
  const auto& s = avalon_state(state);
  double p;
  if (s.is_terminal()) {
    p = *s.winner() == avalon::Side::kGood ? 1.0 : 0.0;
  } else {
    p = good_win_probability(s.successes(), s.failures(), num_good(s));
  }
  ordered_json im;
  im["successes"] = s.successes();
  im["failures"] = s.failures();
  return avalon_values(s, p, im);
}

double binomial_tail(int trials, int at_least) {
  if (at_least <= 0) return 1.0;
  if (at_least > trials) return 0.0;
  double total = 0.0;
  double c = 1.0;
  for (int k = 0; k <= trials; ++k) {
    if (k > 0) c = c * (trials - k + 1) / k;
    if (k >= at_least) total += c;
  }
  return total / std::pow(2.0, trials);
}

// Reads the hidden roles: Evil quest members are assumed to fail and
// undecided voters to flip coins.
ValueEstimate avalon_oracle(const State& state) {
  const auto& s = avalon_state(state);
  const int good = num_good(s);
  const int succ = s.successes(), fail = s.failures();
  ordered_json im;
  double p = 0.0;
  if (s.is_terminal()) {
    p = *s.winner() == avalon::Side::kGood ? 1.0 : 0.0;
    return avalon_values(s, p, im);
  }
  const auto members = avalon::team_members(s.proposed_team());
  int evil_on_team = 0;
  for (int m : members) evil_on_team += s.side_of_seat(m) == avalon::Side::kEvil;
  const double if_success = good_win_probability(succ + 1, fail, good);
  const double if_fail = good_win_probability(succ, fail + 1, good);
  const double now = good_win_probability(succ, fail, good);
  switch (s.phase()) {
    case avalon::Phase::kVoting: {
      const int n = s.num_players();
      const auto& votes = s.pending_votes();
      const int approvals = static_cast<int>(std::count(votes.begin(), votes.end(), 1));
      const int undecided = n - static_cast<int>(votes.size());
      const double p_approve = binomial_tail(undecided, n / 2 + 1 - approvals);
      const double quest_value = evil_on_team > 0 ? if_fail : if_success;
      p = p_approve * quest_value + (1.0 - p_approve) * now;
      im["evil_on_team"] = evil_on_team;
      im["approval_probability"] = p_approve;
      break;
    }
    case avalon::Phase::kQuest: {
      const auto& cast = s.pending_quest_votes();
      bool failed = std::count(cast.begin(), cast.end(), 0) > 0;
      for (std::size_t k = cast.size(); k < members.size(); ++k) {
        failed = failed || s.side_of_seat(members[k]) == avalon::Side::kEvil;
      }
      p = failed ? if_fail : if_success;
      im["evil_on_team"] = evil_on_team;
      break;
    }
    case avalon::Phase::kAssassination:
      p = 1.0 - 1.0 / good;
      break;
    default:
      p = now;
      break;
  }
  return avalon_values(s, p, im);
}

template <typename F>
BuiltinRegistry::Factory fixed(F fn) {
  return [fn](const std::string&) -> std::shared_ptr<const Evaluator> {
    return std::make_shared<LambdaEvaluator>(fn);
  };
}

}  // namespace

void register_builtin_heuristics(BuiltinRegistry& r) {
  r.add({"constant_zero", std::nullopt, "Every player is valued at zero.",
         "def evaluate_state(state):\n    return (0, 0), {}\n"},
        fixed(constant_zero));
  r.add({"gops_current_score", GameKind::kGops, "Each player's score so far.",
         "def evaluate_state(state):\n"
         "    player_0_score = state[4]\n"
         "    player_1_score = state[5]\n"
         "    return (player_0_score, player_1_score), {}\n"},
        fixed(gops_current_score));
  r.add({"gops_hand_potential", GameKind::kGops, "Score so far plus the sum of the cards left in hand.",
         "def evaluate_state(state):\n"
         "    player_0_score = state[4]\n"
         "    player_1_score = state[5]\n"
         "    player_0_hand = state[7]\n"
         "    player_1_hand = state[8]\n"
         "    player_0_potential_score = sum(player_0_hand)\n"
         "    player_1_potential_score = sum(player_1_hand)\n"
         "    player_scores = (player_0_score + player_0_potential_score,\n"
         "                     player_1_score + player_1_potential_score)\n"
         "    intermediate_values = {\n"
         "        'player_0_potential_score': player_0_potential_score,\n"
         "        'player_1_potential_score': player_1_potential_score,\n"
         "    }\n"
         "    return player_scores, intermediate_values\n"},
        fixed(gops_hand_potential));
  r.add({"gops_expected_share", GameKind::kGops,
         "Score so far plus a share of every prize still in play, split by remaining hand strength.",
         "def evaluate_state(state):\n"
         "    score_cards, p0_played, p1_played, is_turn, s0, s1, deck, h0, h1 = state\n"
         "    on_table = score_cards[-1] if is_turn and score_cards else 0\n"
         "    pot = sum(score_cards) - on_table - s0 - s1\n"
         "    remaining_value = sum(deck) + on_table + pot\n"
         "    strength0 = sum(h0) + (p0_played[-1] if len(p0_played) > len(p1_played) else 0)\n"
         "    strength1 = sum(h1)\n"
         "    total = strength0 + strength1\n"
         "    share = strength0 / total if total else 0.5\n"
         "    values = (s0 + remaining_value * share, s1 + remaining_value * (1 - share))\n"
         "    return values, {'remaining_value': remaining_value, 'player_0_share': share}\n"},
        fixed(gops_expected_share));
  r.add({"gops_strategic_adjustment", GameKind::kGops,
         "Expected-share scores with hand-size, top-card and tempo adjustments and a high-card penalty, "
         "reported as point differences.",
         "def evaluate_state(state):\n"
         "    # expected scores from the remaining prize pool split by hand strength,\n"
         "    # then hand-size reward, top-card adjustment, a tempo-based strategic\n"
         "    # adjustment and a dynamic penalty for high cards left in the deck\n"
         "    ...\n"},
        fixed(gops_strategic_adjustment));
  r.add({"avalon_quest_progress", GameKind::kAvalon,
         "Good's win probability from the quest score alone, treating future quests as coin flips.",
         "def evaluate_state(state):\n"
         "    # P(good) from successes and failures so far, future quests 50/50,\n"
         "    # assassin guesses Merlin uniformly among Good players\n"
         "    ...\n"},
        fixed(avalon_quest_progress));
  r.add({"avalon_oracle", GameKind::kAvalon,
         "Quest-progress value that also reads the hidden roles of the proposed team.",
         "def evaluate_state(state):\n"
         "    # quest-progress value; a team with an Evil member is expected to fail\n"
         "    ...\n"},
        fixed(avalon_oracle));
}

}  // namespace strategist::detail
