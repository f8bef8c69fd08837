#include "strategist/gops.h"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace strategist::gops {

namespace {

std::vector<int> iota_cards(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 1);
  return v;
}

void erase_card(std::vector<int>& cards, int card) {
  auto it = std::lower_bound(cards.begin(), cards.end(), card);
  cards.erase(it);
}

bool contains(const std::vector<int>& sorted, int card) {
  return std::binary_search(sorted.begin(), sorted.end(), card);
}

void append_list(std::ostringstream& out, const std::vector<int>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    out << v[i];
  }
}

std::string python_list(const std::vector<int>& v) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    out << v[i];
  }
  out << ']';
  return out.str();
}

std::string python_set(const std::vector<int>& v) {
  if (v.empty()) return "set()";
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    out << v[i];
  }
  out << '}';
  return out.str();
}

std::vector<int> int_list(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw EngineMismatchError(std::string("gops state missing list '") + key + "'");
  }
  return j.at(key).get<std::vector<int>>();
}

}  // namespace

GopsState::GopsState(int num_cards)
    : num_cards_(num_cards),
      score_deck_(iota_cards(num_cards)),
      p0_hand_(iota_cards(num_cards)),
      p1_hand_(iota_cards(num_cards)) {
  if (num_cards < kMinCards || num_cards > kMaxCards) {
    throw StrategistError("gops needs between 2 and 13 cards, got " + std::to_string(num_cards));
  }
}

GopsState new_game(int num_cards, std::uint64_t /*seed*/) { return GopsState(num_cards); }

bool GopsState::is_terminal() const { return static_cast<int>(p1_played_.size()) == num_cards_; }

PlayerId GopsState::current_actor() const {
  if (is_terminal()) return PlayerId::environment();
  if (!is_turn()) return PlayerId::environment();
  return pending_p0_ ? PlayerId(1) : PlayerId(0);
}

std::vector<ActionId> GopsState::legal_actions() const {
  if (is_terminal()) return {};
  const std::vector<int>* cards = &score_deck_;
  if (is_turn()) cards = pending_p0_ ? &p1_hand_ : &p0_hand_;
  return {cards->begin(), cards->end()};
}

std::vector<double> GopsState::returns() const {
  if (!is_terminal()) throw StrategistError("returns requested on a non-terminal gops state");
  const double diff = static_cast<double>(p0_score_ - p1_score_);
  return {diff, -diff};
}

ActionDistribution GopsState::chance_outcomes() const {
  if (is_terminal() || is_turn()) return {};
  const auto actions = legal_actions();
  return ActionDistribution::uniform(actions);
}

std::optional<int> GopsState::card_on_table() const {
  if (!is_turn()) return std::nullopt;
  return score_cards_.back();
}

int GopsState::conserved_total() const {
  int total = p0_score_ + p1_score_ + pot_;
  total = std::accumulate(score_deck_.begin(), score_deck_.end(), total);
  if (auto card = card_on_table()) total += *card;
  return total;
}

GopsState GopsState::apply(ActionId action) const {
  const PlayerId actor = current_actor();
  if (is_terminal()) throw IllegalActionError(actor, action, "gops game is over");
  if (action < 1 || action > num_cards_) throw IllegalActionError(actor, action, "no such card");
  const int card = static_cast<int>(action);
  GopsState next = *this;
  if (!is_turn()) {
    if (!contains(score_deck_, card)) throw IllegalActionError(actor, action, "card not in score deck");
    erase_card(next.score_deck_, card);
    next.score_cards_.push_back(card);
    return next;
  }
  if (!pending_p0_) {
    if (!contains(p0_hand_, card)) throw IllegalActionError(actor, action, "card not in hand");
    erase_card(next.p0_hand_, card);
    next.pending_p0_ = card;
    return next;
  }
  if (!contains(p1_hand_, card)) throw IllegalActionError(actor, action, "card not in hand");
  erase_card(next.p1_hand_, card);
  const int b0 = *pending_p0_;
  next.pending_p0_.reset();
  next.p0_played_.push_back(b0);
  next.p1_played_.push_back(card);
  const int prize = score_cards_.back();
  if (b0 > card) {
    next.p0_score_ += prize + pot_;
    next.pot_ = 0;
  } else if (card > b0) {
    next.p1_score_ += prize + pot_;
    next.pot_ = 0;
  } else {
    // A tie on the last round leaves the pot unclaimed.
    next.pot_ += prize;
  }
  return next;
}

GopsState GopsState::with_pending(int card) const {
  if (!pending_p0_) throw StrategistError("no pending card to replace");
  std::vector<int> hand = p0_hand_;
  hand.insert(std::upper_bound(hand.begin(), hand.end(), *pending_p0_), *pending_p0_);
  if (!contains(hand, card)) throw StrategistError("card " + std::to_string(card) + " already played");
  erase_card(hand, card);
  GopsState next = *this;
  next.p0_hand_ = std::move(hand);
  next.pending_p0_ = card;
  return next;
}

StatePtr GopsState::child(ActionId action) const { return std::make_unique<GopsState>(apply(action)); }

json GopsState::to_json() const {
  json j = heuristic_view(*this);
  // The full state keeps the pending card separate from the played lists.
  j["player_0_played_cards"] = p0_played_;
  j["player_0_hand"] = p0_hand_;
  j["game"] = "gops";
  j["num_cards"] = num_cards_;
  j["pot"] = pot_;
  j["pending_p0_card"] = pending_p0_ ? json(*pending_p0_) : json(nullptr);
  return j;
}

json GopsState::observation(PlayerId viewer) const {
  json j = json(heuristic_view(*this));
  const bool hide = pending_p0_ && viewer != PlayerId(0);
  if (hide) {
    j["player_0_played_cards"] = p0_played_;
    std::vector<int> hand = p0_hand_;
    hand.insert(std::upper_bound(hand.begin(), hand.end(), *pending_p0_), *pending_p0_);
    j["player_0_hand"] = hand;
  }
  j["game"] = "gops";
  j["num_cards"] = num_cards_;
  j["pot"] = pot_;
  j["player_0_committed"] = pending_p0_.has_value();
  j["viewer"] = viewer.seat();
  return j;
}

std::string GopsState::state_key() const {
  std::ostringstream out;
  out << 'g' << num_cards_ << "|s";
  append_list(out, score_cards_);
  out << "|a";
  append_list(out, p0_played_);
  out << "|b";
  append_list(out, p1_played_);
  out << "|p" << (pending_p0_ ? *pending_p0_ : 0);
  return out.str();
}

std::string GopsState::infoset_key(PlayerId viewer) const {
  if (!pending_p0_ || viewer == PlayerId(0)) return state_key();
  std::ostringstream out;
  out << 'g' << num_cards_ << "|s";
  append_list(out, score_cards_);
  out << "|a";
  append_list(out, p0_played_);
  out << "|b";
  append_list(out, p1_played_);
  out << "|p?";
  return out.str();
}

std::string GopsState::stage_key() const { return "r" + std::to_string(round()); }

std::string GopsState::action_to_string(ActionId action) const {
  return (is_turn() ? "play " : "draw ") + std::to_string(action);
}

json GopsState::action_to_json(ActionId action) const { return {{"card", action}}; }

ActionId GopsState::action_from_json(const json& j) const {
  if (j.is_number_integer()) return j.get<ActionId>();
  if (j.is_object() && j.contains("card") && j.at("card").is_number_integer()) {
    return j.at("card").get<ActionId>();
  }
  throw StrategistError("gops action must be {\"card\": n}");
}

void GopsState::validate() const {
  auto fail = [](const std::string& what) { throw EngineMismatchError("corrupt gops state: " + what); };
  if (num_cards_ < kMinCards || num_cards_ > kMaxCards) fail("card count");
  const int n = num_cards_;
  auto in_range = [n](const std::vector<int>& v) {
    return std::all_of(v.begin(), v.end(), [n](int c) { return c >= 1 && c <= n; });
  };
  for (const auto* v : {&score_cards_, &p0_played_, &p1_played_, &score_deck_, &p0_hand_, &p1_hand_}) {
    if (!in_range(*v)) fail("card out of range");
  }
  if (!std::is_sorted(score_deck_.begin(), score_deck_.end()) ||
      !std::is_sorted(p0_hand_.begin(), p0_hand_.end()) ||
      !std::is_sorted(p1_hand_.begin(), p1_hand_.end())) {
    fail("unsorted set");
  }
  auto partition_ok = [n](std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    return a == iota_cards(n);
  };
  if (!partition_ok(score_cards_, score_deck_)) fail("score cards");
  std::vector<int> p0_spent = p0_played_;
  if (pending_p0_) p0_spent.push_back(*pending_p0_);
  if (!partition_ok(p0_spent, p0_hand_)) fail("player 0 cards");
  if (!partition_ok(p1_played_, p1_hand_)) fail("player 1 cards");
  if (p0_played_.size() != p1_played_.size()) fail("played lengths");
  if (score_cards_.size() < p1_played_.size() || score_cards_.size() > p1_played_.size() + 1) {
    fail("round bookkeeping");
  }
  if (pending_p0_ && !is_turn()) fail("pending card outside a bidding round");
  if (pot_ < 0 || p0_score_ < 0 || p1_score_ < 0) fail("negative score");
  if (conserved_total() != n * (n + 1) / 2) fail("conservation");
}

GopsState GopsState::from_json(const json& j) {
  try {
    if (!j.is_object() || j.value("game", std::string()) != "gops") {
      throw EngineMismatchError("not a gops state");
    }
    GopsState s;
    s.num_cards_ = j.at("num_cards").get<int>();
    s.score_cards_ = int_list(j, "score_cards");
    s.p0_played_ = int_list(j, "player_0_played_cards");
    s.p1_played_ = int_list(j, "player_1_played_cards");
    s.p0_score_ = j.at("player_0_score").get<int>();
    s.p1_score_ = j.at("player_1_score").get<int>();
    s.score_deck_ = int_list(j, "score_deck");
    s.p0_hand_ = int_list(j, "player_0_hand");
    s.p1_hand_ = int_list(j, "player_1_hand");
    s.pot_ = j.value("pot", 0);
    if (j.contains("pending_p0_card") && !j.at("pending_p0_card").is_null()) {
      s.pending_p0_ = j.at("pending_p0_card").get<int>();
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw EngineMismatchError(std::string("corrupt gops state: ") + e.what());
  }
}

nlohmann::ordered_json heuristic_view(const GopsState& s) {
  std::vector<int> p0_played = s.played(0);
  std::vector<int> p0_hand = s.hand(0);
  if (auto pending = s.pending_p0_card()) p0_played.push_back(*pending);
  nlohmann::ordered_json j;
  j["score_cards"] = s.score_cards();
  j["player_0_played_cards"] = p0_played;
  j["player_1_played_cards"] = s.played(1);
  j["is_turn"] = s.is_turn();
  j["player_0_score"] = s.score(0);
  j["player_1_score"] = s.score(1);
  j["score_deck"] = s.score_deck();
  j["player_0_hand"] = p0_hand;
  j["player_1_hand"] = s.hand(1);
  return j;
}

std::string heuristic_tuple_text(const GopsState& s) {
  const auto v = heuristic_view(s);
  std::ostringstream out;
  out << '(' << python_list(v["score_cards"].get<std::vector<int>>()) << ", "
      << python_list(v["player_0_played_cards"].get<std::vector<int>>()) << ", "
      << python_list(v["player_1_played_cards"].get<std::vector<int>>()) << ", "
      << (s.is_turn() ? "True" : "False") << ", " << s.score(0) << ", " << s.score(1) << ", "
      << python_set(s.score_deck()) << ", " << python_set(v["player_0_hand"].get<std::vector<int>>())
      << ", " << python_set(s.hand(1)) << ')';
  return out.str();
}

GopsState replay(const std::vector<int>& score_cards, const std::vector<int>& p0_plays,
                 const std::vector<int>& p1_plays) {
  if (score_cards.size() != p0_plays.size() || score_cards.size() != p1_plays.size()) {
    throw StrategistError("replay orders differ in length");
  }
  GopsState s(static_cast<int>(score_cards.size()));
  for (std::size_t r = 0; r < score_cards.size(); ++r) {
    s = s.apply(score_cards[r]).apply(p0_plays[r]).apply(p1_plays[r]);
  }
  return s;
}

}  // namespace strategist::gops
