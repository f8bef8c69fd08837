#include "strategist/avalon.h"

#include <algorithm>
#include <bit>
#include <sstream>

namespace strategist::avalon {

std::string to_string(Role role) {
  switch (role) {
    case Role::kMerlin:
      return "Merlin";
    case Role::kServant:
      return "Servant";
    case Role::kAssassin:
      return "Assassin";
    case Role::kMinion:
      return "Minion";
  }
  return "?";
}

std::string to_string(Side side) { return side == Side::kGood ? "Good" : "Evil"; }

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::kTeamSelection:
      return "TeamSelection";
    case Phase::kVoting:
      return "Voting";
    case Phase::kQuest:
      return "Quest";
    case Phase::kAssassination:
      return "Assassination";
    case Phase::kTerminal:
      return "Terminal";
  }
  return "?";
}

Role role_from_string(const std::string& name) {
  for (Role r : {Role::kMerlin, Role::kServant, Role::kAssassin, Role::kMinion}) {
    if (to_string(r) == name) return r;
  }
  throw StrategistError("unknown avalon role '" + name + "'");
}

Phase phase_from_string(const std::string& name) {
  for (Phase p : {Phase::kTeamSelection, Phase::kVoting, Phase::kQuest, Phase::kAssassination,
                  Phase::kTerminal}) {
    if (to_string(p) == name) return p;
  }
  throw StrategistError("unknown avalon phase '" + name + "'");
}

Side side_of(Role role) {
  return (role == Role::kAssassin || role == Role::kMinion) ? Side::kEvil : Side::kGood;
}

QuestConfig quest_config(int num_players) {
  switch (num_players) {
    case 5:
      return {{2, 3, 2, 3, 3}, {1, 1, 1, 1, 1}};
    case 6:
      return {{2, 3, 4, 3, 4}, {1, 1, 1, 1, 1}};
    default:
      throw StrategistError("avalon supports 5 or 6 players, got " + std::to_string(num_players));
  }
}

std::vector<Role> role_multiset(int num_players) {
  quest_config(num_players);
  std::vector<Role> roles{Role::kMerlin};
  for (int i = 0; i < num_players - 3; ++i) roles.push_back(Role::kServant);
  roles.push_back(Role::kAssassin);
  roles.push_back(Role::kMinion);
  return roles;
}

std::vector<int> team_members(TeamMask mask) {
  std::vector<int> members;
  for (int seat = 0; mask; ++seat, mask >>= 1) {
    if (mask & 1u) members.push_back(seat);
  }
  return members;
}

TeamMask team_mask(const std::vector<int>& members) {
  TeamMask mask = 0;
  for (int m : members) {
    if (m < 0 || m >= 32) throw StrategistError("seat out of range in team");
    mask |= TeamMask{1} << m;
  }
  return mask;
}

namespace {

char role_char(Role r) {
  switch (r) {
    case Role::kMerlin:
      return 'M';
    case Role::kServant:
      return 'S';
    case Role::kAssassin:
      return 'A';
    case Role::kMinion:
      return 'm';
  }
  return '?';
}

std::string phase_phrase(Phase p) {
  switch (p) {
    case Phase::kTeamSelection:
      return "team selection";
    case Phase::kVoting:
      return "voting";
    case Phase::kQuest:
      return "quest";
    case Phase::kAssassination:
      return "assassination";
    case Phase::kTerminal:
      return "end of game";
  }
  return "";
}

std::string python_bools(const std::vector<bool>& v) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    out << (v[i] ? "True" : "False");
  }
  if (v.size() == 1) out << ',';
  out << ')';
  return out.str();
}

}  // namespace

AvalonState::AvalonState(std::vector<Role> roles, int leader, int discussion_rounds)
    : roles_(std::move(roles)), discussion_rounds_(discussion_rounds), leader_(leader) {
  const int n = static_cast<int>(roles_.size());
  auto expected = role_multiset(n);
  auto sorted = roles_;
  std::sort(sorted.begin(), sorted.end());
  std::sort(expected.begin(), expected.end());
  if (sorted != expected) throw StrategistError("role assignment is not a valid avalon deal");
  if (leader < 0 || leader >= n) throw StrategistError("leader seat out of range");
  if (discussion_rounds < 0) throw StrategistError("discussion rounds must be non-negative");
}

AvalonState new_game(int num_players, std::uint64_t seed, int discussion_rounds) {
  auto roles = role_multiset(num_players);
  Rng rng(seed);
  std::shuffle(roles.begin(), roles.end(), rng);
  std::uniform_int_distribution<int> seat(0, num_players - 1);
  const int leader = seat(rng);
  return AvalonState(std::move(roles), leader, discussion_rounds);
}

int AvalonState::team_size() const {
  return quest_config(num_players()).team_sizes[std::min(quest_index_, 4)];
}

int AvalonState::successes() const {
  return static_cast<int>(std::count(quest_results_.begin(), quest_results_.end(), true));
}

int AvalonState::failures() const {
  return static_cast<int>(std::count(quest_results_.begin(), quest_results_.end(), false));
}

std::vector<int> AvalonState::evil_seats() const {
  std::vector<int> seats;
  for (int i = 0; i < num_players(); ++i) {
    if (side_of(roles_[i]) == Side::kEvil) seats.push_back(i);
  }
  return seats;
}

int AvalonState::merlin_seat() const {
  return static_cast<int>(std::find(roles_.begin(), roles_.end(), Role::kMerlin) - roles_.begin());
}

int AvalonState::assassin_seat() const {
  return static_cast<int>(std::find(roles_.begin(), roles_.end(), Role::kAssassin) - roles_.begin());
}

bool AvalonState::knows_evil(int viewer) const {
  if (viewer < 0 || viewer >= num_players()) return false;
  return roles_[viewer] != Role::kServant;
}

PlayerId AvalonState::current_actor() const {
  switch (phase_) {
    case Phase::kTeamSelection:
      return PlayerId(leader_);
    case Phase::kVoting:
      return PlayerId(static_cast<int>(pending_votes_.size()));
    case Phase::kQuest:
      return PlayerId(team_members(proposed_team_).at(pending_quest_votes_.size()));
    case Phase::kAssassination:
      return PlayerId(assassin_seat());
    case Phase::kTerminal:
      break;
  }
  return PlayerId::environment();
}

std::vector<ActionId> AvalonState::legal_actions() const {
  std::vector<ActionId> actions;
  switch (phase_) {
    case Phase::kTeamSelection: {
      const int size = team_size();
      const TeamMask limit = TeamMask{1} << num_players();
      for (TeamMask m = 0; m < limit; ++m) {
        if (std::popcount(m) == size) actions.push_back(m);
      }
      break;
    }
    case Phase::kVoting:
      actions = {kReject, kApprove};
      break;
    case Phase::kQuest:
      if (side_of_seat(current_actor().seat()) == Side::kEvil) {
        actions = {kFail, kPass};
      } else {
        actions = {kPass};
      }
      break;
    case Phase::kAssassination:
      for (int i = 0; i < num_players(); ++i) {
        if (side_of(roles_[i]) == Side::kGood) actions.push_back(i);
      }
      break;
    case Phase::kTerminal:
      break;
  }
  return actions;
}

std::vector<double> AvalonState::returns() const {
  if (!is_terminal()) throw StrategistError("returns requested on a non-terminal avalon state");
  std::vector<double> r(num_players());
  for (int i = 0; i < num_players(); ++i) r[i] = side_of(roles_[i]) == *winner_ ? 1.0 : 0.0;
  return r;
}

void AvalonState::open_window() { speeches_in_window_ = 0; }

void AvalonState::advance_after_quest() {
  leader_ = (leader_ + 1) % num_players();
  rejection_streak_ = 0;
  proposed_team_ = 0;
  if (failures() >= 3) {
    phase_ = Phase::kTerminal;
    winner_ = Side::kEvil;
  } else if (successes() >= 3) {
    phase_ = Phase::kAssassination;
    open_window();
  } else {
    ++quest_index_;
    phase_ = Phase::kTeamSelection;
    open_window();
  }
}

AvalonState AvalonState::apply(ActionId action) const {
  const PlayerId actor = current_actor();
  if (is_terminal()) throw IllegalActionError(actor, action, "avalon game is over");
  const auto legal = legal_actions();
  if (!std::binary_search(legal.begin(), legal.end(), action)) {
    std::string why = "not legal in phase " + to_string(phase_);
    if (phase_ == Phase::kTeamSelection) why += " (team size must be " + std::to_string(team_size()) + ")";
    if (phase_ == Phase::kQuest && legal.size() == 1) why += " (Good players may only pass)";
    throw IllegalActionError(actor, action, why);
  }
  AvalonState next = *this;
  const int n = num_players();
  switch (phase_) {
    case Phase::kTeamSelection:
      next.proposed_team_ = static_cast<TeamMask>(action);
      if (rejection_streak_ == 4) {
        next.proposals_.push_back({quest_index_, leader_, next.proposed_team_, {}, true, true});
        next.phase_ = Phase::kQuest;
        next.pending_quest_votes_.clear();
      } else {
        next.phase_ = Phase::kVoting;
        next.pending_votes_.clear();
      }
      break;
    case Phase::kVoting: {
      next.pending_votes_.push_back(static_cast<int>(action));
      if (static_cast<int>(next.pending_votes_.size()) < n) break;
      const int approvals =
          static_cast<int>(std::count(next.pending_votes_.begin(), next.pending_votes_.end(), 1));
      const bool approved = 2 * approvals > n;
      next.proposals_.push_back(
          {quest_index_, leader_, proposed_team_, next.pending_votes_, approved, false});
      next.pending_votes_.clear();
      if (approved) {
        next.phase_ = Phase::kQuest;
        next.pending_quest_votes_.clear();
      } else {
        ++next.rejection_streak_;
        next.leader_ = (leader_ + 1) % n;
        next.proposed_team_ = 0;
        next.phase_ = Phase::kTeamSelection;
        next.open_window();
      }
      break;
    }
    case Phase::kQuest: {
      next.pending_quest_votes_.push_back(static_cast<int>(action));
      const auto members = team_members(proposed_team_);
      if (next.pending_quest_votes_.size() < members.size()) break;
      const int fails = static_cast<int>(
          std::count(next.pending_quest_votes_.begin(), next.pending_quest_votes_.end(), 0));
      const bool success = fails < quest_config(n).fails_required[quest_index_];
      next.quests_.push_back({quest_index_, proposed_team_, fails, success});
      next.quest_results_.push_back(success);
      next.pending_quest_votes_.clear();
      next.advance_after_quest();
      break;
    }
    case Phase::kAssassination:
      next.assassination_target_ = static_cast<int>(action);
      next.winner_ = roles_[action] == Role::kMerlin ? Side::kEvil : Side::kGood;
      next.phase_ = Phase::kTerminal;
      break;
    case Phase::kTerminal:
      break;
  }
  return next;
}

StatePtr AvalonState::child(ActionId action) const {
  return std::make_unique<AvalonState>(apply(action));
}

bool AvalonState::discussion_open() const {
  if (discussion_rounds_ <= 0) return false;
  if (phase_ != Phase::kTeamSelection && phase_ != Phase::kAssassination) return false;
  return speeches_in_window_ < discussion_rounds_ * num_players();
}

std::optional<int> AvalonState::next_speaker() const {
  if (!discussion_open()) return std::nullopt;
  return (leader_ + speeches_in_window_) % num_players();
}

AvalonState AvalonState::record_dialogue(PlayerId player, const std::string& text) const {
  if (player.is_environment() || player.seat() >= num_players()) {
    throw StrategistError("dialogue from a non-seat");
  }
  if (discussion_rounds_ <= 0) throw StrategistError("dialogue is disabled for this game");
  if (!discussion_open()) throw StrategistError("no discussion window is open");
  AvalonState next = *this;
  next.discussion_log_.push_back({player.seat(), text, quest_index_, phase_});
  ++next.speeches_in_window_;
  return next;
}

AvalonState AvalonState::with_roles(std::vector<Role> roles) const {
  AvalonState next = *this;
  next.roles_ = std::move(roles);
  auto sorted = next.roles_;
  auto expected = role_multiset(num_players());
  std::sort(sorted.begin(), sorted.end());
  std::sort(expected.begin(), expected.end());
  if (sorted != expected) throw StrategistError("role assignment is not a valid avalon deal");
  if (is_terminal() && !assassination_target_) {
    next.winner_ = Side::kEvil;
  } else if (is_terminal()) {
    next.winner_ = next.roles_[*assassination_target_] == Role::kMerlin ? Side::kEvil : Side::kGood;
  }
  return next;
}

AvalonState AvalonState::with_pending_votes(std::vector<int> votes, std::vector<int> quest_votes) const {
  AvalonState next = *this;
  if (votes.size() != pending_votes_.size() || quest_votes.size() != pending_quest_votes_.size()) {
    throw StrategistError("pending vote counts must be preserved");
  }
  next.pending_votes_ = std::move(votes);
  next.pending_quest_votes_ = std::move(quest_votes);
  return next;
}

namespace {

json proposals_json(const std::vector<ProposalRecord>& proposals) {
  json out = json::array();
  for (const auto& p : proposals) {
    out.push_back({{"quest", p.quest},
                   {"leader", p.leader},
                   {"team", team_members(p.team)},
                   {"votes", p.votes},
                   {"approved", p.approved},
                   {"forced", p.forced}});
  }
  return out;
}

json quests_json(const std::vector<QuestRecord>& quests) {
  json out = json::array();
  for (const auto& q : quests) {
    out.push_back(
        {{"quest", q.quest}, {"team", team_members(q.team)}, {"fails", q.fails}, {"success", q.success}});
  }
  return out;
}

json speeches_json(const std::vector<Speech>& log) {
  json out = json::array();
  for (const auto& s : log) {
    out.push_back({{"player", s.player}, {"text", s.text}, {"quest", s.quest}, {"phase", to_string(s.phase)}});
  }
  return out;
}

json public_json(const AvalonState& s) {
  const auto cfg = quest_config(s.num_players());
  json j;
  j["game"] = "avalon";
  j["num_players"] = s.num_players();
  j["phase"] = to_string(s.phase());
  j["quest_index"] = s.quest_index();
  j["rejection_streak"] = s.rejection_streak();
  j["leader"] = s.leader();
  j["proposed_team"] = team_members(s.proposed_team());
  j["team_sizes"] = cfg.team_sizes;
  j["fails_required"] = cfg.fails_required;
  j["quest_results"] = s.quest_results();
  j["proposals"] = proposals_json(s.proposals());
  j["quests"] = quests_json(s.quests());
  j["discussion_log"] = speeches_json(s.discussion_log());
  j["discussion_rounds"] = s.discussion_rounds();
  j["speeches_in_window"] = s.speeches_in_window();
  j["votes_cast"] = s.pending_votes().size();
  j["quest_votes_cast"] = s.pending_quest_votes().size();
  j["winner"] = s.winner() ? json(to_string(*s.winner())) : json(nullptr);
  j["assassination_target"] = s.assassination_target() ? json(*s.assassination_target()) : json(nullptr);
  return j;
}

void append_public_key(std::ostringstream& out, const AvalonState& s) {
  out << static_cast<int>(s.phase()) << '|' << s.quest_index() << '|' << s.rejection_streak() << '|'
      << s.leader() << '|' << s.proposed_team() << "|P";
  for (const auto& p : s.proposals()) {
    out << p.leader << ':' << p.team << ':';
    for (int v : p.votes) out << v;
    out << ',';
  }
  out << "|Q";
  for (const auto& q : s.quests()) out << q.team << ':' << q.fails << ',';
  out << "|v" << s.pending_votes().size() << 'q' << s.pending_quest_votes().size() << 'd'
      << s.discussion_log().size();
  if (s.assassination_target()) out << "|t" << *s.assassination_target();
}

}  // namespace

json AvalonState::to_json() const {
  json j = public_json(*this);
  std::vector<std::string> names;
  for (Role r : roles_) names.push_back(to_string(r));
  j["roles"] = names;
  j["pending_votes"] = pending_votes_;
  j["pending_quest_votes"] = pending_quest_votes_;
  return j;
}

json AvalonState::observation(PlayerId viewer) const {
  json j = public_json(*this);
  j["viewer"] = viewer.seat();
  if (viewer.is_environment() || viewer.seat() >= num_players()) {
    j["private"] = nullptr;
    return j;
  }
  const int seat = viewer.seat();
  json priv;
  priv["seat"] = seat;
  priv["role"] = to_string(roles_[seat]);
  priv["side"] = to_string(side_of(roles_[seat]));
  if (knows_evil(seat)) priv["known_evil"] = evil_seats();
  if (phase_ == Phase::kVoting && seat < static_cast<int>(pending_votes_.size())) {
    priv["my_pending_vote"] = pending_votes_[seat];
  }
  if (phase_ == Phase::kQuest) {
    const auto members = team_members(proposed_team_);
    for (std::size_t i = 0; i < pending_quest_votes_.size(); ++i) {
      if (members[i] == seat) priv["my_pending_quest_vote"] = pending_quest_votes_[i];
    }
  }
  j["private"] = priv;
  return j;
}

std::string AvalonState::state_key() const {
  std::ostringstream out;
  out << 'A';
  for (Role r : roles_) out << role_char(r);
  out << '|';
  append_public_key(out, *this);
  out << "|V";
  for (int v : pending_votes_) out << v;
  out << "|W";
  for (int v : pending_quest_votes_) out << v;
  return out.str();
}

std::string AvalonState::infoset_key(PlayerId viewer) const {
  std::ostringstream out;
  out << 'I' << viewer.seat() << '|';
  append_public_key(out, *this);
  if (viewer.is_environment() || viewer.seat() >= num_players()) return out.str();
  const int seat = viewer.seat();
  out << "|r" << role_char(roles_[seat]);
  if (knows_evil(seat)) {
    out << "|e";
    for (int e : evil_seats()) out << e;
  }
  if (phase_ == Phase::kVoting && seat < static_cast<int>(pending_votes_.size())) {
    out << "|mv" << pending_votes_[seat];
  }
  if (phase_ == Phase::kQuest) {
    const auto members = team_members(proposed_team_);
    for (std::size_t i = 0; i < pending_quest_votes_.size(); ++i) {
      if (members[i] == seat) out << "|mq" << pending_quest_votes_[i];
    }
  }
  return out.str();
}

std::string AvalonState::stage_key() const {
  std::ostringstream out;
  out << 'q' << quest_index_ << 'r' << rejection_streak_ << 'p' << static_cast<int>(phase_);
  return out.str();
}

std::string AvalonState::action_to_string(ActionId action) const {
  switch (phase_) {
    case Phase::kTeamSelection: {
      std::ostringstream out;
      out << "propose [";
      const auto members = team_members(static_cast<TeamMask>(action));
      for (std::size_t i = 0; i < members.size(); ++i) out << (i ? ", " : "") << members[i];
      out << ']';
      return out.str();
    }
    case Phase::kVoting:
      return action == kApprove ? "approve" : "reject";
    case Phase::kQuest:
      return action == kPass ? "pass" : "fail";
    case Phase::kAssassination:
      return "assassinate " + std::to_string(action);
    case Phase::kTerminal:
      break;
  }
  return std::to_string(action);
}

json AvalonState::action_to_json(ActionId action) const {
  switch (phase_) {
    case Phase::kTeamSelection:
      return {{"team", team_members(static_cast<TeamMask>(action))}};
    case Phase::kVoting:
      return {{"vote", action == kApprove ? "approve" : "reject"}};
    case Phase::kQuest:
      return {{"quest_vote", action == kPass ? "pass" : "fail"}};
    case Phase::kAssassination:
      return {{"target", action}};
    case Phase::kTerminal:
      break;
  }
  return {{"action", action}};
}

ActionId AvalonState::action_from_json(const json& j) const {
  if (j.is_number_integer()) return j.get<ActionId>();
  if (!j.is_object()) throw StrategistError("avalon action must be a JSON object");
  if (j.contains("action")) return j.at("action").get<ActionId>();
  auto bad = [&](const std::string& what) { return StrategistError("malformed avalon action: " + what); };
  switch (phase_) {
    case Phase::kTeamSelection:
      if (!j.contains("team") || !j.at("team").is_array()) throw bad("expected {\"team\": [...]}");
      return team_mask(j.at("team").get<std::vector<int>>());
    case Phase::kVoting: {
      if (!j.contains("vote")) throw bad("expected {\"vote\": \"approve\"|\"reject\"}");
      const auto& v = j.at("vote");
      if (v.is_boolean()) return v.get<bool>() ? kApprove : kReject;
      const auto s = v.get<std::string>();
      if (s == "approve") return kApprove;
      if (s == "reject") return kReject;
      throw bad("vote '" + s + "'");
    }
    case Phase::kQuest: {
      if (!j.contains("quest_vote")) throw bad("expected {\"quest_vote\": \"pass\"|\"fail\"}");
      const auto& v = j.at("quest_vote");
      if (v.is_boolean()) return v.get<bool>() ? kPass : kFail;
      const auto s = v.get<std::string>();
      if (s == "pass") return kPass;
      if (s == "fail") return kFail;
      throw bad("quest vote '" + s + "'");
    }
    case Phase::kAssassination:
      if (!j.contains("target")) throw bad("expected {\"target\": seat}");
      return j.at("target").get<ActionId>();
    case Phase::kTerminal:
      break;
  }
  throw bad("game is over");
}

void AvalonState::validate() const {
  auto fail = [](const std::string& what) { throw EngineMismatchError("corrupt avalon state: " + what); };
  const int n = num_players();
  if (n != 5 && n != 6) fail("player count");
  if (leader_ < 0 || leader_ >= n) fail("leader");
  if (quest_index_ < 0 || quest_index_ > 4) fail("quest index");
  if (rejection_streak_ < 0 || rejection_streak_ > 4) fail("rejection streak");
  if (quest_results_.size() != quests_.size()) fail("quest results");
  if (successes() > 3 || failures() > 3) fail("quest tally");
  if (phase_ == Phase::kVoting || phase_ == Phase::kQuest) {
    if (std::popcount(proposed_team_) != team_size()) fail("team size");
  }
  if (static_cast<int>(pending_votes_.size()) >= n) fail("pending votes");
  if (phase_ == Phase::kQuest &&
      pending_quest_votes_.size() >= static_cast<std::size_t>(std::popcount(proposed_team_))) {
    fail("pending quest votes");
  }
  if (phase_ == Phase::kTerminal && !winner_) fail("terminal without winner");
}

AvalonState AvalonState::from_json(const json& j) {
  try {
    if (!j.is_object() || j.value("game", std::string()) != "avalon") {
      throw EngineMismatchError("not an avalon state");
    }
    if (!j.contains("roles")) throw EngineMismatchError("avalon state has no role assignment");
    std::vector<Role> roles;
    for (const auto& r : j.at("roles")) roles.push_back(role_from_string(r.get<std::string>()));
    AvalonState s(std::move(roles), j.at("leader").get<int>(), j.value("discussion_rounds", 1));
    s.phase_ = phase_from_string(j.at("phase").get<std::string>());
    s.quest_index_ = j.at("quest_index").get<int>();
    s.rejection_streak_ = j.at("rejection_streak").get<int>();
    s.proposed_team_ = team_mask(j.at("proposed_team").get<std::vector<int>>());
    s.quest_results_ = j.at("quest_results").get<std::vector<bool>>();
    for (const auto& p : j.at("proposals")) {
      s.proposals_.push_back({p.at("quest").get<int>(), p.at("leader").get<int>(),
                              team_mask(p.at("team").get<std::vector<int>>()),
                              p.at("votes").get<std::vector<int>>(), p.at("approved").get<bool>(),
                              p.value("forced", false)});
    }
    for (const auto& q : j.at("quests")) {
      s.quests_.push_back({q.at("quest").get<int>(), team_mask(q.at("team").get<std::vector<int>>()),
                           q.at("fails").get<int>(), q.at("success").get<bool>()});
    }
    for (const auto& d : j.at("discussion_log")) {
      s.discussion_log_.push_back({d.at("player").get<int>(), d.at("text").get<std::string>(),
                                   d.at("quest").get<int>(),
                                   phase_from_string(d.at("phase").get<std::string>())});
    }
    s.pending_votes_ = j.value("pending_votes", std::vector<int>{});
    s.pending_quest_votes_ = j.value("pending_quest_votes", std::vector<int>{});
    s.speeches_in_window_ = j.value("speeches_in_window", 0);
    if (j.contains("winner") && !j.at("winner").is_null()) {
      s.winner_ = j.at("winner").get<std::string>() == "Good" ? Side::kGood : Side::kEvil;
    }
    if (j.contains("assassination_target") && !j.at("assassination_target").is_null()) {
      s.assassination_target_ = j.at("assassination_target").get<int>();
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw EngineMismatchError(std::string("corrupt avalon state: ") + e.what());
  } catch (const EngineMismatchError&) {
    throw;
  } catch (const StrategistError& e) {
    throw EngineMismatchError(std::string("corrupt avalon state: ") + e.what());
  }
}

std::string describe_state(const AvalonState& s, int viewer) {
  std::ostringstream out;
  const Role role = s.role_of(viewer);
  out << "You are Player " << viewer << ", with identity " << to_string(role) << ". You are on the side of "
      << to_string(side_of(role)) << ".";
  if (s.knows_evil(viewer)) {
    auto evil = s.evil_seats();
    if (side_of(role) == Side::kEvil) {
      std::erase(evil, viewer);
      out << " The other Evil player" << (evil.size() == 1 ? " is Player " : "s are Players ");
    } else {
      out << " The Evil players are Players ";
    }
    for (std::size_t i = 0; i < evil.size(); ++i) {
      if (i) out << (i + 1 == evil.size() ? " and " : ", ");
      out << evil[i];
    }
    out << '.';
  }
  out << " Please do not forget your identity throughout the game.\n\n";
  out << "The current state of the game is as follows:\n";
  out << "- The number of players in the game is: " << s.num_players() << "\n";
  const auto cfg = quest_config(s.num_players());
  const int q = std::min(s.quest_index(), 4);
  out << "- This is the quest number " << s.quest_index() << " which requires " << cfg.team_sizes[q]
      << " players and " << cfg.fails_required[q] << " fails to fail\n";
  out << "- This is the " << (s.speeches_in_window() / s.num_players()) << " round of discussion\n";
  out << "- The previous results for the quest were " << python_bools(s.quest_results())
      << " (True for Success, False for Fail)\n";
  out << "- The current phase of the game is the " << phase_phrase(s.phase()) << " phase\n";
  out << "- The current leader is player " << s.leader() << "\n";
  return out.str();
}

}  // namespace strategist::avalon
