#include <algorithm>
#include <cmath>

#include "strategist/belief.h"
#include "strategist/gops.h"

namespace strategist {

using avalon::AvalonState;
using avalon::Role;
using avalon::Side;

Beliefs Beliefs::prior(const AvalonState& state, int observer) {
  const int n = state.num_players();
  Beliefs b;
  b.observer = observer;
  b.p_evil.assign(n, 0.0);
  b.p_merlin.assign(n, 0.0);
  b.pinned_evil.assign(n, false);
  b.pinned_merlin.assign(n, false);
  const auto evil = state.evil_seats();
  const int num_evil = static_cast<int>(evil.size());
  const Role own = state.role_of(observer);
  for (int i = 0; i < n; ++i) {
    if (i == observer) {
      b.p_evil[i] = avalon::side_of(own) == Side::kEvil ? 1.0 : 0.0;
      b.p_merlin[i] = own == Role::kMerlin ? 1.0 : 0.0;
      b.pinned_evil[i] = b.pinned_merlin[i] = true;
      continue;
    }
    if (state.knows_evil(observer)) {
      const bool is_evil = std::find(evil.begin(), evil.end(), i) != evil.end();
      b.p_evil[i] = is_evil ? 1.0 : 0.0;
      b.pinned_evil[i] = true;
      if (own == Role::kMerlin || is_evil) {
        b.p_merlin[i] = 0.0;
        b.pinned_merlin[i] = true;
      } else {
        b.p_merlin[i] = 1.0 / static_cast<double>(n - num_evil);
      }
    } else {
      // A Servant: the other n-1 seats hold every Evil player and Merlin.
      b.p_evil[i] = static_cast<double>(num_evil) / (n - 1);
      b.p_merlin[i] = 1.0 / (n - 1);
    }
  }
  return b;
}

double Beliefs::weight(const std::vector<Role>& roles) const {
  double w = 1.0;
  for (int i = 0; i < static_cast<int>(roles.size()); ++i) {
    if (i == observer) continue;
    const bool evil = avalon::side_of(roles[i]) == Side::kEvil;
    const bool merlin = roles[i] == Role::kMerlin;
    w *= evil ? p_evil[i] : 1.0 - p_evil[i];
    // Merlin is Good, so the Merlin factor only discriminates among Good seats.
    if (!evil) w *= merlin ? p_merlin[i] : 1.0 - p_merlin[i];
  }
  return w;
}

json Beliefs::to_json() const {
  return {{"observer", observer}, {"p_evil", p_evil}, {"p_merlin", p_merlin}};
}

bool roles_consistent(const AvalonState& state, int observer, const std::vector<Role>& roles) {
  if (static_cast<int>(roles.size()) != state.num_players()) return false;
  if (roles[observer] != state.role_of(observer)) return false;
  if (state.knows_evil(observer)) {
    for (int i = 0; i < state.num_players(); ++i) {
      if (avalon::side_of(roles[i]) != state.side_of_seat(i)) return false;
    }
  }
  // Good players always pass, so a quest with f fails had at least f Evil members.
  for (const auto& q : state.quests()) {
    int evil_on_team = 0;
    for (int m : avalon::team_members(q.team)) {
      if (avalon::side_of(roles[m]) == Side::kEvil) ++evil_on_team;
    }
    if (evil_on_team < q.fails) return false;
  }
  return true;
}

BeliefSampler::BeliefSampler(const State& witness, PlayerId observer, MhConfig config)
    : witness_(witness.clone()), observer_(observer), config_(config) {
  if (witness.is_terminal()) throw SamplingError("cannot sample from a terminal state");
  if (observer.is_environment()) throw SamplingError("observer must be a player");
  if (config.burn_in < 0 || config.thin < 1) throw SamplingError("invalid chain configuration");
}

void BeliefSampler::set_role_weight(RoleWeight weight) {
  weight_ = std::move(weight);
  started_ = false;
}

void BeliefSampler::set_beliefs(const Beliefs& beliefs) {
  set_role_weight([beliefs](const std::vector<Role>& roles) { return beliefs.weight(roles); });
}

void BeliefSampler::start_chain(Rng& rng) {
  const auto& s = static_cast<const AvalonState&>(*witness_);
  auto roles = avalon::role_multiset(s.num_players());
  std::sort(roles.begin(), roles.end());
  std::vector<std::vector<Role>> candidates;
  do {
    if (!roles_consistent(s, observer_.seat(), roles)) continue;
    if (weight_ && !(weight_(roles) > 0.0)) continue;
    candidates.push_back(roles);
  } while (std::next_permutation(roles.begin(), roles.end()));
  if (candidates.empty()) {
    throw SamplingError("no role assignment is consistent with the observer's beliefs");
  }
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  current_ = candidates[pick(rng)];
  current_weight_ = weight_ ? weight_(current_) : 1.0;
  started_ = true;
  for (int i = 0; i < config_.burn_in; ++i) step(rng);
}

void BeliefSampler::step(Rng& rng) {
  const int n = static_cast<int>(current_.size());
  const int obs = observer_.seat();
  // Uniform pair of distinct non-observer seats: a symmetric proposal.
  std::uniform_int_distribution<int> seat(0, n - 2);
  int i = seat(rng);
  if (i >= obs) ++i;
  int j = seat(rng);
  if (j >= obs) ++j;
  ++proposals_;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  if (i == j || current_[i] == current_[j]) {
    ++accepted_;
    return;
  }
  auto proposal = current_;
  std::swap(proposal[i], proposal[j]);
  const auto& s = static_cast<const AvalonState&>(*witness_);
  if (!roles_consistent(s, obs, proposal)) return;
  const double w = weight_ ? weight_(proposal) : 1.0;
  if (!(w > 0.0)) return;
  if (w >= current_weight_ || u < w / current_weight_) {
    current_ = std::move(proposal);
    current_weight_ = w;
    ++accepted_;
  }
}

StatePtr BeliefSampler::emit(Rng& rng) const {
  const auto& s = static_cast<const AvalonState&>(*witness_);
  const int obs = observer_.seat();
  AvalonState out = s.with_roles(current_);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<int> votes = s.pending_votes();
  for (int i = 0; i < static_cast<int>(votes.size()); ++i) {
    if (i != obs) votes[i] = coin(rng);
  }
  std::vector<int> quest_votes = s.pending_quest_votes();
  const auto members = avalon::team_members(s.proposed_team());
  for (std::size_t k = 0; k < quest_votes.size(); ++k) {
    const int m = members[k];
    if (m == obs) continue;
    quest_votes[k] = avalon::side_of(current_[m]) == Side::kEvil ? coin(rng) : static_cast<int>(avalon::kPass);
  }
  return std::make_unique<AvalonState>(out.with_pending_votes(std::move(votes), std::move(quest_votes)));
}

StatePtr BeliefSampler::sample_one(Rng& rng) {
  if (witness_->game() == GameKind::kGops) {
    const auto& g = static_cast<const gops::GopsState&>(*witness_);
    auto pending = g.pending_p0_card();
    if (!pending || observer_ == PlayerId(0)) return g.clone();
    // Player 1 only knows player 0 holds one of the cards still unplayed.
    std::vector<int> options = g.hand(0);
    options.push_back(*pending);
    std::sort(options.begin(), options.end());
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    return std::make_unique<gops::GopsState>(g.with_pending(options[pick(rng)]));
  }
  if (!started_) start_chain(rng);
  for (int i = 0; i < config_.thin; ++i) step(rng);
  return emit(rng);
}

std::vector<StatePtr> BeliefSampler::sample(int n, Rng& rng) {
  std::vector<StatePtr> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(sample_one(rng));
  return out;
}

StatePtr determinize(const State& state, PlayerId observer, Rng& rng) {
  if (state.is_terminal() || observer.is_environment()) return state.clone();
  if (state.game() == GameKind::kGops) {
    const auto& g = static_cast<const gops::GopsState&>(state);
    if (!g.pending_p0_card() || observer == PlayerId(0)) return state.clone();
  }
  BeliefSampler sampler(state, observer);
  return sampler.sample_one(rng);
}

}  // namespace strategist
