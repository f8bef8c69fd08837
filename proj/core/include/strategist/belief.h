#pragma once

// Hidden-state sampling for determinized search. GOPS hides at most player
// 0's pending card; Avalon hides the role assignment (sampled by a
// Metropolis-Hastings chain over role swaps) and any votes not yet revealed.

#include <functional>
#include <vector>

#include "strategist/avalon.h"
#include "strategist/game.h"

namespace strategist {

class SamplingError : public StrategistError {
 public:
  using StrategistError::StrategistError;
};

// One seat's view of every other seat. Entries fixed by private knowledge are
// pinned and never move.
struct Beliefs {
  int observer = 0;
  std::vector<double> p_evil;
  std::vector<double> p_merlin;
  std::vector<bool> pinned_evil;
  std::vector<bool> pinned_merlin;

  // The prior implied by `observer`'s private knowledge alone.
  static Beliefs prior(const avalon::AvalonState& state, int observer);

  // Unnormalised likelihood of a full role assignment.
  double weight(const std::vector<avalon::Role>& roles) const;

  json to_json() const;
};

using RoleWeight = std::function<double(const std::vector<avalon::Role>&)>;

struct MhConfig {
  int burn_in = 100;
  int thin = 20;
};

// True when `roles` agrees with everything `observer` has seen in `state`.
bool roles_consistent(const avalon::AvalonState& state, int observer, const std::vector<avalon::Role>& roles);

class BeliefSampler {
 public:
  BeliefSampler(const State& witness, PlayerId observer, MhConfig config = {});

  // Replaces the stationary weight over role assignments (uniform by default).
  void set_role_weight(RoleWeight weight);
  void set_beliefs(const Beliefs& beliefs);

  // `n` states consistent with the observer's information set. Consecutive
  // calls continue the same chain. Throws SamplingError when no consistent
  // assignment has positive weight.
  std::vector<StatePtr> sample(int n, Rng& rng);
  StatePtr sample_one(Rng& rng);

  // Acceptance statistics of the chain so far.
  long proposals() const { return proposals_; }
  long accepted() const { return accepted_; }

 private:
  void start_chain(Rng& rng);
  void step(Rng& rng);
  StatePtr emit(Rng& rng) const;

  StatePtr witness_;
  PlayerId observer_;
  MhConfig config_;
  RoleWeight weight_;
  bool started_ = false;
  std::vector<avalon::Role> current_;
  double current_weight_ = 0.0;
  long proposals_ = 0;
  long accepted_ = 0;
};

// A single state drawn from the observer's information set under uniform
// beliefs. Returns a plain copy when the observer sees everything.
StatePtr determinize(const State& state, PlayerId observer, Rng& rng);

}  // namespace strategist
