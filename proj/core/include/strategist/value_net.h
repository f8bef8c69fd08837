#pragma once

// A small feed-forward value approximator (tanh hidden layers, linear output)
// and the Monte-Carlo regression trainer that fits it to self-play returns.

#include <vector>

#include "strategist/heuristics.h"

namespace strategist {

// Fixed-length numeric encoding of a full state.
//   GOPS: scores, pot and the card on the table (scaled), turn flag, then
//   indicators for both hands and the score deck.
//   Avalon: phase one-hot, quest results, quest index, rejection streak,
//   leader one-hot, proposed-team indicators, role one-hots by seat.
std::vector<double> state_features(const State& state);
int feature_size(GameKind game, int size_parameter);

struct Sample {
  std::vector<double> x;
  std::vector<double> y;
};

class Mlp {
 public:
  Mlp() = default;
  // Glorot-uniform weights, zero biases.
  Mlp(int inputs, std::vector<int> hidden, int outputs, std::uint64_t seed);

  int inputs() const { return sizes_.empty() ? 0 : sizes_.front(); }
  int outputs() const { return sizes_.empty() ? 0 : sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  std::size_t num_parameters() const { return params_.size(); }
  const std::vector<double>& parameters() const { return params_; }
  void set_parameters(std::vector<double> params);

  std::vector<double> forward(const std::vector<double>& x) const;

  // Mean over samples of Σ_outputs (prediction − target)².
  double loss(const std::vector<Sample>& batch) const;
  // Same loss; `grad` receives its gradient with respect to parameters().
  double loss_and_gradient(const std::vector<Sample>& batch, std::vector<double>& grad) const;

  void sgd_step(const std::vector<double>& grad, double learning_rate);

  json to_json() const;
  static Mlp from_json(const json& j);

 private:
  // Offsets of layer l's weight matrix (out × in, row-major) and bias.
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + static_cast<std::size_t>(sizes_[layer + 1]) * sizes_[layer];
  }
  void layout();

  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

struct RlConfig {
  GameKind game = GameKind::kGops;
  std::vector<int> hidden{64, 64};
  double learning_rate = 8e-4;
  int evolutions = 20;
  int runs_per_evolution = 60;
  // SGD passes over each evolution's batch.
  int epochs = 4;
  int minibatch = 1;
  int gops_cards = 6;
  int avalon_players = 5;

  // Table values for GOPS (64×64, 8e-4, 60 runs) and Avalon (128×128, 5e-4, 30 runs).
  static RlConfig defaults(GameKind game);
  void validate() const;
  json to_json() const;
  static RlConfig from_json(const json& j);
};

struct ValueModel {
  GameKind game = GameKind::kGops;
  int size_parameter = 0;  // GOPS cards or Avalon players
  Mlp net;

  // Per-player values on the return scale.
  std::vector<double> predict(const State& state) const;
  json to_json() const;
  static ValueModel from_json(const json& j);
  void save(const std::string& path) const;
  static ValueModel load(const std::string& path);
};

struct RlReport {
  // Loss of the current model on each evolution's fresh batch, measured
  // before training on it, and after.
  std::vector<double> loss_before;
  std::vector<double> loss_after;
  int samples = 0;

  json to_json() const;
};

class DivergenceError : public StrategistError {
 public:
  using StrategistError::StrategistError;
};

// Uniform-random self-play episodes; every visited non-terminal state is
// regressed on the episode's final returns. Throws DivergenceError on a
// non-finite loss.
ValueModel rl_train(const RlConfig& config, std::uint64_t seed, RlReport* report = nullptr);

// Heuristic backed by a trained model; values are reported so that the
// return-scale conversion recovers the model output.
HeuristicHandle rl_heuristic(const ValueModel& model, const std::string& id = "rl_value");

}  // namespace strategist
