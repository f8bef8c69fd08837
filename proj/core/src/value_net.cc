#include "strategist/value_net.h"

#include <algorithm>
#include <cmath>

#include "strategist/avalon.h"
#include "strategist/gops.h"

namespace strategist {

namespace {

std::vector<double> gops_features(const gops::GopsState& s) {
  const int n = s.num_cards();
  const double total = n * (n + 1) / 2.0;
  std::vector<double> f;
  f.reserve(static_cast<std::size_t>(feature_size(GameKind::kGops, n)));
  f.push_back(s.score(0) / total);
  f.push_back(s.score(1) / total);
  f.push_back(s.pot() / total);
  f.push_back(s.card_on_table().value_or(0) / static_cast<double>(n));
  f.push_back(s.is_turn() ? 1.0 : 0.0);
  auto indicators = [&](const std::vector<int>& cards) {
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    for (int c : cards) v[static_cast<std::size_t>(c - 1)] = 1.0;
    f.insert(f.end(), v.begin(), v.end());
  };
  indicators(s.hand(0));
  indicators(s.hand(1));
  indicators(s.score_deck());
  return f;
}

std::vector<double> avalon_features(const avalon::AvalonState& s) {
  const int p = s.num_players();
  std::vector<double> f;
  f.reserve(static_cast<std::size_t>(feature_size(GameKind::kAvalon, p)));
  for (int i = 0; i < 5; ++i) f.push_back(static_cast<int>(s.phase()) == i ? 1.0 : 0.0);
  for (std::size_t q = 0; q < 5; ++q) {
    f.push_back(q < s.quest_results().size() ? (s.quest_results()[q] ? 1.0 : -1.0) : 0.0);
  }
  f.push_back(s.quest_index() / 5.0);
  f.push_back(s.rejection_streak() / 5.0);
  for (int i = 0; i < p; ++i) f.push_back(s.leader() == i ? 1.0 : 0.0);
  const auto team = avalon::team_members(s.proposed_team());
  for (int i = 0; i < p; ++i) f.push_back(std::find(team.begin(), team.end(), i) != team.end() ? 1.0 : 0.0);
  for (int i = 0; i < p; ++i) {
    for (int r = 0; r < 4; ++r) f.push_back(static_cast<int>(s.role_of(i)) == r ? 1.0 : 0.0);
  }
  return f;
}

}  // namespace

int feature_size(GameKind game, int size_parameter) {
  return game == GameKind::kGops ? 5 + 3 * size_parameter : 12 + 6 * size_parameter;
}

std::vector<double> state_features(const State& state) {
  if (state.game() == GameKind::kGops) return gops_features(static_cast<const gops::GopsState&>(state));
  return avalon_features(static_cast<const avalon::AvalonState&>(state));
}

Mlp::Mlp(int inputs, std::vector<int> hidden, int outputs, std::uint64_t seed) {
  if (inputs < 1 || outputs < 1) throw StrategistError("network needs inputs and outputs");
  sizes_.push_back(inputs);
  for (int h : hidden) {
    if (h < 1) throw StrategistError("hidden layer sizes must be positive");
    sizes_.push_back(h);
  }
  sizes_.push_back(outputs);
  layout();
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double limit = std::sqrt(6.0 / (sizes_[l] + sizes_[l + 1]));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (std::size_t i = weight_offset(l); i < bias_offset(l); ++i) params_[i] = u(rng);
  }
}

void Mlp::layout() {
  offsets_.clear();
  std::size_t at = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(at);
    at += static_cast<std::size_t>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_.assign(at, 0.0);
}

void Mlp::set_parameters(std::vector<double> params) {
  if (params.size() != params_.size()) throw StrategistError("parameter count mismatch");
  params_ = std::move(params);
}

std::vector<double> Mlp::forward(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != inputs()) throw StrategistError("feature size mismatch");
  std::vector<double> a = x;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    std::vector<double> z(static_cast<std::size_t>(out));
    const double* w = &params_[weight_offset(l)];
    const double* b = &params_[bias_offset(l)];
    for (int o = 0; o < out; ++o) {
      double sum = b[o];
      for (int i = 0; i < in; ++i) sum += w[o * in + i] * a[static_cast<std::size_t>(i)];
      z[static_cast<std::size_t>(o)] = l + 2 < sizes_.size() ? std::tanh(sum) : sum;
    }
    a = std::move(z);
  }
  return a;
}

double Mlp::loss(const std::vector<Sample>& batch) const {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : batch) {
    const auto y = forward(s.x);
    for (std::size_t o = 0; o < y.size(); ++o) total += (y[o] - s.y.at(o)) * (y[o] - s.y.at(o));
  }
  return total / static_cast<double>(batch.size());
}

double Mlp::loss_and_gradient(const std::vector<Sample>& batch, std::vector<double>& grad) const {
  grad.assign(params_.size(), 0.0);
  if (batch.empty()) return 0.0;
  const std::size_t layers = sizes_.size() - 1;
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  std::vector<std::vector<double>> acts(layers + 1);
  for (const auto& s : batch) {
    acts[0] = s.x;
    for (std::size_t l = 0; l < layers; ++l) {
      const int in = sizes_[l], out = sizes_[l + 1];
      const double* w = &params_[weight_offset(l)];
      const double* b = &params_[bias_offset(l)];
      acts[l + 1].assign(static_cast<std::size_t>(out), 0.0);
      for (int o = 0; o < out; ++o) {
        double sum = b[o];
        for (int i = 0; i < in; ++i) sum += w[o * in + i] * acts[l][static_cast<std::size_t>(i)];
        acts[l + 1][static_cast<std::size_t>(o)] = l + 1 < layers ? std::tanh(sum) : sum;
      }
    }
    std::vector<double> delta(acts[layers].size());
    for (std::size_t o = 0; o < delta.size(); ++o) {
      const double e = acts[layers][o] - s.y.at(o);
      total += e * e;
      delta[o] = 2.0 * e * scale;
    }
    for (std::size_t l = layers; l-- > 0;) {
      const int in = sizes_[l], out = sizes_[l + 1];
      const double* w = &params_[weight_offset(l)];
      double* gw = &grad[weight_offset(l)];
      double* gb = &grad[bias_offset(l)];
      std::vector<double> prev(static_cast<std::size_t>(in), 0.0);
      for (int o = 0; o < out; ++o) {
        const double d = delta[static_cast<std::size_t>(o)];
        gb[o] += d;
        for (int i = 0; i < in; ++i) {
          gw[o * in + i] += d * acts[l][static_cast<std::size_t>(i)];
          prev[static_cast<std::size_t>(i)] += d * w[o * in + i];
        }
      }
      if (l > 0) {
        for (int i = 0; i < in; ++i) {
          const double a = acts[l][static_cast<std::size_t>(i)];
          prev[static_cast<std::size_t>(i)] *= 1.0 - a * a;
        }
      }
      delta = std::move(prev);
    }
  }
  return total * scale;
}

void Mlp::sgd_step(const std::vector<double>& grad, double learning_rate) {
  if (grad.size() != params_.size()) throw StrategistError("gradient size mismatch");
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= learning_rate * grad[i];
}

json Mlp::to_json() const { return {{"sizes", sizes_}, {"activation", "tanh"}, {"parameters", params_}}; }

Mlp Mlp::from_json(const json& j) {
  Mlp m;
  m.sizes_ = j.at("sizes").get<std::vector<int>>();
  if (m.sizes_.size() < 2) throw StrategistError("network needs at least two layers");
  for (int s : m.sizes_) {
    if (s < 1) throw StrategistError("layer sizes must be positive");
  }
  m.layout();
  auto params = j.at("parameters").get<std::vector<double>>();
  for (double p : params) {
    if (!std::isfinite(p)) throw StrategistError("network parameters must be finite");
  }
  m.set_parameters(std::move(params));
  return m;
}

}  // namespace strategist
