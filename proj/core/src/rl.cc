#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "registry_internal.h"
#include "strategist/avalon.h"
#include "strategist/gops.h"
#include "strategist/value_net.h"

namespace strategist {

namespace {

StatePtr new_state(GameKind game, int size_parameter, std::uint64_t seed) {
  if (game == GameKind::kGops) return std::make_unique<gops::GopsState>(gops::new_game(size_parameter, seed));
  return std::make_unique<avalon::AvalonState>(avalon::new_game(size_parameter, seed, 0));
}

int size_parameter(const RlConfig& c) { return c.game == GameKind::kGops ? c.gops_cards : c.avalon_players; }

class ModelEvaluator final : public Evaluator {
 public:
  explicit ModelEvaluator(ValueModel model) : model_(std::move(model)) {}

  ValueEstimate evaluate(const State& state) const override {
    if (state.game() != model_.game) throw EvaluationError("value model trained for another game");
    std::vector<double> r = model_.predict(state);
    ValueEstimate v;
    if (state.game() == GameKind::kGops) {
      // Expected scores whose difference is the antisymmetrised prediction.
      const double d = (r[0] - r[1]) / 4.0;
      v = ValueEstimate::from_values({d, -d});
      v.intermediates["predicted_point_difference"] = r[0];
    } else {
      v = ValueEstimate::from_values(r);
    }
    return v;
  }

 private:
  ValueModel model_;
};

}  // namespace

RlConfig RlConfig::defaults(GameKind game) {
  RlConfig c;
  c.game = game;
  if (game == GameKind::kAvalon) {
    c.hidden = {128, 128};
    c.learning_rate = 5e-4;
    c.runs_per_evolution = 30;
  }
  return c;
}

void RlConfig::validate() const {
  if (hidden.empty()) throw StrategistError("rl: at least one hidden layer");
  for (int h : hidden) {
    if (h < 1) throw StrategistError("rl: hidden sizes must be positive");
  }
  if (!(learning_rate > 0.0)) throw StrategistError("rl: learning rate must be positive");
  if (evolutions < 1 || runs_per_evolution < 1 || epochs < 1 || minibatch < 1) {
    throw StrategistError("rl: counts must be at least 1");
  }
  if (game == GameKind::kGops && (gops_cards < 2 || gops_cards > 13)) throw StrategistError("rl: gops cards 2..13");
  if (game == GameKind::kAvalon && avalon_players != 5 && avalon_players != 6) {
    throw StrategistError("rl: avalon needs 5 or 6 players");
  }
}

json RlConfig::to_json() const {
  return {{"game", to_string(game)},
          {"hidden", hidden},
          {"learning_rate", learning_rate},
          {"evolutions", evolutions},
          {"runs_per_evolution", runs_per_evolution},
          {"epochs", epochs},
          {"minibatch", minibatch},
          {"gops_cards", gops_cards},
          {"avalon_players", avalon_players}};
}

RlConfig RlConfig::from_json(const json& j) {
  RlConfig c = defaults(game_kind_from_string(j.value("game", std::string("gops"))));
  c.hidden = j.value("hidden", c.hidden);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.evolutions = j.value("evolutions", c.evolutions);
  c.runs_per_evolution = j.value("runs_per_evolution", c.runs_per_evolution);
  c.epochs = j.value("epochs", c.epochs);
  c.minibatch = j.value("minibatch", c.minibatch);
  c.gops_cards = j.value("gops_cards", c.gops_cards);
  c.avalon_players = j.value("avalon_players", c.avalon_players);
  c.validate();
  return c;
}

std::vector<double> ValueModel::predict(const State& state) const {
  if (state.is_terminal()) return state.returns();
  return net.forward(state_features(state));
}

json ValueModel::to_json() const {
  return {{"format", "strategist-value-model"}, {"game", to_string(game)}, {"size_parameter", size_parameter},
          {"network", net.to_json()}};
}

ValueModel ValueModel::from_json(const json& j) {
  ValueModel m;
  m.game = game_kind_from_string(j.at("game").get<std::string>());
  m.size_parameter = j.at("size_parameter").get<int>();
  m.net = Mlp::from_json(j.at("network"));
  const int players = m.game == GameKind::kGops ? 2 : m.size_parameter;
  if (m.net.inputs() != feature_size(m.game, m.size_parameter) || m.net.outputs() != players) {
    throw StrategistError("value model shape does not match its game");
  }
  return m;
}

void ValueModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw StrategistError("cannot write " + path);
  out << to_json().dump() << "\n";
}

ValueModel ValueModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StrategistError("cannot read value model '" + path + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw StrategistError("value model '" + path + "' is not valid JSON");
  return from_json(j);
}

json RlReport::to_json() const {
  return {{"loss_before", loss_before}, {"loss_after", loss_after}, {"samples", samples}};
}

ValueModel rl_train(const RlConfig& config, std::uint64_t seed, RlReport* report) {
  config.validate();
  const int size = size_parameter(config);
  ValueModel model;
  model.game = config.game;
  model.size_parameter = size;
  const int players = config.game == GameKind::kGops ? 2 : size;
  model.net = Mlp(feature_size(config.game, size), config.hidden, players, mix_seed(seed, 1));
  Rng rng(mix_seed(seed, 2));
  UniformRandomPolicy random_policy;
  RlReport local;
  std::vector<double> grad;
  for (int e = 0; e < config.evolutions; ++e) {
    std::vector<Sample> batch;
    for (int r = 0; r < config.runs_per_evolution; ++r) {
      const std::uint64_t game_seed = mix_seed(seed, 1000 + static_cast<std::uint64_t>(e) * 100003 + r);
      StatePtr s = new_state(config.game, size, game_seed);
      Rng game_rng(mix_seed(game_seed, 1));
      std::vector<std::vector<double>> xs;
      while (!s->is_terminal()) {
        xs.push_back(state_features(*s));
        const ActionId a = s->is_chance() ? s->chance_outcomes().sample(game_rng) : random_policy.act(*s, game_rng);
        s = s->child(a);
      }
      const auto returns = s->returns();
      for (auto& x : xs) batch.push_back({std::move(x), returns});
    }
    const double before = model.net.loss(batch);
    if (!std::isfinite(before)) throw DivergenceError("rl: non-finite loss at evolution " + std::to_string(e + 1));
    local.loss_before.push_back(before);
    local.samples += static_cast<int>(batch.size());
    std::vector<std::size_t> order(batch.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t i = 0; i < order.size(); i += static_cast<std::size_t>(config.minibatch)) {
        std::vector<Sample> mini;
        for (std::size_t j = i; j < std::min(order.size(), i + config.minibatch); ++j) mini.push_back(batch[order[j]]);
        const double loss = model.net.loss_and_gradient(mini, grad);
        if (!std::isfinite(loss)) {
          throw DivergenceError("rl: non-finite loss at evolution " + std::to_string(e + 1) + ", epoch " +
                                std::to_string(epoch + 1));
        }
        model.net.sgd_step(grad, config.learning_rate);
      }
    }
    const double after = model.net.loss(batch);
    if (!std::isfinite(after)) throw DivergenceError("rl: non-finite loss at evolution " + std::to_string(e + 1));
    local.loss_after.push_back(after);
  }
  if (report) *report = std::move(local);
  return model;
}

HeuristicHandle rl_heuristic(const ValueModel& model, const std::string& id) {
  HeuristicSpec spec = HeuristicSpec::builtin("rl_value", model.game, id);
  return HeuristicHandle(spec, std::make_shared<ModelEvaluator>(model));
}

namespace detail {

void register_rl_heuristics(BuiltinRegistry& registry) {
  registry.add({"rl_value", std::nullopt, "Value network trained on self-play returns; argument: model file path.",
                "def evaluate_state(state):\n"
                "    # two tanh hidden layers over a fixed state encoding, regressed on\n"
                "    # Monte-Carlo returns from uniform-random self-play\n"
                "    ...\n"},
               [](const std::string& path) -> std::shared_ptr<const Evaluator> {
                 if (path.empty()) throw StrategistError("rl_value needs a model path: rl_value:<file>");
                 return std::make_shared<ModelEvaluator>(ValueModel::load(path));
               });
}

}  // namespace detail

}  // namespace strategist
