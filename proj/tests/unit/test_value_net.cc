#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "strategist/avalon.h"
#include "strategist/gops.h"
#include "strategist/value_net.h"

using namespace strategist;

TEST_SUITE("value_net") {
  TEST_CASE("feature sizes match the declared encoding") {
    CHECK(state_features(gops::GopsState(5)).size() == static_cast<std::size_t>(feature_size(GameKind::kGops, 5)));
    const auto game = avalon::new_game(6, 3, 0);
    CHECK(state_features(game).size() == static_cast<std::size_t>(feature_size(GameKind::kAvalon, 6)));
  }

  TEST_CASE("analytic gradient matches central differences") {
    Mlp net(4, {5, 3}, 2, 11);
    Rng rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Sample> batch;
    for (int i = 0; i < 6; ++i) {
      Sample s;
      for (int k = 0; k < 4; ++k) s.x.push_back(u(rng));
      s.y = {u(rng), u(rng)};
      batch.push_back(s);
    }
    std::vector<double> grad;
    const double l = net.loss_and_gradient(batch, grad);
    CHECK(l == doctest::Approx(net.loss(batch)));
    REQUIRE(grad.size() == net.num_parameters());
    const double h = 1e-6;
    double worst = 0.0;
    for (std::size_t p = 0; p < net.num_parameters(); ++p) {
      auto params = net.parameters();
      Mlp plus = net, minus = net;
      params[p] += h;
      plus.set_parameters(params);
      params[p] -= 2 * h;
      minus.set_parameters(params);
      const double numeric = (plus.loss(batch) - minus.loss(batch)) / (2 * h);
      worst = std::max(worst, std::abs(numeric - grad[p]));
    }
    CHECK(worst < 1e-6);
  }

  TEST_CASE("sgd steps reduce the loss on a fixed batch") {
    Mlp net(2, {8}, 1, 3);
    std::vector<Sample> batch{{{0.0, 1.0}, {0.5}}, {{1.0, 0.0}, {-0.5}}, {{1.0, 1.0}, {0.0}}};
    const double before = net.loss(batch);
    std::vector<double> grad;
    for (int i = 0; i < 200; ++i) {
      net.loss_and_gradient(batch, grad);
      net.sgd_step(grad, 0.05);
    }
    CHECK(net.loss(batch) < before);
  }

  TEST_CASE("models round-trip through files") {
    RlConfig cfg = RlConfig::defaults(GameKind::kGops);
    cfg.gops_cards = 4;
    cfg.hidden = {8};
    cfg.evolutions = 2;
    cfg.runs_per_evolution = 5;
    RlReport report;
    const auto model = rl_train(cfg, 1, &report);
    CHECK(report.loss_before.size() == 2);
    CHECK(report.samples > 0);
    const auto path = std::filesystem::temp_directory_path() / "strategist_model_test.json";
    model.save(path.string());
    const auto loaded = ValueModel::load(path.string());
    std::filesystem::remove(path);
    const gops::GopsState s(4);
    CHECK(loaded.predict(s) == model.predict(s));
    CHECK(loaded.to_json() == model.to_json());
  }

  TEST_CASE("rl heuristic antisymmetrises the GOPS prediction") {
    RlConfig cfg = RlConfig::defaults(GameKind::kGops);
    cfg.gops_cards = 4;
    cfg.hidden = {8};
    cfg.evolutions = 1;
    cfg.runs_per_evolution = 3;
    const auto model = rl_train(cfg, 2);
    const auto h = rl_heuristic(model);
    auto s = gops::new_game(4, 5);
    const auto v = h.value(s);
    const auto p = model.predict(s);
    REQUIRE(v.size() == 2);
    CHECK(v[0] == doctest::Approx((p[0] - p[1]) / 2.0));
    CHECK(v[1] == doctest::Approx(-v[0]));
  }

  TEST_CASE("config validation") {
    RlConfig cfg;
    cfg.learning_rate = -1.0;
    CHECK_THROWS(cfg.validate());
    CHECK(RlConfig::defaults(GameKind::kAvalon).hidden == std::vector<int>{128, 128});
    const auto round = RlConfig::from_json(RlConfig::defaults(GameKind::kGops).to_json());
    CHECK(round.to_json() == RlConfig::defaults(GameKind::kGops).to_json());
  }
}
