#include "strategist/selfplay.h"

#include <array>
#include <atomic>
#include <mutex>
#include <fstream>
#include <thread>

#include "strategist/avalon.h"
#include "strategist/gops.h"
#include "strategist/stats.h"

namespace strategist {

json TournamentConfig::to_json() const {
  return {{"game", to_string(game)},         {"games_per_pair", games_per_pair},
          {"population_cap", population_cap}, {"search", search.to_json()},
          {"gops_cards", gops_cards},         {"avalon_players", avalon_players},
          {"seed", seed},                     {"threads", threads},
          {"results_log", results_log}};
}

TournamentConfig TournamentConfig::from_json(const json& j) {
  TournamentConfig c;
  if (j.contains("game")) c.game = game_kind_from_string(j.at("game").get<std::string>());
  c.games_per_pair = j.value("games_per_pair", c.games_per_pair);
  c.population_cap = j.value("population_cap", c.population_cap);
  if (j.contains("search")) c.search = SearchConfig::from_json(j.at("search"));
  c.gops_cards = j.value("gops_cards", c.gops_cards);
  c.avalon_players = j.value("avalon_players", c.avalon_players);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.results_log = j.value("results_log", c.results_log);
  if (c.games_per_pair < 1) throw StrategistError("games_per_pair must be at least 1");
  if (c.population_cap < 2) throw StrategistError("population_cap must be at least 2");
  return c;
}

json GameRecord::to_json() const {
  json j{{"seed", seed}, {"a_focal", a_focal}, {"focal_seat", focal_seat}};
  if (!focal_role.empty()) j["focal_role"] = focal_role;
  j["score_a"] = score_a ? json(*score_a) : json(nullptr);
  j["score_b"] = score_b ? json(*score_b) : json(nullptr);
  if (error) j["error"] = *error;
  return j;
}

json MatchResult::to_json() const {
  json games_json = json::array();
  for (const auto& g : games) games_json.push_back(g.to_json());
  return {{"a", a}, {"b", b}, {"games", games_json}};
}

const StrategyScore& EvalReport::score_of(const std::string& id) const {
  for (const auto& s : scores) {
    if (s.id == id) return s;
  }
  throw StrategistError("no score for strategy '" + id + "'");
}

json EvalReport::to_json() const {
  json j;
  j["strategies"] = json::array();
  for (const auto& s : scores) {
    json e{{"id", s.id}, {"mean", s.mean}, {"games", s.games}};
    e["se"] = s.se ? json(*s.se) : json(nullptr);
    if (!s.by_role.empty()) e["by_role"] = s.by_role;
    j["strategies"].push_back(e);
  }
  j["ids"] = ids;
  j["matrix"] = json::array();
  for (const auto& row : matrix) {
    json r = json::array();
    for (const auto& v : row) r.push_back(v ? json(*v) : json(nullptr));
    j["matrix"].push_back(r);
  }
  return j;
}

namespace {

// Remembers which side's heuristic failed during a game.
class TrackedPolicy final : public Policy {
 public:
  TrackedPolicy(PolicyPtr inner, int side, std::atomic<int>* failed) : inner_(std::move(inner)), side_(side), failed_(failed) {}
  ActionId act(const State& state, Rng& rng) override {
    try {
      return inner_->act(state, rng);
    } catch (const EvaluationError&) {
      failed_->store(side_);
      throw;
    }
  }
  std::string name() const override { return inner_->name(); }

 private:
  PolicyPtr inner_;
  int side_;
  std::atomic<int>* failed_;
};

PolicyPtr policy_for(const Competitor& c, const SearchConfig& search, int side, std::atomic<int>* failed) {
  return std::make_shared<TrackedPolicy>(std::make_shared<SearchPolicy>(c.heuristic, search), side, failed);
}

}  // namespace

GameRecord play_pair_game(const Competitor& a, const Competitor& b, bool a_focal, int arrangement,
                          std::uint64_t seed, const TournamentConfig& config) {
  GameRecord rec;
  rec.seed = seed;
  rec.a_focal = a_focal;
  std::atomic<int> failed{-1};
  SearchConfig search = config.search;
  search.seed = mix_seed(seed, 1);
  // side 0 is a, side 1 is b.
  std::vector<int> side_of_seat;
  StatePtr initial;
  if (config.game == GameKind::kGops) {
    rec.focal_seat = arrangement % 2;
    side_of_seat = rec.focal_seat == 0 ? std::vector<int>{0, 1} : std::vector<int>{1, 0};
    initial = std::make_unique<gops::GopsState>(gops::new_game(config.gops_cards, seed));
  } else {
    auto game = avalon::new_game(config.avalon_players, mix_seed(seed, 2), 0);
    Rng seat_rng(mix_seed(seed, 3));
    rec.focal_seat = static_cast<int>(seat_rng() % static_cast<std::uint64_t>(config.avalon_players));
    rec.focal_role = avalon::to_string(game.role_of(rec.focal_seat));
    const int focal_side = a_focal ? 0 : 1;
    side_of_seat.assign(config.avalon_players, 1 - focal_side);
    side_of_seat[rec.focal_seat] = focal_side;
    initial = std::make_unique<avalon::AvalonState>(std::move(game));
  }
  std::vector<PolicyPtr> policies;
  for (int side : side_of_seat) policies.push_back(policy_for(side == 0 ? a : b, search, side, &failed));
  try {
    const auto traj = rollout(*initial, StrategicProfile(policies), mix_seed(seed, 4));
    std::array<double, 2> sum{0.0, 0.0};
    std::array<int, 2> count{0, 0};
    for (std::size_t s = 0; s < side_of_seat.size(); ++s) {
      sum[side_of_seat[s]] += traj.final_returns[s];
      ++count[side_of_seat[s]];
    }
    rec.score_a = sum[0] / count[0];
    rec.score_b = sum[1] / count[1];
  } catch (const EvaluationError& e) {
    rec.error = e.what();
    if (failed.load() == 0) {
      rec.score_a = 0.0;
    } else {
      rec.score_b = 0.0;
    }
  }
  return rec;
}

std::vector<MatchResult> round_robin(const std::vector<Competitor>& competitors, const TournamentConfig& config) {
  if (competitors.size() < 2) throw StrategistError("round robin needs at least two strategies");
  if (config.games_per_pair < 1) throw StrategistError("games_per_pair must be at least 1");
  const std::size_t n = std::min<std::size_t>(competitors.size(), static_cast<std::size_t>(config.population_cap));

  struct Job {
    std::size_t match, i, j;
    bool a_focal;
    int arrangement;
    std::uint64_t seed;
  };
  std::vector<MatchResult> results;
  std::vector<Job> jobs;
  std::uint64_t game_index = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      results.push_back({competitors[i].id, competitors[j].id, {}});
      for (int arrangement = 0; arrangement < 2; ++arrangement) {
        for (int g = 0; g < config.games_per_pair; ++g) {
          const bool a_focal = config.game == GameKind::kGops || arrangement == 0;
          jobs.push_back({results.size() - 1, i, j, a_focal, arrangement, mix_seed(config.seed, game_index++)});
        }
      }
    }
  }

  std::vector<GameRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      const Job& job = jobs[k];
      try {
        records[k] = play_pair_game(competitors[job.i], competitors[job.j], job.a_focal, job.arrangement, job.seed, config);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t k = 0; k < jobs.size(); ++k) results[jobs[k].match].games.push_back(records[k]);
  if (!config.results_log.empty()) {
    std::ofstream log(config.results_log, std::ios::app);
    if (!log) throw StrategistError("cannot open results log '" + config.results_log + "'");
    for (const auto& m : results) {
      for (const auto& g : m.games) {
        json line = g.to_json();
        line["a"] = m.a;
        line["b"] = m.b;
        log << line.dump() << '\n';
      }
    }
  }
  return results;
}

EvalReport score_population(const std::vector<MatchResult>& results) {
  if (results.empty()) throw StrategistError("no results to score");
  EvalReport report;
  auto index_of = [&](const std::string& id) {
    for (std::size_t i = 0; i < report.ids.size(); ++i) {
      if (report.ids[i] == id) return i;
    }
    report.ids.push_back(id);
    return report.ids.size() - 1;
  };
  for (const auto& m : results) {
    index_of(m.a);
    index_of(m.b);
  }
  const std::size_t n = report.ids.size();
  std::vector<std::vector<double>> samples(n);
  std::vector<std::vector<std::vector<double>>> pair(n, std::vector<std::vector<double>>(n));
  std::vector<std::map<std::string, std::vector<double>>> roles(n);
  for (const auto& m : results) {
    const std::size_t a = index_of(m.a), b = index_of(m.b);
    for (const auto& g : m.games) {
      if (g.score_a) {
        samples[a].push_back(*g.score_a);
        pair[a][b].push_back(*g.score_a);
        if (!g.focal_role.empty() && g.a_focal) roles[a][g.focal_role].push_back(*g.score_a);
      }
      if (g.score_b) {
        samples[b].push_back(*g.score_b);
        pair[b][a].push_back(*g.score_b);
        if (!g.focal_role.empty() && !g.a_focal) roles[b][g.focal_role].push_back(*g.score_b);
      }
    }
  }
  report.matrix.assign(n, std::vector<std::optional<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    StrategyScore s;
    s.id = report.ids[i];
    s.mean = mean(samples[i]);
    s.se = standard_error(samples[i]);
    s.games = static_cast<int>(samples[i].size());
    for (const auto& [role, xs] : roles[i]) s.by_role[role] = mean(xs);
    report.scores.push_back(s);
    for (std::size_t j = 0; j < n; ++j) {
      if (!pair[i][j].empty()) report.matrix[i][j] = mean(pair[i][j]);
    }
  }
  return report;
}

}  // namespace strategist
