#pragma once

// Population-based evaluation: round-robin games among strategies, per
// strategy means and pairwise matrices.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strategist/heuristics.h"
#include "strategist/search.h"

namespace strategist {

struct Competitor {
  std::string id;
  HeuristicHandle heuristic;
};

struct TournamentConfig {
  GameKind game = GameKind::kGops;
  int games_per_pair = 2;
  int population_cap = 10;
  SearchConfig search;
  int gops_cards = 6;
  int avalon_players = 5;
  std::uint64_t seed = 0;
  // Worker threads; 0 uses the hardware concurrency.
  int threads = 0;
  // Optional JSON-lines file receiving one line per game.
  std::string results_log;

  json to_json() const;
  static TournamentConfig from_json(const json& j);
};

// One game between strategies a and b. GOPS: a sits in `seat_a`, b in the
// other seat, scores are point differences. Avalon: the focal strategy fills
// `seat_a` (when `a_focal`) or b fills one seat and a the rest; scores are win
// indicators averaged over each strategy's seats.
struct GameRecord {
  std::uint64_t seed = 0;
  bool a_focal = true;
  int focal_seat = 0;
  std::string focal_role;
  std::optional<double> score_a;
  std::optional<double> score_b;
  // Set when a heuristic failed; the failing side scores 0 and the game does
  // not count for its opponent.
  std::optional<std::string> error;

  json to_json() const;
};

struct MatchResult {
  std::string a;
  std::string b;
  std::vector<GameRecord> games;

  json to_json() const;
};

struct StrategyScore {
  std::string id;
  double mean = 0.0;
  std::optional<double> se;
  int games = 0;
  // Avalon only: mean by the role the strategy's focal seat held.
  std::map<std::string, double> by_role;
};

struct EvalReport {
  std::vector<StrategyScore> scores;  // in population order
  std::vector<std::string> ids;
  // matrix[i][j]: mean score of ids[i] in its games against ids[j].
  std::vector<std::vector<std::optional<double>>> matrix;

  const StrategyScore& score_of(const std::string& id) const;
  json to_json() const;
};

// Plays every unordered pair of the first `population_cap` competitors
// `games_per_pair` times per seat arrangement (GOPS: both seats; Avalon: each
// strategy focal in turn). Deterministic in (competitors, config).
std::vector<MatchResult> round_robin(const std::vector<Competitor>& competitors, const TournamentConfig& config);

EvalReport score_population(const std::vector<MatchResult>& results);

// Plays one game of `a` against `b`; exposed for the tournament command and tests.
GameRecord play_pair_game(const Competitor& a, const Competitor& b, bool a_focal, int arrangement,
                          std::uint64_t seed, const TournamentConfig& config);

}  // namespace strategist
