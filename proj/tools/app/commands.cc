#include "commands.h"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "server.h"
#include "session.h"
#include "strategist/avalon.h"
#include "strategist/dialogue.h"
#include "strategist/improve.h"
#include "strategist/llm.h"
#include "strategist/selfplay.h"
#include "strategist/stats.h"
#include "strategist/value_domain.h"
#include "strategist/value_net.h"

namespace strategist::app {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw StrategistError("cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw StrategistError("cannot write '" + path.string() + "'");
  f << text;
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct LlmOptions {
  std::string mock_playbook;
  long max_requests = -1;
  long max_tokens = -1;
  int max_in_flight = 4;
  std::string audit_log;

  void add(CLI::App& cmd) {
    cmd.add_option("--mock-llm", mock_playbook, "Playbook file for the deterministic mock backend")
        ->check(CLI::ExistingFile);
    cmd.add_option("--max-requests", max_requests, "Request budget (negative: unlimited)");
    cmd.add_option("--max-tokens", max_tokens, "Token budget (negative: unlimited)");
    cmd.add_option("--max-in-flight", max_in_flight, "Concurrent model requests")->check(CLI::PositiveNumber);
    cmd.add_option("--audit-log", audit_log, "JSON-lines log of every model call");
  }

  json to_json() const {
    return {{"backend", mock_playbook.empty() ? "http" : "mock"},
            {"mock_playbook", mock_playbook},
            {"max_requests", max_requests},
            {"max_tokens", max_tokens},
            {"max_in_flight", max_in_flight},
            {"audit_log", audit_log}};
  }

  // Mock when a playbook is given, otherwise the HTTP backend from the
  // environment; `required` makes a missing endpoint an error.
  std::unique_ptr<llm::Gateway> gateway(bool required) const {
    std::shared_ptr<llm::Backend> backend;
    if (!mock_playbook.empty()) {
      backend = llm::MockBackend::from_file(mock_playbook);
    } else {
      auto cfg = llm::HttpBackendConfig::from_env();
      if (cfg.endpoint.empty()) {
        if (required) throw StrategistError("no model configured: pass --mock-llm or set STRATEGIST_LLM_ENDPOINT");
        return nullptr;
      }
      backend = llm::make_http_backend(cfg);
    }
    llm::GatewayConfig gc;
    gc.max_requests = max_requests;
    gc.max_tokens = max_tokens;
    gc.max_in_flight = max_in_flight;
    gc.audit_log = audit_log;
    return std::make_unique<llm::Gateway>(std::move(backend), gc);
  }
};

struct SearchOptions {
  SearchConfig config;
  void add(CLI::App& cmd) {
    cmd.add_option("--budget", config.budget, "Search rollouts per decision")->check(CLI::NonNegativeNumber);
    cmd.add_option("--c-puct", config.c_puct, "PUCT exploration constant");
    cmd.add_option("--alpha", config.alpha, "Heuristic prior weight in blended Q");
  }
};

struct EvolutionOptions {
  EvolutionConfig config;
  void add(CLI::App& cmd) {
    cmd.add_option("--evolutions", config.evolutions, "Improvement steps")->check(CLI::NonNegativeNumber);
    cmd.add_option("--strategies-per-step", config.strategies_per_step, "New strategies per step")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--num-ideas", config.num_ideas, "Ideas kept per idea-generation step")->check(CLI::PositiveNumber);
    cmd.add_option("--feedback-examples", config.feedback_examples, "Key states shown per reflection")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--ucb-c", config.ucb_c, "Idea exploration constant");
    cmd.add_option("--strategy-temperature", config.strategy_temperature, "Strategy selection temperature");
    cmd.add_option("--idea-temperature", config.idea_temperature, "Idea selection temperature");
  }
};

// Options shared by improve and baseline.
struct ImproveOptions {
  std::string game = "gops";
  std::string strategy = "value_heuristic";
  std::vector<std::string> seeds{"builtin:constant_zero"};
  std::uint64_t seed = 0;
  std::string out = "runs/improve";
  int games_per_pair = 2;
  int gops_cards = 6;
  int avalon_players = 5;
  int feedback_games = 2;
  int threads = 0;
  std::string role = "merlin";
  std::string objective;
  int scenarios = 4;
  std::string scenario_file;
  EvolutionOptions evolution;
  SearchOptions search;
  LlmOptions llm;

  void add(CLI::App& cmd) {
    cmd.add_option("--game", game, "gops or avalon")->check(CLI::IsMember({"gops", "avalon"}));
    cmd.add_option("--strategy", strategy, "value_heuristic or dialogue_guide")
        ->check(CLI::IsMember({"value_heuristic", "dialogue_guide"}));
    cmd.add_option("--seed-strategy", seeds,
                   "Seed strategies: builtin:<name>, heuristic files, or guide files for dialogue_guide");
    cmd.add_option("--seed", seed, "Run seed");
    cmd.add_option("--out", out, "Run directory");
    cmd.add_option("--games-per-pair", games_per_pair, "Evaluation games per pair and seating")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--gops-cards", gops_cards, "GOPS deck size")->check(CLI::Range(1, 13));
    cmd.add_option("--avalon-players", avalon_players, "Avalon players")->check(CLI::Range(5, 6));
    cmd.add_option("--feedback-games", feedback_games, "Self-play games per feedback collection")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--threads", threads, "Tournament worker threads (0: all cores)");
    cmd.add_option("--role", role, "Role whose dialogue guide is improved");
    cmd.add_option("--objective", objective, "Guide objective: minimum or evil_suspicion");
    cmd.add_option("--scenarios", scenarios, "Generated dialogue scenarios")->check(CLI::PositiveNumber);
    cmd.add_option("--scenario-file", scenario_file, "Dialogue scenarios JSON file")->check(CLI::ExistingFile);
    evolution.add(cmd);
    search.add(cmd);
    llm.add(cmd);
  }
};

struct GuideSetup {
  avalon::Role role;
  GuideObjective objective;
  std::vector<Scenario> scenarios;
};

GuideSetup guide_setup(const std::string& role_name, const std::string& objective_name, int count, int players,
                       const std::string& scenario_file, std::uint64_t seed) {
  GuideSetup s{avalon::role_from_string(role_name), GuideObjective::kMinimum, {}};
  s.objective = objective_name.empty() ? default_objective(s.role) : guide_objective_from_string(objective_name);
  if (!scenario_file.empty()) {
    s.scenarios = load_scenarios(scenario_file);
  } else {
    auto heuristic = load_heuristic(HeuristicSpec::builtin("avalon_quest_progress", GameKind::kAvalon));
    s.scenarios = make_scenarios(s.role, count, players, seed, heuristic);
  }
  return s;
}

int run_improvement(const ImproveOptions& o, ImproverKind kind, int bfs_k, const std::string& command,
                    std::ostream& out) {
  EvolutionConfig ec = o.evolution.config;
  ec.seed = o.seed;
  ec.output_dir = o.out;
  ec.validate();
  const GameKind game = game_kind_from_string(o.game);
  const StrategyKind skind = strategy_kind_from_string(o.strategy);
  auto gateway = o.llm.gateway(true);

  json config{{"game", o.game},
              {"strategy", o.strategy},
              {"improver", to_string(kind)},
              {"bfs_k", bfs_k},
              {"seed_strategies", o.seeds},
              {"evolution", ec.to_json()},
              {"llm", o.llm.to_json()}};

  std::unique_ptr<StrategyDomain> domain;
  std::vector<StrategyNode> seeds;
  if (skind == StrategyKind::kValueHeuristic) {
    ValueDomainConfig vc;
    vc.game = game;
    vc.tournament.game = game;
    vc.tournament.games_per_pair = o.games_per_pair;
    vc.tournament.gops_cards = o.gops_cards;
    vc.tournament.avalon_players = o.avalon_players;
    vc.tournament.search = o.search.config;
    vc.tournament.seed = o.seed;
    vc.tournament.threads = o.threads;
    vc.feedback_search = o.search.config;
    vc.feedback_games = o.feedback_games;
    config["domain"] = vc.to_json();
    for (const auto& s : o.seeds) seeds.push_back(seed_node(load_strategy_arg(s, game)));
    domain = std::make_unique<ValueHeuristicDomain>(vc);
  } else {
    if (game != GameKind::kAvalon) throw StrategistError("dialogue guides need --game avalon");
    auto setup = guide_setup(o.role, o.objective, o.scenarios, o.avalon_players, o.scenario_file, o.seed);
    config["domain"] = {{"role", avalon::to_string(setup.role)},
                        {"objective", to_string(setup.objective)},
                        {"scenarios", setup.scenarios.size()},
                        {"dialogue", DialogueConfig{}.to_json()}};
    for (const auto& s : o.seeds) {
      if (s.rfind("builtin:", 0) == 0) throw StrategistError("dialogue guide seeds must be guide files");
      seeds.push_back(seed_node(parse_guide(read_file(s))));
    }
    domain = std::make_unique<GuideDomain>(setup.role, std::move(setup.scenarios), setup.objective, *gateway);
  }

  fs::create_directories(o.out);
  write_json(fs::path(o.out) / "manifest.json", run_manifest(command, config, o.seed));
  auto result = run_evolution(seeds, *domain, *gateway, ec, kind, bfs_k, &std::cerr);
  write_json(fs::path(o.out) / "strategy_tree.json", result.tree.to_json());
  write_json(fs::path(o.out) / "idea_queue.json", result.queue.to_json());
  write_json(fs::path(o.out) / "report.json", result.report);
  const std::string summary = summarize(result);
  write_file(fs::path(o.out) / "summary.txt", summary);
  out << summary;
  return 0;
}

void print_events(const std::vector<Event>& events, std::ostream& out) {
  for (const auto& e : events) {
    if (e.type == "awaiting") continue;
    json p = e.payload;
    p.erase("public");
    out << "[" << e.type << "] " << p.dump() << "\n";
  }
}

int play_interactive(GameSession& session, int seat, std::istream& in, std::ostream& out) {
  long seen = 0;
  while (true) {
    auto events = session.events_after(seen, 0);
    print_events(events, out);
    if (!events.empty()) seen = events.back().seq;
    const json view = session.view(seat);
    if (view.at("status") == "finished") {
      out << "final returns: " << view.at("returns").dump() << "\n";
      return 0;
    }
    out << "observation: " << view.at("observation").dump() << "\n";
    const bool speech = view.at("pending").at("kind") == "speech";
    if (speech) {
      out << "your turn to speak> " << std::flush;
    } else {
      out << "legal: " << view.at("legal").dump();
      if (view.contains("team_size")) out << " (team size " << view.at("team_size") << ")";
      out << "\nyour move (JSON)> " << std::flush;
    }
    std::string line;
    if (!std::getline(in, line)) return 1;
    json body{{"seat", seat}};
    try {
      if (speech) {
        body["speech"] = line;
      } else {
        body["action"] = json::parse(line);
      }
      session.submit(seat, body);
    } catch (const SessionError& e) {
      out << "rejected: " << e.what() << " " << e.detail().dump() << "\n";
    } catch (const json::parse_error&) {
      out << "rejected: not JSON\n";
    }
  }
}

}  // namespace

HeuristicSpec load_strategy_arg(const std::string& arg, GameKind game) {
  if (arg.rfind("builtin:", 0) == 0) return HeuristicSpec::builtin(arg.substr(8), game);
  const std::string text = read_file(arg);
  try {
    const json j = json::parse(text);
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s.rfind("builtin:", 0) != 0) throw StrategistError("'" + arg + "' holds a string that is not builtin:<name>");
      return HeuristicSpec::builtin(s.substr(8), game);
    }
    auto spec = HeuristicSpec::from_json(j);
    if (spec.game != game) throw StrategistError("'" + arg + "' is a heuristic for another game");
    return spec;
  } catch (const json::parse_error&) {
    return HeuristicSpec::external(text, game, fs::path(arg).stem().string());
  }
}

json run_manifest(const std::string& command, const json& config, std::uint64_t seed) {
  json digests = json::object();
  for (const auto& id : llm::template_ids()) digests[id] = hex64(llm::prompt_template(id).digest());
  return {{"command", command}, {"version", "0.1.0"}, {"seed", seed}, {"config", config}, {"template_digests", digests}};
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strategy improvement for GOPS and Avalon"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML configuration file mirroring the flags");

  // improve
  ImproveOptions improve;
  auto* improve_cmd = app.add_subcommand("improve", "Run the idea-queue improvement loop");
  improve.add(*improve_cmd);

  // baseline
  ImproveOptions baseline;
  std::string method = "line";
  int bfs_k = 2;
  auto* baseline_cmd = app.add_subcommand("baseline", "Run a baseline improvement method");
  baseline.out = "runs/baseline";
  baseline.add(*baseline_cmd);
  baseline_cmd->add_option("--method", method, "line, greedy, bfs or bfs-thought")
      ->check(CLI::IsMember({"line", "greedy", "bfs", "bfs-thought"}));
  baseline_cmd->add_option("--bfs-k", bfs_k, "Parents kept by best-first search")->check(CLI::PositiveNumber);

  // tournament
  TournamentConfig tc;
  std::string t_game = "gops";
  std::vector<std::string> t_strategies;
  std::string t_out = "runs/tournament";
  SearchOptions t_search;
  auto* tournament_cmd = app.add_subcommand("tournament", "Round-robin evaluation of heuristics");
  tournament_cmd->add_option("--game", t_game, "gops or avalon")->check(CLI::IsMember({"gops", "avalon"}));
  tournament_cmd->add_option("--strategies", t_strategies, "builtin:<name> or heuristic files")
      ->required()
      ->expected(2, -1);
  tournament_cmd->add_option("--games", tc.games_per_pair, "Games per pair and seating")->check(CLI::PositiveNumber);
  tournament_cmd->add_option("--gops-cards", tc.gops_cards, "GOPS deck size")->check(CLI::Range(1, 13));
  tournament_cmd->add_option("--avalon-players", tc.avalon_players, "Avalon players")->check(CLI::Range(5, 6));
  tournament_cmd->add_option("--seed", tc.seed, "Seed");
  tournament_cmd->add_option("--threads", tc.threads, "Worker threads (0: all cores)");
  tournament_cmd->add_option("--out", t_out, "Run directory");
  t_search.add(*tournament_cmd);

  // rl-train
  std::string rl_game = "gops";
  std::uint64_t rl_seed = 0;
  std::string rl_out = "runs/rl";
  std::optional<int> rl_evolutions, rl_runs, rl_cards, rl_players;
  std::optional<double> rl_lr;
  auto* rl_cmd = app.add_subcommand("rl-train", "Train the neural value baseline");
  rl_cmd->add_option("--game", rl_game, "gops or avalon")->check(CLI::IsMember({"gops", "avalon"}));
  rl_cmd->add_option("--seed", rl_seed, "Seed");
  rl_cmd->add_option("--out", rl_out, "Run directory");
  rl_cmd->add_option("--evolutions", rl_evolutions, "Training evolutions")->check(CLI::PositiveNumber);
  rl_cmd->add_option("--runs", rl_runs, "Self-play episodes per evolution")->check(CLI::PositiveNumber);
  rl_cmd->add_option("--learning-rate", rl_lr, "SGD step size")->check(CLI::PositiveNumber);
  rl_cmd->add_option("--gops-cards", rl_cards, "GOPS deck size")->check(CLI::Range(1, 13));
  rl_cmd->add_option("--avalon-players", rl_players, "Avalon players")->check(CLI::Range(5, 6));

  // eval-guide
  std::string g_file, g_role = "merlin", g_objective, g_scenario_file, g_out = "runs/guide";
  int g_scenarios = 4, g_players = 5;
  std::uint64_t g_seed = 0;
  LlmOptions g_llm;
  auto* guide_cmd = app.add_subcommand("eval-guide", "Score a dialogue guide");
  guide_cmd->add_option("--guide", g_file, "Guide text file")->required()->check(CLI::ExistingFile);
  guide_cmd->add_option("--role", g_role, "Speaker role");
  guide_cmd->add_option("--objective", g_objective, "minimum or evil_suspicion");
  guide_cmd->add_option("--scenarios", g_scenarios, "Generated scenarios")->check(CLI::PositiveNumber);
  guide_cmd->add_option("--scenario-file", g_scenario_file, "Scenarios JSON file")->check(CLI::ExistingFile);
  guide_cmd->add_option("--avalon-players", g_players, "Avalon players")->check(CLI::Range(5, 6));
  guide_cmd->add_option("--seed", g_seed, "Seed");
  guide_cmd->add_option("--out", g_out, "Run directory");
  g_llm.add(*guide_cmd);

  // play
  std::string p_game = "gops", p_heuristic, p_guide;
  int p_seat = 0, p_cards = 5, p_players = 5, p_rounds = 0;
  std::uint64_t p_seed = 0;
  SearchOptions p_search;
  LlmOptions p_llm;
  auto* play_cmd = app.add_subcommand("play", "Play a game in the terminal against agents");
  play_cmd->add_option("--game", p_game, "gops or avalon")->check(CLI::IsMember({"gops", "avalon"}));
  play_cmd->add_option("--seat", p_seat, "Your seat");
  play_cmd->add_option("--gops-cards", p_cards, "GOPS deck size")->check(CLI::Range(1, 13));
  play_cmd->add_option("--avalon-players", p_players, "Avalon players")->check(CLI::Range(5, 6));
  play_cmd->add_option("--discussion-rounds", p_rounds, "Avalon discussion rounds per window")
      ->check(CLI::NonNegativeNumber);
  play_cmd->add_option("--heuristic", p_heuristic, "Agent heuristic: builtin:<name> or a file");
  play_cmd->add_option("--guide", p_guide, "Agent dialogue guide file")->check(CLI::ExistingFile);
  play_cmd->add_option("--seed", p_seed, "Seed");
  p_search.add(*play_cmd);
  p_llm.add(*play_cmd);

  // serve
  ServerConfig s_config;
  LlmOptions s_llm;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP and WebSocket service for live play");
  serve_cmd->add_option("--host", s_config.host, "Bind address");
  serve_cmd->add_option("--port", s_config.port, "HTTP port")->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--ws-port", s_config.ws_port, "WebSocket port (0: disabled)")->check(CLI::Range(0, 65535));
  s_llm.add(*serve_cmd);

  // anova
  std::vector<std::string> a_groups;
  auto* anova_cmd = app.add_subcommand("anova", "One-way ANOVA over JSON arrays of scores");
  anova_cmd->add_option("--groups", a_groups, "JSON files, each an array of numbers")
      ->required()
      ->expected(2, -1)
      ->check(CLI::ExistingFile);

  std::vector<std::string> argv_store{"strategist"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  try {
    if (improve_cmd->parsed()) return run_improvement(improve, ImproverKind::kStrategist, 2, "improve", out);
    if (baseline_cmd->parsed()) {
      return run_improvement(baseline, improver_kind_from_string(method), bfs_k, "baseline", out);
    }

    if (tournament_cmd->parsed()) {
      tc.game = game_kind_from_string(t_game);
      tc.search = t_search.config;
      tc.population_cap = static_cast<int>(t_strategies.size());
      tc.results_log = (fs::path(t_out) / "games.jsonl").string();
      std::vector<Competitor> competitors;
      for (const auto& s : t_strategies) {
        auto spec = load_strategy_arg(s, tc.game);
        if (spec.id.empty()) spec.id = s;
        std::string id = spec.id;
        for (int n = 2; std::any_of(competitors.begin(), competitors.end(), [&](auto& c) { return c.id == id; }); ++n) {
          id = spec.id + "#" + std::to_string(n);
        }
        competitors.push_back({id, load_heuristic(spec)});
      }
      fs::create_directories(t_out);
      write_json(fs::path(t_out) / "manifest.json",
                 run_manifest("tournament", {{"tournament", tc.to_json()}, {"strategies", t_strategies}}, tc.seed));
      const auto results = round_robin(competitors, tc);
      const auto report = score_population(results);
      json matches = json::array();
      for (const auto& r : results) matches.push_back(r.to_json());
      json rj = report.to_json();
      write_json(fs::path(t_out) / "report.json", rj);
      write_json(fs::path(t_out) / "matches.json", matches);
      for (const auto& s : report.scores) {
        out << s.id << "  mean " << s.mean << "  se " << (s.se ? std::to_string(*s.se) : "-") << "  games " << s.games
            << "\n";
      }
      return 0;
    }

    if (rl_cmd->parsed()) {
      RlConfig rc = RlConfig::defaults(game_kind_from_string(rl_game));
      if (rl_evolutions) rc.evolutions = *rl_evolutions;
      if (rl_runs) rc.runs_per_evolution = *rl_runs;
      if (rl_lr) rc.learning_rate = *rl_lr;
      if (rl_cards) rc.gops_cards = *rl_cards;
      if (rl_players) rc.avalon_players = *rl_players;
      rc.validate();
      fs::create_directories(rl_out);
      write_json(fs::path(rl_out) / "manifest.json", run_manifest("rl-train", {{"rl", rc.to_json()}}, rl_seed));
      RlReport report;
      const auto model = rl_train(rc, rl_seed, &report);
      model.save((fs::path(rl_out) / "model.json").string());
      write_json(fs::path(rl_out) / "report.json", report.to_json());
      for (std::size_t i = 0; i < report.loss_before.size(); ++i) {
        out << "evolution " << i + 1 << "  loss " << report.loss_before[i] << " -> " << report.loss_after[i] << "\n";
      }
      out << "heuristic: builtin:rl_value:" << (fs::path(rl_out) / "model.json").string() << "\n";
      return 0;
    }

    if (guide_cmd->parsed()) {
      auto gateway = g_llm.gateway(true);
      const auto guide = parse_guide(read_file(g_file));
      auto setup = guide_setup(g_role, g_objective, g_scenarios, g_players, g_scenario_file, g_seed);
      fs::create_directories(g_out);
      write_json(fs::path(g_out) / "manifest.json",
                 run_manifest("eval-guide",
                              {{"guide", g_file},
                               {"role", avalon::to_string(setup.role)},
                               {"objective", to_string(setup.objective)},
                               {"scenarios", setup.scenarios.size()},
                               {"llm", g_llm.to_json()}},
                              g_seed));
      const auto score = evaluate_guide(guide, setup.scenarios, *gateway, setup.objective);
      write_json(fs::path(g_out) / "report.json", score.to_json());
      out << "z = " << score.z << " over " << score.scenarios_used << " scenarios\n";
      return 0;
    }

    if (play_cmd->parsed()) {
      auto gateway = p_llm.gateway(false);
      SessionConfig sc;
      sc.game = game_kind_from_string(p_game);
      sc.gops_cards = p_cards;
      sc.avalon_players = p_players;
      sc.discussion_rounds = p_rounds;
      sc.human_seats = {p_seat};
      sc.seed = p_seed;
      sc.search = p_search.config;
      if (!p_heuristic.empty()) sc.heuristic = load_strategy_arg(p_heuristic, sc.game);
      if (!p_guide.empty()) sc.guide = parse_guide(read_file(p_guide));
      sc = SessionConfig::from_json(sc.to_json());
      GameSession session("local", sc, gateway.get());
      return play_interactive(session, p_seat, in, out);
    }

    if (serve_cmd->parsed()) {
      auto gateway = s_llm.gateway(false);
      SessionManager sessions(gateway.get());
      return serve(sessions, s_config);
    }

    if (anova_cmd->parsed()) {
      std::vector<std::vector<double>> groups;
      for (const auto& g : a_groups) groups.push_back(json::parse(read_file(g)).get<std::vector<double>>());
      const auto r = anova_oneway(groups);
      out << "F = " << (r.f_infinite ? std::string("inf") : py_float(r.f)) << "\n";
      out << "p = " << py_float(r.p) << "\n";
      out << "df = (" << r.df_between << ", " << r.df_within << ")\n";
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace strategist::app
