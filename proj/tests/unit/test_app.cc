#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "commands.h"
#include "doctest.h"
#include "httplib.h"
#include "server.h"
#include "session.h"

using namespace strategist;
using namespace strategist::app;

namespace {

SessionConfig gops_config(std::vector<int> humans = {0}, std::uint64_t seed = 1) {
  SessionConfig c;
  c.game = GameKind::kGops;
  c.gops_cards = 5;
  c.human_seats = std::move(humans);
  c.seed = seed;
  c.search.budget = 8;
  return c;
}

SessionConfig avalon_config(int players, std::vector<int> humans, std::uint64_t seed, int discussion = 0) {
  SessionConfig c;
  c.game = GameKind::kAvalon;
  c.avalon_players = players;
  c.discussion_rounds = discussion;
  c.human_seats = std::move(humans);
  c.seed = seed;
  c.search.budget = 4;
  return c;
}

int expect_status(const std::function<void()>& f) {
  try {
    f();
  } catch (const SessionError& e) {
    return e.status();
  }
  return 0;
}

// Plays the first legal action for every pending human seat.
void play_out(GameSession& s) {
  while (!s.finished()) {
    const json pub = s.view(std::nullopt);
    const int seat = pub.at("pending").at("seat");
    if (pub.at("pending").at("kind") == "speech") {
      s.submit(seat, {{"speech", "Nothing to report."}});
    } else {
      s.submit(seat, {{"action", s.view(seat).at("legal").at(0)}});
    }
  }
}

bool contains_role_name(const std::string& text) {
  for (const char* r : {"\"Merlin\"", "\"Servant\"", "\"Assassin\"", "\"Minion\""}) {
    if (text.find(r) != std::string::npos) return true;
  }
  return false;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    std::ofstream(path / name) << content;
    return (path / name).string();
  }
};

int cli(const std::vector<std::string>& args, std::string* output = nullptr, const std::string& input = {}) {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_cli(args, in, out, err);
  if (output) *output = out.str() + err.str();
  return code;
}

}  // namespace

TEST_SUITE("app") {
  TEST_CASE("a GOPS session plays to the end and conserves prize points") {
    GameSession s("t", gops_config());
    play_out(s);
    const auto events = s.events_after(0, 0);
    REQUIRE_FALSE(events.empty());
    CHECK(events.front().type == "session_created");
    const auto& over = events.back();
    CHECK(over.type == "game_over");
    const int total = over.payload.at("scores").at(0).get<int>() + over.payload.at("scores").at(1).get<int>() +
                      over.payload.at("pot").get<int>();
    CHECK(total == 15);
    for (std::size_t i = 0; i < events.size(); ++i) CHECK(events[i].seq == static_cast<long>(i) + 1);
    CHECK(expect_status([&] { s.submit(0, {{"action", 1}}); }) == 409);
  }

  TEST_CASE("turn, shape and legality errors map to statuses") {
    GameSession s("t", gops_config({1}));
    const json v = s.view(1);
    CHECK(v.at("pending").at("seat") == 1);
    CHECK(expect_status([&] { s.submit(0, {{"action", 1}}); }) == 409);
    CHECK(expect_status([&] { s.submit(1, {{"move", 1}}); }) == 400);
    try {
      s.submit(1, {{"action", {{"card", 99}}}});
      FAIL("illegal card accepted");
    } catch (const SessionError& e) {
      CHECK(e.status() == 422);
      CHECK(e.detail().at("legal") == v.at("legal"));
    }
    CHECK(expect_status([&] { s.view(7); }) == 400);
    CHECK(expect_status([] { SessionConfig::from_json({{"human_seats", {0, 0}}}); }) == 400);
    CHECK(expect_status([] { SessionConfig::from_json({{"game", "chess"}}); }) == 400);
  }

  TEST_CASE("avalon seat views show only the seat's own role") {
    GameSession s("t", avalon_config(6, {0}, 4));
    const json v = s.view(0);
    CHECK(v.at("observation").at("private").at("seat") == 0);
    json pub = v.at("observation");
    pub.erase("private");
    CHECK_FALSE(contains_role_name(pub.dump()));
    CHECK(s.view(std::nullopt).at("observation").at("private").is_null());
  }

  TEST_CASE("team proposals of the wrong size are rejected with the team size") {
    {
      GameSession s("t", avalon_config(5, {0, 1, 2, 3, 4}, 0));
      const json v = s.view(std::nullopt);
      const int leader = v.at("pending").at("seat");
      const json lv = s.view(leader);
      REQUIRE(lv.contains("team_size"));
      const int size = lv.at("team_size");
      std::vector<int> team;
      for (int i = 0; i <= size; ++i) team.push_back(i);
      try {
        s.submit(leader, {{"action", {{"team", team}}}});
        FAIL("oversized team accepted");
      } catch (const SessionError& e) {
        CHECK(e.status() == 422);
        CHECK(e.detail().at("team_size") == size);
      }
    }
  }

  TEST_CASE("sessions replay deterministically from the action log") {
    GameSession a("a", gops_config({0}, 9));
    play_out(a);
    GameSession b("b", gops_config({0}, 9));
    for (const auto& entry : a.action_log()) b.submit(entry.at("seat"), entry);
    CHECK(b.finished());
    CHECK(a.final_state_key() == b.final_state_key());

    GameSession c("c", avalon_config(5, {2}, 3, 1));
    play_out(c);
    GameSession d("d", avalon_config(5, {2}, 3, 1));
    for (const auto& entry : c.action_log()) d.submit(entry.at("seat"), entry);
    CHECK(c.final_state_key() == d.final_state_key());
  }

  TEST_CASE("views and events never leak hidden information") {
    Rng rng(17);
    int snapshots = 0;
    for (std::uint64_t game = 0; snapshots < 1000; ++game) {
      const bool gops = game % 3 == 0;
      const int players = gops ? 2 : 5 + static_cast<int>(game % 2);
      std::vector<int> humans;
      for (int i = 0; i < players; ++i) humans.push_back(i);
      GameSession s("f", gops ? gops_config(humans, game) : avalon_config(players, humans, game, 1));
      long seen = 0;
      while (true) {
        const json pub = s.view(std::nullopt);
        for (int seat = 0; seat < players; ++seat) {
          const json v = s.view(seat);
          ++snapshots;
          const json& obs = v.at("observation");
          if (gops) {
            if (obs.at("player_0_committed").get<bool>() && seat == 1) {
              CHECK(obs.at("player_0_hand").size() == obs.at("player_1_hand").size());
            }
          } else if (pub.at("status") == "in_progress") {
            CHECK(obs.at("private").at("seat") == seat);
            json rest = obs;
            rest.erase("private");
            CHECK_FALSE(contains_role_name(rest.dump()));
          }
        }
        for (const auto& e : s.events_after(seen, 0)) {
          seen = e.seq;
          if (e.type == "move") CHECK_FALSE(e.payload.contains("card"));
          if (e.type != "game_over") CHECK_FALSE(contains_role_name(e.payload.dump()));
        }
        if (s.finished()) break;
        const int seat = pub.at("pending").at("seat");
        if (pub.at("pending").at("kind") == "speech") {
          s.submit(seat, {{"speech", "I pass."}});
        } else {
          const json legal = s.view(seat).at("legal");
          s.submit(seat, {{"action", legal.at(rng() % legal.size())}});
        }
      }
    }
    CHECK(snapshots >= 1000);
  }

  TEST_CASE("http routes") {
    SessionManager sessions;
    httplib::Server server;
    install_routes(server, sessions, {});
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    httplib::Client client("127.0.0.1", port);

    auto health = client.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);

    auto created = client.Post("/games", gops_config({0}).to_json().dump(), "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const json game = json::parse(created->body);
    const std::string id = game.at("id");

    auto view = client.Get("/games/" + id + "?seat=0");
    REQUIRE(view);
    const json v = json::parse(view->body);
    CHECK(v.at("pending").at("seat") == 0);

    auto bad = client.Post("/games/" + id + "/actions", R"({"seat": 0, "action": {"card": 42}})", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 422);
    CHECK(json::parse(bad->body).at("legal") == v.at("legal"));

    auto malformed = client.Post("/games/" + id + "/actions", "{", "application/json");
    REQUIRE(malformed);
    CHECK(malformed->status == 400);

    auto missing = client.Get("/games/nope");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    const long last = v.at("last_event");
    std::thread mover([&] {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
      httplib::Client c2("127.0.0.1", port);
      c2.Post("/games/" + id + "/actions", json{{"seat", 0}, {"action", v.at("legal").at(0)}}.dump(),
              "application/json");
    });
    auto polled = client.Get("/games/" + id + "/events?after=" + std::to_string(last) + "&timeout_ms=5000");
    mover.join();
    REQUIRE(polled);
    const json events = json::parse(polled->body);
    REQUIRE_FALSE(events.at("events").empty());
    for (const auto& e : events.at("events")) {
      CHECK(e.contains("type"));
      CHECK(e.contains("payload"));
      CHECK(e.at("seq").get<long>() > last);
    }
    CHECK(events.at("last") == events.at("events").back().at("seq"));

    server.stop();
    t.join();
  }

  TEST_CASE("websocket frames") {
    namespace beast = boost::beast;
    namespace asio = boost::asio;
    SessionManager sessions;
    const auto session = sessions.create(gops_config({0}));
    WebSocketServer wss(sessions, "127.0.0.1", 0);
    const int port = wss.start();
    {
      asio::io_context ioc;
      asio::ip::tcp::resolver resolver(ioc);
      beast::websocket::stream<asio::ip::tcp::socket> ws(ioc);
      asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
      ws.handshake("127.0.0.1", "/games/" + session->id() + "/events?after=0");
      auto read_until = [&](const std::string& type) {
        for (int i = 0; i < 100; ++i) {
          beast::flat_buffer buf;
          ws.read(buf);
          const json frame = json::parse(beast::buffers_to_string(buf.data()));
          CHECK(frame.contains("payload"));
          if (frame.at("type") == type) return frame;
        }
        return json();
      };
      const json awaiting = read_until("awaiting");
      CHECK(awaiting.at("payload").at("seat") == 0);

      ws.write(asio::buffer(json{{"type", "action"}, {"payload", {{"seat", 0}, {"action", {{"card", 77}}}}}}.dump()));
      const json error = read_until("error");
      CHECK(error.at("payload").at("status") == 422);
      CHECK(error.at("payload").contains("legal"));

      const json legal = session->view(0).at("legal");
      ws.write(asio::buffer(json{{"type", "action"}, {"payload", {{"seat", 0}, {"action", legal.at(0)}}}}.dump()));
      const json view = read_until("view");
      CHECK(view.at("payload").at("seat") == 0);
      ws.close(beast::websocket::close_code::normal);
    }
    wss.stop();
  }

  TEST_CASE("cli usage errors and help") {
    std::string out;
    CHECK(cli({"--help"}, &out) == 0);
    CHECK(out.find("tournament") != std::string::npos);
    CHECK(cli({"tournament", "--bogus"}) == 2);
    CHECK(cli({"improve", "--game", "chess"}) == 2);
    CHECK(cli({}) == 2);
  }

  TEST_CASE("cli anova") {
    TempDir dir("strategist_cli_anova");
    std::string out;
    CHECK(cli({"anova", "--groups", dir.file("a.json", "[1, 2, 3]"), dir.file("b.json", "[2, 3, 4]")}, &out) == 0);
    CHECK(out.find("F = 1.5\n") != std::string::npos);
    CHECK(out.find("df = (1, 4)") != std::string::npos);
    CHECK(cli({"anova", "--groups", dir.file("c.json", "[1]"), dir.file("d.json", "[2]")}) == 1);
  }

  TEST_CASE("cli tournament writes a full pairwise matrix") {
    TempDir dir("strategist_cli_tournament");
    std::string out;
    const auto code = cli({"tournament", "--strategies", "builtin:constant_zero", "builtin:gops_current_score",
                           "--games", "1", "--gops-cards", "3", "--budget", "4", "--threads", "1", "--out",
                           dir.path.string()},
                          &out);
    REQUIRE(code == 0);
    std::ifstream in(dir.path / "report.json");
    const json report = json::parse(in);
    REQUIRE(report.at("matrix").size() == 2);
    CHECK(report.at("matrix").at(0).size() == 2);
    CHECK(std::filesystem::exists(dir.path / "manifest.json"));
    CHECK(std::filesystem::exists(dir.path / "matches.json"));
    CHECK(std::filesystem::exists(dir.path / "games.jsonl"));
  }

  TEST_CASE("cli improve with the mock backend") {
    TempDir dir("strategist_cli_improve");
    std::ifstream ideas_in(std::string(STRATEGIST_FIXTURE_DIR) + "/generated_ideas_fixture.txt");
    std::stringstream ideas;
    ideas << ideas_in.rdbuf();
    const json playbook = json::array({
        {{"template_id", "value_feedback_reflection"}, {"ordinal", -1}, {"reply", "Early states are misjudged."}},
        {{"template_id", "value_idea_generation"}, {"ordinal", -1}, {"reply", ideas.str()}},
        {{"template_id", "value_implementation"}, {"ordinal", -1}, {"reply", "#builtin: gops_expected_share"}},
    });
    const auto pb = dir.file("playbook.json", playbook.dump());
    std::string out;
    const int code = cli({"improve", "--game", "gops", "--seed-strategy", "builtin:constant_zero", "--mock-llm", pb,
                          "--evolutions", "2", "--strategies-per-step", "2", "--games-per-pair", "1", "--gops-cards",
                          "4", "--budget", "4", "--feedback-games", "1", "--threads", "1", "--out", dir.path.string()},
                         &out);
    INFO(out);
    REQUIRE(code == 0);
    std::ifstream tree_in(dir.path / "strategy_tree.json");
    const json tree = json::parse(tree_in);
    CHECK(tree.at("nodes").size() == 5);
    for (const char* f : {"manifest.json", "idea_queue.json", "report.json", "summary.txt"}) {
      CHECK(std::filesystem::exists(dir.path / f));
    }
    std::ifstream manifest_in(dir.path / "manifest.json");
    const json manifest = json::parse(manifest_in);
    CHECK(manifest.at("command") == "improve");
    CHECK(manifest.at("template_digests").size() == 16);
  }

  TEST_CASE("cli play reads moves from the input stream") {
    std::string out;
    const int code = cli({"play", "--game", "gops", "--gops-cards", "3", "--budget", "4"}, &out,
                         "{\"card\": 1}\n{\"card\": 2}\n{\"card\": 3}\n");
    CHECK(code == 0);
    CHECK(out.find("final returns") != std::string::npos);
  }
}
