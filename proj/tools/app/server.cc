#include "server.h"

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <iostream>
#include <regex>

#include "httplib.h"

namespace strategist::app {

namespace {

namespace beast = boost::beast;
namespace asio = boost::asio;
using tcp = asio::ip::tcp;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const SessionError& e) {
  json body = e.detail().is_object() ? e.detail() : json::object();
  body["error"] = e.what();
  send_json(res, e.status(), body);
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const SessionError& e) {
    send_error(res, e);
  } catch (const json::exception& e) {
    send_error(res, SessionError(400, e.what()));
  } catch (const std::exception& e) {
    send_error(res, SessionError(500, e.what()));
  }
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw SessionError(400, std::string("malformed JSON: ") + e.what());
  }
}

long parse_long(const std::string& text, const std::string& name) {
  try {
    std::size_t used = 0;
    long v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(name);
    return v;
  } catch (const std::exception&) {
    throw SessionError(400, "query parameter '" + name + "' must be an integer");
  }
}

std::optional<int> seat_param(const httplib::Request& req) {
  if (!req.has_param("seat")) return std::nullopt;
  return static_cast<int>(parse_long(req.get_param_value("seat"), "seat"));
}

int body_seat(const json& body) {
  if (!body.is_object() || !body.contains("seat") || !body.at("seat").is_number_integer()) {
    throw SessionError(400, "expected an integer \"seat\"");
  }
  return body.at("seat").get<int>();
}

json events_json(const std::vector<Event>& events) {
  json out = json::array();
  for (const auto& e : events) out.push_back(e.to_json());
  return out;
}

}  // namespace

void install_routes(httplib::Server& server, SessionManager& sessions, const ServerConfig& config) {
  server.Get("/health", [&sessions](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}, {"sessions", sessions.size()}});
  });

  server.Post("/games", [&sessions](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto session = sessions.create(SessionConfig::from_json(parse_body(req)));
      json body = session->view(std::nullopt);
      body["config"] = session->config().to_json();
      send_json(res, 201, body);
    });
  });

  server.Get(R"(/games/([^/]+))", [&sessions](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, sessions.get(req.matches[1])->view(seat_param(req))); });
  });

  server.Post(R"(/games/([^/]+)/actions)", [&sessions](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto session = sessions.get(req.matches[1]);
      const json body = parse_body(req);
      const int seat = body_seat(body);
      session->submit(seat, body);
      send_json(res, 200, session->view(seat));
    });
  });

  const int max_poll = config.max_poll_ms;
  server.Get(R"(/games/([^/]+)/events)", [&sessions, max_poll](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto session = sessions.get(req.matches[1]);
      const long after = req.has_param("after") ? parse_long(req.get_param_value("after"), "after") : 0;
      long timeout = req.has_param("timeout_ms") ? parse_long(req.get_param_value("timeout_ms"), "timeout_ms") : 0;
      timeout = std::clamp<long>(timeout, 0, max_poll);
      auto events = session->events_after(after, static_cast<int>(timeout));
      const long last = events.empty() ? after : events.back().seq;
      send_json(res, 200, {{"events", events_json(events)}, {"last", last}});
    });
  });
}

struct WebSocketServer::Impl {
  SessionManager& sessions;
  std::string host;
  int port;
  asio::io_context ioc;
  std::unique_ptr<tcp::acceptor> acceptor;
  std::thread accept_thread;
  std::atomic<bool> stopping{false};
  std::atomic<int> live{0};

  Impl(SessionManager& s, std::string h, int p) : sessions(s), host(std::move(h)), port(p) {}

  void session_loop(tcp::socket socket) {
    ++live;
    try {
      beast::flat_buffer buffer;
      beast::http::request<beast::http::string_body> upgrade;
      beast::http::read(socket, buffer, upgrade);
      beast::websocket::stream<tcp::socket> ws(std::move(socket));
      ws.accept(upgrade);
      ws.text(true);

      static const std::regex path_re(R"(^/games/([^/?]+)/events(?:\?(.*))?$)");
      const std::string target(upgrade.target());
      std::smatch m;
      if (!std::regex_match(target, m, path_re)) {
        ws.write(asio::buffer(json{{"type", "error"}, {"payload", {{"status", 404}, {"error", "unknown path"}}}}.dump()));
        ws.close(beast::websocket::close_code::normal);
        --live;
        return;
      }
      long after = 0;
      static const std::regex after_re(R"((?:^|&)after=(-?\d+))");
      const std::string query = m[2];
      std::smatch am;
      if (std::regex_search(query, am, after_re)) after = std::stol(am[1]);

      auto session = sessions.get(m[1]);
      while (!stopping) {
        for (const auto& e : session->events_after(after, 100)) {
          ws.write(asio::buffer(e.to_json().dump()));
          after = e.seq;
        }
        if (ws.next_layer().available() == 0) continue;
        beast::flat_buffer in;
        ws.read(in);
        json reply;
        try {
          const json frame = json::parse(beast::buffers_to_string(in.data()));
          if (frame.value("type", std::string()) != "action") throw SessionError(400, "unknown frame type");
          const json& payload = frame.at("payload");
          const int seat = body_seat(payload);
          session->submit(seat, payload);
          reply = {{"type", "view"}, {"payload", session->view(seat)}};
        } catch (const SessionError& e) {
          json p = e.detail().is_object() ? e.detail() : json::object();
          p["status"] = e.status();
          p["error"] = e.what();
          reply = {{"type", "error"}, {"payload", p}};
        } catch (const std::exception& e) {
          reply = {{"type", "error"}, {"payload", {{"status", 400}, {"error", e.what()}}}};
        }
        ws.write(asio::buffer(reply.dump()));
      }
      ws.close(beast::websocket::close_code::going_away);
    } catch (const std::exception&) {
      // Client went away.
    }
    --live;
  }
};

WebSocketServer::WebSocketServer(SessionManager& sessions, std::string host, int port)
    : impl_(std::make_unique<Impl>(sessions, std::move(host), port)) {}

WebSocketServer::~WebSocketServer() { stop(); }

int WebSocketServer::start() {
  auto& s = *impl_;
  s.acceptor = std::make_unique<tcp::acceptor>(
      s.ioc, tcp::endpoint(asio::ip::make_address(s.host), static_cast<unsigned short>(s.port)));
  const int bound = s.acceptor->local_endpoint().port();
  s.port = bound;
  s.accept_thread = std::thread([&s] {
    while (!s.stopping) {
      boost::system::error_code ec;
      tcp::socket socket(s.ioc);
      s.acceptor->accept(socket, ec);
      if (ec || s.stopping) break;
      std::thread([&s, sock = std::move(socket)]() mutable { s.session_loop(std::move(sock)); }).detach();
    }
  });
  return bound;
}

void WebSocketServer::stop() {
  if (!impl_ || !impl_->acceptor) return;
  impl_->stopping = true;
  // A blocking accept does not return on close; wake it with a connection.
  boost::system::error_code ec;
  {
    asio::io_context ioc;
    tcp::socket wake(ioc);
    wake.connect(impl_->acceptor->local_endpoint(), ec);
  }
  if (impl_->accept_thread.joinable()) impl_->accept_thread.join();
  impl_->acceptor->close(ec);
  while (impl_->live > 0) std::this_thread::sleep_for(std::chrono::milliseconds(20));
  impl_->acceptor.reset();
}

int serve(SessionManager& sessions, const ServerConfig& config) {
  httplib::Server server;
  install_routes(server, sessions, config);
  std::unique_ptr<WebSocketServer> ws;
  if (config.ws_port > 0) {
    ws = std::make_unique<WebSocketServer>(sessions, config.host, config.ws_port);
    std::cerr << "websocket on ws://" << config.host << ":" << ws->start() << "\n";
  }
  std::cerr << "listening on http://" << config.host << ":" << config.port << "\n";
  if (!server.listen(config.host, config.port)) {
    std::cerr << "cannot bind " << config.host << ":" << config.port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace strategist::app
