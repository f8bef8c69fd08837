#pragma once

// HTTP+JSON service for live sessions, with an optional WebSocket endpoint
// streaming the same events as {type, payload} frames.

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "session.h"

namespace httplib {
class Server;
}

namespace strategist::app {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  // 0 disables the WebSocket endpoint.
  int ws_port = 0;
  // Upper bound for ?timeout_ms on the events long-poll.
  int max_poll_ms = 60000;
};

// Installs the routes on `server`:
//   POST /games                      create a session, 201 {id, ...}
//   GET  /games/{id}?seat=N          seat view (public view without seat)
//   POST /games/{id}/actions         {seat, action} or {seat, speech}
//   GET  /games/{id}/events?after=&timeout_ms=
//   GET  /health
void install_routes(httplib::Server& server, SessionManager& sessions, const ServerConfig& config = {});

// Serves ws://host:ws_port/games/{id}/events?after=N. Every event is pushed
// as {"type", "payload", "seq"}; a client frame {"type": "action", "payload":
// {seat, action | speech}} is submitted like POST /actions and failures come
// back as {"type": "error", "payload": {...}}.
class WebSocketServer {
 public:
  WebSocketServer(SessionManager& sessions, std::string host, int port);
  ~WebSocketServer();

  // Binds and starts accepting on a background thread; returns the bound port.
  int start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Blocks serving HTTP (and WebSocket when configured) until the process ends.
int serve(SessionManager& sessions, const ServerConfig& config);

}  // namespace strategist::app
