#pragma once

#include <memory>
#include <string>

#include "trustcal/session_service.hpp"

namespace trustcal::service {

struct HttpRequest {
  std::string method;
  std::string path;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

// JSON routes over a SessionService. Transport-independent so it can be
// driven directly in tests; HttpServer binds it to a socket.
//
//   POST /sessions                         {"condition", "participant_id", "seed"?}
//   GET  /sessions/{id}                    -> view
//   POST /sessions/{id}/move               {"direction": "up"|"down"|"left"|"right"}
//   POST /sessions/{id}/select             {"target_id"}
//   POST /sessions/{id}/manipulation       {"question_id", "answer"}
//   POST /sessions/{id}/trust-action       {"round", "action": "integrate"|"discard"}
//   GET  /sessions/{id}/summary
//   GET  /conditions
class HttpApi {
 public:
  explicit HttpApi(SessionService& service) : service_(service) {}

  HttpResponse handle(const HttpRequest& request);

 private:
  SessionService& service_;
};

class HttpServer {
 public:
  explicit HttpServer(HttpApi& api);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds to host:port (port 0 picks a free one) and returns the bound port,
  // or -1 on failure.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace trustcal::service
